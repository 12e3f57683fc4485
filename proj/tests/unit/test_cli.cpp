#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace jjq;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(JJQ_DATA_DIR) + "/netlists/" + name; }

}  // namespace

TEST_CASE("range parsing") {
  CHECK(cli::parse_range("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(cli::parse_range("-2:2:5") == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(cli::parse_range("0.3:7:1") == std::vector<double>{0.3});
  const auto grid = cli::parse_range("0:0.3:4");
  CHECK(grid.back() == 0.3);
  for (const char* bad : {"0:1", "0:1:0", "0:1:x", "a:1:3", "0:1:2.5", "0:inf:3"}) {
    CHECK_THROWS(cli::parse_range(bad));
  }
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"sweep", "--model", "cpb", "--param", "ng"}).code == cli::kExitUsage);  // no --range
  CHECK(run({"sweep", "--model", "cpb", "--param", "ng", "--range", "0:1"}).code == cli::kExitUsage);
  CHECK(run({"spectrum", "--model", "cpb", "--netlist", data("cpb.net")}).code == cli::kExitUsage);
  CHECK(run({"spectrum"}).code == cli::kExitUsage);
  CHECK(run({"spectrum", "--model", "cpb", "--format", "svg"}).code == cli::kExitUsage);

  const auto missing = run({"parse", data("does_not_exist.net")});
  CHECK(missing.code == cli::kExitDomain);
  CHECK(missing.err.find("does_not_exist.net") != std::string::npos);

  const auto bias = run({"spectrum", "--model", "phase", "--b", "1.2"});
  CHECK(bias.code == cli::kExitDomain);
  CHECK(bias.err.find("b >= 1") != std::string::npos);

  const auto ring = run({"parse", data("ring4.net"), "--recognize"});
  CHECK(ring.code == cli::kExitDomain);
  CHECK(ring.err.find("FLUX3JJ") != std::string::npos);

  CHECK(run({"sweep", "--model", "flux", "--param", "ng", "--range", "0:1:3"}).code == cli::kExitDomain);
}

TEST_CASE("dry runs validate without output") {
  const std::vector<std::vector<std::string>> commands = {
      {"parse", data("cpb.net"), "--dry-run"},
      {"spectrum", "--model", "flux", "--dry-run"},
      {"sweep", "--model", "cpb", "--param", "ng", "--range=-2:2:161", "--dry-run"},
      {"cavity", "--rabi", "--g", "0.5", "--dry-run"},
      {"decohere", "--T1", "10", "--Tphi", "20", "--dry-run"},
      {"qec-sim", "--p", "0.01", "--trials", "1000000", "--dry-run"},
  };
  for (const auto& c : commands) {
    const auto r = run(c);
    INFO(c.front());
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.empty());
    CHECK(r.err.find("dry-run") != std::string::npos);
  }
}

TEST_CASE("parse prints the canonical form and the recognized template") {
  const auto r = run({"parse", data("cpb.net"), "--recognize"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("cap Cg island gate C=0.5") != std::string::npos);
  CHECK(r.out.find("# template: CPB") != std::string::npos);
  CHECK(r.out.find("# spec: EC=") != std::string::npos);
  const auto j = run({"parse", data("flux3jj.net"), "--emit-json"});
  REQUIRE(j.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(j.out)["loops"][0]["name"] == "ring");
}

TEST_CASE("sweep CSV over offset charge") {
  const auto r = run({"sweep", "--model", "cpb", "--EC", "1", "--EJ", "1", "--param", "ng", "--range", "-2:2:161"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "param,E0,E1,E2,E3,E4,omega01,omega12,anharm,dispersion,status");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 161);
}

TEST_CASE("sweeps and Monte Carlo are byte-identical across worker counts") {
  const std::vector<std::string> sweep = {"sweep", "--model", "cpb", "--EJ", "2", "--param", "ng", "--range", "0:1:21",
                                          "--format", "json"};
  auto one = sweep, many = sweep;
  one.insert(one.end(), {"--workers", "1"});
  many.insert(many.end(), {"--workers", "4"});
  CHECK(run(one).out == run(many).out);

  const std::vector<std::string> qec = {"qec-sim", "--p", "0.05", "--trials", "200000", "--seed", "5"};
  auto q1 = qec, q3 = qec;
  q1.insert(q1.end(), {"--workers", "1"});
  q3.insert(q3.end(), {"--workers", "3"});
  const auto a = run(q1);
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == run(q3).out);
  CHECK(a.out == run(q1).out);
}

TEST_CASE("seed falls back to JJQ_SEED") {
  const std::vector<std::string> base = {"qec-sim", "--p", "0.1", "--trials", "20000"};
  auto explicit_seed = base;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "77"});
  ::setenv("JJQ_SEED", "77", 1);
  const auto from_env = run(base);
  ::setenv("JJQ_SEED", "not-a-number", 1);
  CHECK(run(base).code == cli::kExitUsage);
  ::unsetenv("JJQ_SEED");
  CHECK(from_env.out == run(explicit_seed).out);
  auto seed_one = base;
  seed_one.insert(seed_one.end(), {"--seed", "1"});
  CHECK(run(base).out == run(seed_one).out);
}

TEST_CASE("--out writes the result to a file") {
  const auto path = std::filesystem::temp_directory_path() / "jjq_cli_test_decay.csv";
  std::filesystem::remove(path);
  const auto r = run({"decohere", "--T1", "10", "--Tphi", "20", "--steps", "10", "--format", "csv", "-o", path.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "time,population,coherence");
  std::filesystem::remove(path);
}

TEST_CASE("cavity summary and scans") {
  const auto r = run({"cavity", "--wr", "5", "--w01", "6", "--g", "0.05"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["chi"].get<double>() == doctest::Approx(0.05 * 0.05 / 1.0).epsilon(0.05));
  CHECK(j["commutator_N_H"].get<double>() < 1e-10);

  const auto scan = run({"cavity", "--rabi", "--wr", "1", "--g", "0.1", "--scan3", "2.8:3.2:21", "--format", "json"});
  REQUIRE(scan.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(scan.out)["min_gap"].get<double>() > 0.0);

  const auto sweep = run({"cavity", "--rabi", "--nmax", "10", "--param", "g", "--range", "0:0.5:3", "--format", "csv"});
  REQUIRE(sweep.code == cli::kExitOk);
  CHECK(sweep.out.rfind("param,E0", 0) == 0);
}

TEST_CASE("spectrum from a netlist") {
  const auto r = run({"spectrum", "--netlist", data("phase.net"), "--format", "csv"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("level,energy\n0,", 0) == 0);
}
