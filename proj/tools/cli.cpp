#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "jjq/cavity.hpp"
#include "jjq/error.hpp"
#include "jjq/netlist.hpp"
#include "jjq/qec.hpp"
#include "jjq/report.hpp"
#include "jjq/spectral.hpp"
#include "jjq/statesim.hpp"

namespace jjq::cli {

namespace {

struct OutputOptions {
  std::string path;  // empty: write to the output stream
  std::string format;
  bool dry_run = false;
};

struct ModelOptions {
  std::string netlist;
  std::string model;
  std::optional<double> ec, ej, ng, alpha, flux, bias;
  std::optional<int> ncut, np, nm, npts;
};

void add_output(CLI::App* cmd, OutputOptions& o, const std::string& default_format,
                const std::vector<std::string>& formats) {
  o.format = default_format;
  cmd->add_option("-o,--out", o.path, "Output file (default: standard output)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_flag("--dry-run", o.dry_run, "Validate inputs without computing");
}

void add_model(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--netlist", m.netlist, "Circuit netlist file");
  cmd->add_option("--model", m.model, "Inline model")->check(CLI::IsMember({"cpb", "flux", "phase"}));
  cmd->add_option("--EC", m.ec, "Charging energy EC (GHz)");
  cmd->add_option("--EJ", m.ej, "Josephson energy EJ (GHz)");
  cmd->add_option("--ng", m.ng, "Offset charge (cpb)");
  cmd->add_option("--ncut", m.ncut, "Charge cutoff (cpb)");
  cmd->add_option("--alpha", m.alpha, "Small-junction ratio (flux)");
  cmd->add_option("--f", m.flux, "External flux in flux quanta (flux)");
  cmd->add_option("--np", m.np, "Plane-wave cutoff for phi_p (flux)");
  cmd->add_option("--nm", m.nm, "Plane-wave cutoff for phi_m (flux)");
  cmd->add_option("--b", m.bias, "Bias ratio Ib/Ic (phase)");
  cmd->add_option("--npts", m.npts, "Grid points (phase)");
}

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

QubitModel resolve_model(const ModelOptions& m, std::string* label) {
  if (m.netlist.empty() == m.model.empty()) {
    throw Usage("give exactly one model source: --netlist FILE or --model cpb|flux|phase");
  }
  if (!m.netlist.empty()) {
    const RecognizedTopology topo = recognize(parse_netlist_file(m.netlist));
    *label = to_string(topo.kind);
    return std::visit(
        [](const auto& s) -> QubitModel {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, QubitResonatorSpec>) {
            return s.qubit;
          } else {
            return s;
          }
        },
        topo.spec);
  }
  *label = m.model;
  if (m.model == "cpb") {
    ChargeQubitSpec s;
    s.ec = m.ec.value_or(s.ec);
    s.ej = m.ej.value_or(s.ej);
    s.ng = m.ng.value_or(s.ng);
    s.ncut = m.ncut.value_or(std::max(kDefaultChargeCutoff,
                                      static_cast<int>(std::ceil(4.0 * std::sqrt(s.ej / s.ec) + 10.0))));
    s.validate();
    return s;
  }
  if (m.model == "flux") {
    FluxQubitSpec s;
    s.ec = m.ec.value_or(s.ec);
    s.ej = m.ej.value_or(s.ej);
    s.alpha = m.alpha.value_or(s.alpha);
    s.flux = m.flux.value_or(s.flux);
    s.np = m.np.value_or(s.np);
    s.nm = m.nm.value_or(s.nm);
    s.validate();
    return s;
  }
  PhaseQubitSpec s;
  s.ec = m.ec.value_or(s.ec);
  s.ej = m.ej.value_or(s.ej);
  s.bias = m.bias.value_or(s.bias);
  s.npts = m.npts.value_or(s.npts);
  s.validate();
  return s;
}

void emit(const OutputOptions& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.path, std::ios::binary);
  if (!file) throw IoError("cannot write output file '" + o.path + "'");
  file << text;
  if (!file) throw IoError("failed writing output file '" + o.path + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("JJQ_SEED")) {
    std::uint64_t v = 0;
    const std::string s = env;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Usage("JJQ_SEED must be a non-negative integer, got '" + s + "'");
    }
    return v;
  }
  return 1;
}

// One-line "key=value" summary of a recognized spec.
std::string describe(const ExtractedSpec& spec) {
  const auto kv = [](const char* k, double v) { return std::string(" ") + k + "=" + report::format_number(v); };
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ChargeQubitSpec>) {
          return kv("EC", s.ec) + kv("EJ", s.ej) + kv("ng", s.ng) + kv("ncut", s.ncut);
        } else if constexpr (std::is_same_v<T, FluxQubitSpec>) {
          return kv("EC", s.ec) + kv("EJ", s.ej) + kv("alpha", s.alpha) + kv("f", s.flux);
        } else if constexpr (std::is_same_v<T, PhaseQubitSpec>) {
          return kv("EC", s.ec) + kv("EJ", s.ej) + kv("b", s.bias);
        } else {
          return kv("EC", s.qubit.ec) + kv("EJ", s.qubit.ej) + kv("ng", s.qubit.ng) + kv("omega_r", s.cavity.omega_r) +
                 kv("omega01", s.cavity.omega01) + kv("g", s.cavity.g) + kv("Cc", s.coupling_cap_ff);
        }
      },
      spec);
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (size_t k = 0; k <= text.size(); ++k) {
    if (k == text.size() || text[k] == ':') {
      parts.push_back(text.substr(start, k - start));
      start = k + 1;
    }
  }
  if (parts.size() != 3) throw Usage("range must be start:stop:count, got '" + text + "'");
  const auto number = [&](const std::string& s) {
    double v = 0.0;
    const char* first = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Usage("range bound '" + s + "' is not a finite number");
    }
    return v;
  };
  const double a = number(parts[0]);
  const double b = number(parts[1]);
  int count = 0;
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
  if (ec != std::errc() || ptr != parts[2].data() + parts[2].size() || count < 1) {
    throw Usage("range count '" + parts[2] + "' must be a positive integer");
  }
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
  if (count > 1) grid.back() = b;
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"jjq: Josephson-junction qubit spectra, cavity QED, noise and bit-flip code tools"};
  app.name("jjq");
  app.require_subcommand(1);

  // parse
  std::string parse_file;
  bool emit_json = false;
  bool do_recognize = false;
  OutputOptions parse_out;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a netlist and print its canonical form");
  parse_cmd->add_option("file", parse_file, "Netlist file")->required();
  parse_cmd->add_flag("--emit-json", emit_json, "Dump the netlist as JSON");
  parse_cmd->add_flag("--recognize", do_recognize, "Also report the recognized qubit template");
  add_output(parse_cmd, parse_out, "text", {"text", "json"});

  // spectrum
  ModelOptions spec_model;
  OutputOptions spec_out;
  int spec_levels = 5;
  auto* spec_cmd = app.add_subcommand("spectrum", "Lowest energy levels and qubit metrics");
  add_model(spec_cmd, spec_model);
  spec_cmd->add_option("--levels", spec_levels, "Number of levels")->check(CLI::PositiveNumber);
  add_output(spec_cmd, spec_out, "json", {"csv", "json"});

  // sweep
  ModelOptions sweep_model;
  OutputOptions sweep_out;
  std::string sweep_param;
  std::string sweep_range;
  int workers = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter and tabulate levels and metrics");
  add_model(sweep_cmd, sweep_model);
  sweep_cmd->add_option("--param", sweep_param, "ng, f, b or EJ")->required();
  sweep_cmd->add_option("--range", sweep_range, "start:stop:count")->required();
  sweep_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  add_output(sweep_cmd, sweep_out, "csv", {"csv", "json", "svg"});

  // cavity
  CavitySpec cav;
  bool rabi = false;
  std::string cav_param;
  std::string cav_range;
  std::string cav_scan;
  OutputOptions cav_out;
  auto* cav_cmd = app.add_subcommand("cavity", "Jaynes-Cummings / Rabi analysis and scans");
  cav_cmd->add_option("--wr", cav.omega_r, "Resonator frequency (GHz)");
  cav_cmd->add_option("--w01", cav.omega01, "Qubit frequency (GHz)");
  cav_cmd->add_option("--g", cav.g, "Coupling (GHz)");
  cav_cmd->add_option("--nmax", cav.nmax, "Fock cutoff");
  cav_cmd->add_flag("--rabi", rabi, "Include counter-rotating terms");
  cav_cmd->add_option("--param", cav_param, "Sweep parameter: g, omega01 or omega_r");
  cav_cmd->add_option("--range", cav_range, "start:stop:count for --param");
  cav_cmd->add_option("--scan3", cav_scan, "omega01 lo:hi:count three-photon resonance scan");
  cav_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  add_output(cav_cmd, cav_out, "json", {"csv", "json", "svg"});

  // decohere
  NoiseParams noise{10.0, 20.0};
  double t_end = 0.0;
  int steps = 200;
  OutputOptions dec_out;
  auto* dec_cmd = app.add_subcommand("decohere", "T1 / Tphi decay curves and T2 fit");
  dec_cmd->add_option("--T1", noise.t1, "Energy relaxation time (us)");
  dec_cmd->add_option("--Tphi", noise.tphi, "Pure dephasing time (us)");
  dec_cmd->add_option("--tend", t_end, "Total time (us); default 3 T2");
  dec_cmd->add_option("--steps", steps, "Time steps")->check(CLI::PositiveNumber);
  add_output(dec_cmd, dec_out, "json", {"csv", "json", "svg"});

  // qec-sim
  double p = 0.01;
  std::int64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  OutputOptions qec_out;
  auto* qec_cmd = app.add_subcommand("qec-sim", "Monte-Carlo logical error rate of the bit-flip code");
  qec_cmd->add_option("--p", p, "Physical flip probability");
  qec_cmd->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  qec_cmd->add_option("--seed", seed, "RNG seed (fallback: JJQ_SEED, then 1)");
  qec_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  add_output(qec_cmd, qec_out, "json", {"csv", "json"});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) {
      const Netlist net = parse_netlist_file(parse_file);
      std::string text = emit_json || parse_out.format == "json" ? netlist_to_json(net) : print_netlist(net);
      if (do_recognize) {
        const RecognizedTopology topo = recognize(net);
        std::string trace = "# template: " + to_string(topo.kind) + "\n# spec:" + describe(topo.spec) + "\n";
        for (const auto& line : topo.diagnostics) trace += "# " + line + "\n";
        if (emit_json || parse_out.format == "json") {
          err << trace;
        } else {
          text += trace;
        }
      }
      if (parse_out.dry_run) {
        err << "dry-run: netlist '" << parse_file << "' is valid (" << net.elements.size() << " elements)\n";
        return kExitOk;
      }
      emit(parse_out, text, out);
      return kExitOk;
    }

    if (spec_cmd->parsed()) {
      std::string label;
      const QubitModel model = resolve_model(spec_model, &label);
      if (spec_out.dry_run) {
        err << "dry-run: " << label << " model is valid\n";
        return kExitOk;
      }
      const QubitMetrics m = metrics(model);
      const std::vector<double> levels = std::visit(
          [&](const auto& s) {
            HermitianOperator h = [&] {
              using T = std::decay_t<decltype(s)>;
              if constexpr (std::is_same_v<T, ChargeQubitSpec>) return build_cpb(s);
              else if constexpr (std::is_same_v<T, FluxQubitSpec>) return build_flux3jj(s);
              else return build_phase(s);
            }();
            return eigensolve(h, std::min(spec_levels, h.dim()), false).eigenvalues;
          },
          model);
      emit(spec_out, spec_out.format == "csv" ? report::spectrum_csv(levels)
                                              : report::spectrum_json(label, levels, m), out);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      std::string label;
      const QubitModel model = resolve_model(sweep_model, &label);
      const SweepParameter param = parse_sweep_parameter(sweep_param);
      const std::vector<double> grid = parse_range(sweep_range);
      with_parameter(model, param, grid.front());
      if (sweep_out.dry_run) {
        err << "dry-run: " << label << " sweep over " << to_string(param) << " with " << grid.size()
            << " points is valid\n";
        return kExitOk;
      }
      const SweepResult result = sweep(model, param, grid, {workers});
      std::string text;
      if (sweep_out.format == "csv") text = report::sweep_csv(result);
      else if (sweep_out.format == "json") text = report::sweep_json(result);
      else text = report::sweep_svg(result, label + " levels vs " + result.parameter);
      emit(sweep_out, text, out);
      return kExitOk;
    }

    if (cav_cmd->parsed()) {
      cav.counter_rotating = rabi;
      cav.validate();
      if (cav_param.empty() != cav_range.empty()) throw Usage("--param and --range go together");
      if (!cav_param.empty() && !cav_scan.empty()) throw Usage("use either --param/--range or --scan3");
      std::optional<CavityParameter> param;
      std::vector<double> grid;
      if (!cav_param.empty()) {
        param = parse_cavity_parameter(cav_param);
        grid = parse_range(cav_range);
      }
      std::vector<double> scan_grid;
      if (!cav_scan.empty()) {
        scan_grid = parse_range(cav_scan);
        if (scan_grid.size() < 5) throw Usage("--scan3 needs at least 5 points");
      }
      if (cav_out.dry_run) {
        err << "dry-run: cavity spec is valid (eta = " << report::format_number(cav.eta()) << ")\n";
        return kExitOk;
      }
      if (param) {
        const SweepResult result = cavity_sweep(cav, *param, grid, {workers});
        std::string text;
        if (cav_out.format == "csv") text = report::sweep_csv(result);
        else if (cav_out.format == "json") text = report::sweep_json(result);
        else text = report::sweep_svg(result, std::string(rabi ? "Rabi" : "JC") + " levels vs " + result.parameter);
        emit(cav_out, text, out);
        return kExitOk;
      }
      if (!scan_grid.empty()) {
        const ResonanceScan scan = resonance_scan_3photon(cav, scan_grid.front(), scan_grid.back(),
                                                          static_cast<int>(scan_grid.size()));
        std::string text;
        if (cav_out.format == "csv") {
          text = "omega01,gap\n";
          for (size_t i = 0; i < scan.omega01.size(); ++i) {
            text += report::format_number(scan.omega01[i]) + "," + report::format_number(scan.gap[i]) + "\n";
          }
        } else if (cav_out.format == "json") {
          nlohmann::ordered_json j;
          j["location"] = scan.location;
          j["min_gap"] = scan.min_gap;
          j["omega01"] = scan.omega01;
          j["gap"] = scan.gap;
          text = j.dump(2) + "\n";
        } else {
          text = report::line_plot_svg("three-photon splitting", "omega01 (GHz)", "gap (GHz)",
                                       scan.omega01, {{"gap", scan.gap}});
        }
        emit(cav_out, text, out);
        return kExitOk;
      }
      // Summary of the single operating point.
      const PhotonEstimate photons = ground_state_photons(cav);
      if (photons.warning) err << "warning: " << *photons.warning << "\n";
      nlohmann::ordered_json j;
      j["omega_r"] = cav.omega_r;
      j["omega01"] = cav.omega01;
      j["g"] = cav.g;
      j["eta"] = cav.eta();
      j["model"] = rabi ? "rabi" : "jc";
      j["nmax"] = cav.nmax;
      j["ground_photons"] = photons.photons;
      j["cutoff_change"] = photons.cutoff_change;
      j["commutator_N_H"] = commutator_norm(excitation_number(cav), build_cavity(cav));
      try {
        j["chi"] = dispersive_shift(cav);
      } catch (const DomainError& e) {
        j["chi"] = nullptr;
        j["chi_error"] = e.what();
      }
      std::string text;
      if (cav_out.format == "json") {
        text = j.dump(2) + "\n";
      } else if (cav_out.format == "csv") {
        std::string header, values;
        for (const auto& [k, v] : j.items()) {
          header += (header.empty() ? "" : ",") + k;
          values += (values.empty() ? "" : ",") +
                    (v.is_number() ? report::format_number(v.get<double>()) : v.is_null() ? "" : v.get<std::string>());
        }
        text = header + "\n" + values + "\n";
      } else {
        throw Usage("svg output needs --param/--range or --scan3");
      }
      emit(cav_out, text, out);
      return kExitOk;
    }

    if (dec_cmd->parsed()) {
      noise.validate();
      const double total = t_end > 0.0 ? t_end : 3.0 * noise.t2();
      if (!std::isfinite(total)) throw Usage("give --tend when T1 and Tphi are both infinite");
      if (dec_out.dry_run) {
        err << "dry-run: T1=" << noise.t1 << " Tphi=" << noise.tphi << " T2=" << noise.t2() << " is valid\n";
        return kExitOk;
      }
      const DecayCurve curve = simulate_decay(noise, total, steps);
      const DecayFit fit = fit_decay(curve, noise);
      std::string text;
      if (dec_out.format == "csv") text = report::decay_csv(curve);
      else if (dec_out.format == "json") text = report::decay_json(noise, curve, fit);
      else text = report::decay_svg(curve, "decay: T1=" + report::format_number(noise.t1) +
                                               " us, Tphi=" + report::format_number(noise.tphi) + " us");
      emit(dec_out, text, out);
      return kExitOk;
    }

    if (qec_cmd->parsed()) {
      const std::uint64_t s = resolve_seed(seed);
      const double analytic = qec::analytic_rate(p);
      if (qec_out.dry_run) {
        err << "dry-run: p=" << p << " trials=" << trials << " seed=" << s << " is valid\n";
        return kExitOk;
      }
      const qec::TrialStats stats = qec::monte_carlo(p, trials, s, workers);
      emit(qec_out, qec_out.format == "csv" ? report::qec_csv(stats, analytic) : report::qec_json(stats, analytic),
           out);
      return kExitOk;
    }
  } catch (const Usage& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace jjq::cli
