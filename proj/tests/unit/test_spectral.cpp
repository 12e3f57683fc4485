#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jjq/cavity.hpp"
#include "jjq/error.hpp"
#include "jjq/report.hpp"
#include "jjq/spectral.hpp"
#include "test_support.hpp"

using namespace jjq;

namespace {

BasisLabel computational(int dim) { return {BasisKind::kComputational, {dim}, "test"}; }

void check_audit(const HermitianOperator& h, const Spectrum& s) {
  CHECK(max_residual(h, s) <= 1e-8 * std::max(1.0, h.norm_inf()));
  CHECK(orthonormality_error(s) <= 1e-10);
}

// Bare charge-parabola omega01 at EJ = 0: gap between the two lowest 4EC(n - ng)^2.
double bare_omega01(double ec, double ng) {
  std::vector<double> e;
  for (int n = -3; n <= 3; ++n) e.push_back(4.0 * ec * (n - ng) * (n - ng));
  std::sort(e.begin(), e.end());
  return e[1] - e[0];
}

}  // namespace

TEST_CASE("EJ = 0 charge basis example") {
  const auto s = eigensolve(build_cpb({.ec = 1.0, .ej = 0.0, .ng = 0.0, .ncut = 2}), 5, true);
  const std::vector<double> expected = {0, 4, 4, 16, 16};
  for (int i = 0; i < 5; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("two-state degenerate block splits by EJ") {
  // ng = 1/2, ncut = 1 restricted to n in {0, 1}: [[EC, -EJ/2], [-EJ/2, EC]].
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, -0.05, -0.05, 1.0;
  const auto s = eigensolve(HermitianOperator::from_dense(m, computational(2)), 2, true);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.95));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.05));
}

TEST_CASE("CPB gap is converged in the cutoff") {
  const auto a = eigensolve(build_cpb({.ec = 1.0, .ej = 10.0, .ng = 0.3, .ncut = 20}), 3, false);
  const auto b = eigensolve(build_cpb({.ec = 1.0, .ej = 10.0, .ng = 0.3, .ncut = 40}), 3, false,
                            {.method = EigenMethod::kDense});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) < 1e-8);
}

TEST_CASE("eigensolve argument checks") {
  const auto h = build_cpb({.ncut = 2});
  CHECK_THROWS_AS(eigensolve(h, 0, false), InvalidSpec);
  CHECK_THROWS_AS(eigensolve(h, 6, false), InvalidSpec);
  const auto s = eigensolve(h, 2, false);
  CHECK_FALSE(s.eigenvectors.has_value());
  CHECK_THROWS(matrix_element(charge_number_operator(2, 0.0), s, 0, 1));
}

TEST_CASE("matrix_element refuses a foreign basis") {
  const auto s = eigensolve(build_cpb({.ncut = 3}), 2, true);
  CHECK_NOTHROW(matrix_element(charge_number_operator(3, 0.0), s, 0, 1));
  CHECK_THROWS_AS(matrix_element(charge_number_operator(4, 0.0), s, 0, 1), BasisMismatch);
  // Same dimension, different basis kind.
  const auto other = HermitianOperator::from_dense(Eigen::MatrixXcd::Identity(7, 7), computational(7));
  CHECK_THROWS_AS(matrix_element(other, s, 0, 1), BasisMismatch);
}

TEST_CASE("eigenvector phase convention") {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = test::uniform_int(2, 20);
    const auto h = HermitianOperator::from_dense(test::random_hermitian(n), computational(n));
    const auto s = eigensolve(h, std::min(n, 4), true);
    for (int i = 0; i < s.size(); ++i) {
      const Eigen::VectorXcd v = s.vector(i);
      Eigen::Index k;
      v.cwiseAbs().maxCoeff(&k);
      CHECK(std::abs(v(k).imag()) < 1e-14);
      CHECK(v(k).real() > 0.0);
    }
  }
}

TEST_CASE("dense solves of random Hermitian matrices pass the audit") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = test::uniform_int(1, 40);
    const auto h = HermitianOperator::from_dense(test::random_hermitian(n, trial % 2 == 0), computational(n));
    const auto s = eigensolve(h, std::min(n, 5), true);
    check_audit(h, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense(), Eigen::EigenvaluesOnly);
    for (int i = 0; i < s.size(); ++i) CHECK(std::abs(s.eigenvalues[i] - es.eigenvalues()(i)) < 1e-10);
  }
}

TEST_CASE("sparse solver agrees with the dense solver") {
  SUBCASE("random banded complex matrix") {
    const int n = 700;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = test::uniform(-5, 5);
      for (int d = 1; d <= 3 && i + d < n; ++d) {
        m(i, i + d) = {test::uniform(-1, 1), test::uniform(-1, 1)};
        m(i + d, i) = std::conj(m(i, i + d));
      }
    }
    const auto h = HermitianOperator::from_dense(m, computational(n));
    const auto sparse = eigensolve(h, 6, true, {.method = EigenMethod::kSparse});
    const auto dense = eigensolve(h, 6, true, {.method = EigenMethod::kDense});
    check_audit(h, sparse);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(sparse.eigenvalues[i] - dense.eigenvalues[i]) < 1e-9);
  }
  SUBCASE("degenerate free-rotor spectrum") {
    const auto h = build_cpb({.ec = 1.0, .ej = 0.0, .ng = 0.0, .ncut = 400});
    const auto s = eigensolve(h, 5, true, {.method = EigenMethod::kSparse});
    const std::vector<double> expected = {0, 4, 4, 16, 16};
    for (int i = 0; i < 5; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    check_audit(h, s);
  }
  SUBCASE("flux qubit") {
    const auto h = build_flux3jj({.np = 32, .nm = 32});
    const auto sparse = eigensolve(h, 4, true, {.method = EigenMethod::kSparse});
    const auto dense = eigensolve(h, 4, false, {.method = EigenMethod::kDense});
    check_audit(h, sparse);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(sparse.eigenvalues[i] - dense.eigenvalues[i]) < 1e-8);
  }
}

TEST_CASE("every builder passes the residual and orthonormality audit") {
  const HermitianOperator ops[] = {
      build_cpb({.ec = 1.0, .ej = 50.0, .ng = 0.37}),
      build_flux3jj({}),
      build_flux3jj({.np = 32, .nm = 32, .discretization = FluxDiscretization::kFiniteDifference}),
      build_phase({.ej = 1e4, .bias = 0.5}),
      build_cavity({.g = 0.5, .nmax = 30, .counter_rotating = true}),
  };
  for (const auto& h : ops) check_audit(h, eigensolve(h, 5, true));
}

TEST_CASE("charge dispersion at EJ = 0 is the bare parabola swing") {
  const double ec = 0.7;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < kDispersionPoints; ++i) {
    const double w = bare_omega01(ec, static_cast<double>(i) / (kDispersionPoints - 1));
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  CHECK(hi - lo == doctest::Approx(4.0 * ec));
  CHECK(charge_dispersion({.ec = ec, .ej = 0.0}) == doctest::Approx(hi - lo).epsilon(1e-12));
}

TEST_CASE("charge dispersion falls with EJ/EC") {
  double previous = 1e300;
  for (double ratio : {1.0, 5.0, 10.0, 20.0, 50.0}) {
    const double d = charge_dispersion({.ec = 1.0, .ej = ratio});
    CHECK(d < previous);
    previous = d;
  }
  CHECK(charge_dispersion({.ej = 20.0}) / charge_dispersion({.ej = 1.0}) < 1e-2);
}

TEST_CASE("anharmonicity approaches -EC as EJ/EC grows") {
  double previous = 1e300;
  for (double ratio : {50.0, 200.0, 1000.0}) {
    ChargeQubitSpec spec{.ec = 1.0, .ej = ratio, .ng = 0.0};
    spec.ncut = std::max(kDefaultChargeCutoff, static_cast<int>(std::ceil(4 * std::sqrt(ratio) + 10)));
    const auto m = metrics(spec);
    CHECK(m.anharmonicity < 0.0);
    const double err = std::abs(m.anharmonicity + 1.0);
    CHECK(err < previous);
    previous = err;
    CHECK(m.omega01 == doctest::Approx(std::sqrt(8.0 * ratio) - 1.0).epsilon(0.01));
  }
  CHECK(previous < 0.1);
}

TEST_CASE("CPB sweet spots sit at half-integer offset charge") {
  const auto m = metrics(ChargeQubitSpec{.ec = 1.0, .ej = 1.0});
  REQUIRE(m.sweet_spots.size() == 1);
  CHECK(m.sweet_spots[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sweet-spot finder") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    x.push_back(-1.0 + 0.1 * i);
    y.push_back((x.back() - 0.33) * (x.back() - 0.33));
  }
  const auto spots = find_sweet_spots(x, y);
  REQUIRE(spots.size() == 1);
  CHECK(spots[0] == doctest::Approx(0.33).epsilon(1e-12));
  std::vector<double> line(x.size());
  for (size_t i = 0; i < x.size(); ++i) line[i] = 2.0 * x[i];
  CHECK(find_sweet_spots(x, line).empty());
}

TEST_CASE("CPB sweep is periodic in ng and finds the sweet spots") {
  std::vector<double> grid;
  for (int i = 0; i <= 160; ++i) grid.push_back(-2.0 + 4.0 * i / 160.0);
  const auto r = sweep(ChargeQubitSpec{.ec = 1.0, .ej = 1.0}, SweepParameter::kNg, grid, {.workers = 2});
  REQUIRE(r.rows.size() == grid.size());
  for (int i = 0; i + 40 < static_cast<int>(grid.size()); ++i) {
    CHECK(r.rows[i].metrics->omega01 == doctest::Approx(r.rows[i + 40].metrics->omega01).epsilon(1e-9));
  }
  const auto spots = find_sweet_spot(r);
  const std::vector<double> expected = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  REQUIRE(spots.size() == expected.size());
  for (size_t i = 0; i < spots.size(); ++i) CHECK(spots[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("sweep rows record per-point failures") {
  const std::vector<double> grid = {1.0, -1.0, 2.0};
  const auto r = sweep(ChargeQubitSpec{}, SweepParameter::kEJ, grid);
  CHECK(r.rows[0].metrics.has_value());
  CHECK_FALSE(r.rows[1].metrics.has_value());
  CHECK_FALSE(r.rows[1].error.empty());
  CHECK(r.rows[2].metrics.has_value());
  CHECK_THROWS_AS(with_parameter(FluxQubitSpec{}, SweepParameter::kNg, 0.1), InvalidSpec);
  CHECK_THROWS_AS(parse_sweep_parameter("temperature"), InvalidSpec);
  CHECK(parse_sweep_parameter(to_string(SweepParameter::kFlux)) == SweepParameter::kFlux);
}

TEST_CASE("sweeps are byte-identical for every worker count") {
  std::vector<double> grid;
  for (int i = 0; i < 23; ++i) grid.push_back(0.05 * i);
  const QubitModel model = ChargeQubitSpec{.ec = 1.0, .ej = 3.0};
  const std::string reference = report::sweep_csv(sweep(model, SweepParameter::kNg, grid, {.workers = 1}));
  for (int workers : {2, 3, 8}) {
    CHECK(report::sweep_csv(sweep(model, SweepParameter::kNg, grid, {.workers = workers})) == reference);
  }
}

TEST_CASE("flux qubit gap is minimal at the degeneracy point") {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.45 + 0.01 * i);
  const auto r = sweep(FluxQubitSpec{.np = 32, .nm = 32}, SweepParameter::kFlux, grid);
  const auto spots = find_sweet_spot(r);
  REQUIRE(spots.size() == 1);
  CHECK(spots[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("two-level fit of the flux qubit") {
  const auto fit = two_level_fit({.np = 32, .nm = 32}, 0.01, 7);
  CHECK(fit.epsilon == 0.0);
  CHECK(fit.max_relative_residual < 0.01);
  CHECK(fit.gap_ratio > 3.0);
  CHECK(fit.ip_proxy > 0.0);
  const int n = static_cast<int>(fit.flux.size());
  for (int i = 0; i < n / 2; ++i) {
    // f -> 1 - f is a symmetry of the spectrum.
    CHECK(fit.gap[i] == doctest::Approx(fit.gap[n - 1 - i]).epsilon(1e-8));
    CHECK(fit.epsilons[i] == doctest::Approx(-fit.epsilons[n - 1 - i]).epsilon(1e-6));
  }
  CHECK_THROWS_AS(two_level_fit({.ej = 2.0, .np = 32, .nm = 32}, 0.01, 5), DomainError);
}

TEST_CASE("flux qubit levels are converged on the default grid") {
  const auto r = flux_convergence({.np = 32, .nm = 32});
  CHECK(r.max_change < 1e-6);
  CHECK(r.coarse.size() == 4);
}

TEST_CASE("values-only tridiagonal path agrees with the dense path across cutoffs") {
  // Includes ncut = 40 at EJ = 50, where an unscaled QR iteration fails to converge.
  for (int ncut = 30; ncut <= 60; ++ncut) {
    const auto h = build_cpb({.ec = 1.0, .ej = 50.0, .ng = 0.0, .ncut = ncut});
    const auto fast = eigensolve(h, 3, false);
    const auto dense = eigensolve(h, 3, false, {.method = EigenMethod::kDense});
    for (int i = 0; i < 3; ++i) CHECK(std::abs(fast.eigenvalues[i] - dense.eigenvalues[i]) < 1e-9);
  }
}
