#include <doctest.h>

#include <cmath>

#include "jjq/error.hpp"
#include "jjq/qec.hpp"
#include "test_support.hpp"

using namespace jjq;
using namespace jjq::qec;

namespace {

const Complex kAlpha(0.6, 0.0);
const Complex kBeta(0.0, 0.8);

// alpha |a> + beta |b> on three qubits.
PureState pair(const char* a, const char* b, Complex alpha = kAlpha, Complex beta = kBeta) {
  return PureState(3, alpha * PureState::from_bits(a).amplitudes() + beta * PureState::from_bits(b).amplitudes());
}

int popcount3(unsigned m) { return (m & 1) + ((m >> 1) & 1) + ((m >> 2) & 1); }

}  // namespace

TEST_CASE("encoding") {
  CHECK(encode(1.0, 0.0).fidelity(PureState::from_bits("000")) == 1.0);
  const PureState code = encode(kAlpha, kBeta);
  CHECK(code.fidelity(pair("000", "111")) == doctest::Approx(1.0).epsilon(1e-15));
  // Entangled, not the product (alpha|0> + beta|1>)^3.
  const Complex one[2] = {kAlpha, kBeta};
  Vector product(8);
  for (int k = 0; k < 8; ++k) product(k) = one[k >> 2] * one[(k >> 1) & 1] * one[k & 1];
  CHECK(code.fidelity(PureState(3, product)) < 0.9);
  CHECK_THROWS_AS(encode(1.0, 1.0), InvalidSpec);
}

TEST_CASE("GHZ has deterministic even parity") {
  Rng rng(1);
  const PureState ghz = encode(std::sqrt(0.5), std::sqrt(0.5));
  for (int i = 0; i < 50; ++i) {
    const auto r = extract_syndrome(ghz, rng);
    CHECK(r.syndrome == Syndrome{1, 1});
    CHECK(r.state.fidelity(ghz) == doctest::Approx(1.0));
  }
}

TEST_CASE("syndrome table and correction of single flips") {
  Rng rng(2);
  const Syndrome expected[] = {{-1, 1}, {-1, -1}, {1, -1}};
  for (int q = 0; q < 3; ++q) {
    const PureState flipped = apply_flips(encode(kAlpha, kBeta), 1u << q);
    const auto r = extract_syndrome(flipped, rng);
    CHECK(r.syndrome == expected[q]);
    // Parity measurement leaves the encoded superposition untouched.
    CHECK(r.state.fidelity(flipped) == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(correction_qubit(r.syndrome).has_value());
    CHECK(*correction_qubit(r.syndrome) == q);
  }
  CHECK_FALSE(correction_qubit({1, 1}).has_value());
}

TEST_CASE("flip on the last qubit is undone exactly") {
  Rng rng(3);
  const PureState flipped = pair("001", "110");
  CHECK(flipped.fidelity(apply_flips(encode(kAlpha, kBeta), 0b100)) == doctest::Approx(1.0));
  const auto r = extract_syndrome(flipped, rng);
  CHECK(r.syndrome == Syndrome{1, -1});
  const PureState fixed = correct(r.state, r.syndrome);
  CHECK((fixed.amplitudes() - encode(kAlpha, kBeta).amplitudes()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("double flip is miscorrected into a logical error") {
  Rng rng(4);
  const auto r = extract_syndrome(apply_flips(encode(kAlpha, kBeta), 0b110), rng);
  CHECK(r.syndrome == Syndrome{-1, 1});
  const PureState wrong = correct(r.state, r.syndrome);
  CHECK(wrong.fidelity(pair("111", "000")) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("every single flip is corrected with unit fidelity") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = test::random_state(2);
    for (unsigned mask : {0u, 1u, 2u, 4u}) {
      const auto r = extract_syndrome(apply_flips(encode(v(0), v(1)), mask), rng);
      const PureState out = decode(correct(r.state, r.syndrome));
      CHECK(logical_fidelity(out, v(0), v(1)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK_FALSE(run_cycle(v(0), v(1), mask, rng));
    }
  }
}

TEST_CASE("logical failure is exactly weight >= 2") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = test::random_state(2);
    for (unsigned mask = 0; mask < 8; ++mask) {
      CHECK(run_cycle(v(0), v(1), mask, rng) == (popcount3(mask) >= 2));
    }
  }
}

TEST_CASE("exhaustive enumeration reproduces the analytic rate") {
  for (double p : {0.0, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0}) {
    const double oracle = 3.0 * p * p * (1.0 - p) + p * p * p;
    CHECK(analytic_rate(p) == doctest::Approx(oracle).epsilon(1e-15));
    // Same sum evaluated in a different order: agreement to a few ulps.
    CHECK(std::abs(exhaustive_rate(p) - oracle) <= 4.0 * std::numeric_limits<double>::epsilon() * oracle);
  }
  CHECK(exhaustive_rate(0.0) == 0.0);
  CHECK(exhaustive_rate(1.0) == 1.0);
  CHECK_THROWS_AS(exhaustive_rate(-0.1), InvalidSpec);
  CHECK_THROWS_AS(monte_carlo(1.5, 10, 1), InvalidSpec);
}

TEST_CASE("Monte Carlo agrees with the analytic rate") {
  for (double p : {0.01, 0.1}) {
    const auto stats = monte_carlo(p, 200000, 11);
    const double expected = analytic_rate(p);
    const double sigma = std::sqrt(expected * (1.0 - expected) / stats.trials);
    CHECK(std::abs(stats.rate - expected) < 3.0 * sigma);
    CHECK(stats.rate == static_cast<double>(stats.logical_failures) / stats.trials);
    CHECK(stats.std_error == doctest::Approx(std::sqrt(stats.rate * (1 - stats.rate) / stats.trials)));
  }
  CHECK(monte_carlo(0.0, 1000, 1).logical_failures == 0);
  CHECK(monte_carlo(1.0, 1000, 1).logical_failures == 1000);
}

TEST_CASE("Monte Carlo counts do not depend on the worker count") {
  const std::int64_t trials = 3 * kTrialsPerChunk + 17;
  const auto reference = monte_carlo(0.05, trials, 99, 1);
  for (int workers : {2, 3, 5}) {
    const auto s = monte_carlo(0.05, trials, 99, workers);
    CHECK(s.logical_failures == reference.logical_failures);
    CHECK(s.rate == reference.rate);
  }
  CHECK(monte_carlo(0.05, trials, 99, 2).logical_failures == reference.logical_failures);
  CHECK(monte_carlo(0.05, trials, 100, 1).logical_failures != reference.logical_failures);
}
