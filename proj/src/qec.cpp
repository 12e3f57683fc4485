#include "jjq/qec.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "jjq/error.hpp"
#include "jjq/parallel.hpp"

namespace jjq::qec {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("probability p must lie in [0, 1]");
}

}  // namespace

PureState encode(Complex alpha, Complex beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw InvalidSpec("logical amplitudes are not normalized: |alpha|^2 + |beta|^2 = " +
                      std::to_string(norm));
  }
  Vector v = Vector::Zero(8);
  v(0) = alpha;
  v(4) = beta;  // |100>
  PureState s(3, v / v.norm());
  s = apply_gate(s, gates::cnot(), {0, 1});
  return apply_gate(s, gates::cnot(), {0, 2});
}

PureState apply_flips(const PureState& state, unsigned mask) {
  PureState s = state;
  for (int q = 0; q < state.nqubits(); ++q) {
    if (mask & (1u << q)) s = apply_gate(s, gates::pauli_x(), {q});
  }
  return s;
}

SyndromeResult extract_syndrome(const PureState& state, Rng& rng) {
  const ParityOutcome first = parity_measure(state, 0, 1, rng);
  const ParityOutcome second = parity_measure(first.state, 1, 2, rng);
  return {{first.parity, second.parity}, second.state};
}

std::optional<int> correction_qubit(const Syndrome& syndrome) {
  if (syndrome.s12 == -1 && syndrome.s23 == 1) return 0;
  if (syndrome.s12 == -1 && syndrome.s23 == -1) return 1;
  if (syndrome.s12 == 1 && syndrome.s23 == -1) return 2;
  return std::nullopt;
}

PureState correct(const PureState& state, const Syndrome& syndrome) {
  const auto q = correction_qubit(syndrome);
  return q ? apply_gate(state, gates::pauli_x(), {*q}) : state;
}

PureState decode(const PureState& state) {
  const PureState s = apply_gate(state, gates::cnot(), {0, 2});
  return apply_gate(s, gates::cnot(), {0, 1});
}

double logical_fidelity(const PureState& decoded, Complex alpha, Complex beta) {
  if (decoded.nqubits() != 3) throw InvalidSpec("logical fidelity needs a three-qubit state");
  // rho_0(a, b) = sum over ancilla index k of psi(a k) conj(psi(b k)).
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int k = 0; k < 4; ++k) {
        rho(a, b) += decoded.amplitude(4 * a + k) * std::conj(decoded.amplitude(4 * b + k));
      }
    }
  }
  Eigen::Vector2cd psi(alpha, beta);
  return psi.dot(rho * psi).real();
}

bool run_cycle(Complex alpha, Complex beta, unsigned flip_mask, Rng& rng) {
  const PureState noisy = apply_flips(encode(alpha, beta), flip_mask);
  const SyndromeResult syn = extract_syndrome(noisy, rng);
  const PureState fixed = correct(syn.state, syn.syndrome);
  return logical_fidelity(decode(fixed), alpha, beta) < 1.0 - kFailureTolerance;
}

TrialStats monte_carlo(double p, std::int64_t trials, std::uint64_t seed, int workers) {
  check_probability(p);
  if (trials < 1) throw InvalidSpec("trials must be >= 1");
  const std::int64_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<std::int64_t> failures(chunks, 0);
  parallel_for(static_cast<int>(chunks), workers, [&](int c) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(c));
    const std::int64_t begin = c * kTrialsPerChunk;
    const std::int64_t end = std::min(trials, begin + kTrialsPerChunk);
    std::int64_t count = 0;
    for (std::int64_t t = begin; t < end; ++t) {
      // Haar-uniform logical state from two uniforms.
      const double theta = std::acos(1.0 - 2.0 * rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const Complex alpha = std::cos(theta / 2);
      const Complex beta = std::polar(std::sin(theta / 2), phi);
      unsigned mask = 0;
      for (int q = 0; q < 3; ++q) {
        if (rng.uniform() < p) mask |= 1u << q;
      }
      if (run_cycle(alpha, beta, mask, rng)) ++count;
    }
    failures[c] = count;
  });
  TrialStats stats;
  stats.trials = trials;
  stats.physical_p = p;
  for (auto f : failures) stats.logical_failures += f;
  stats.rate = static_cast<double>(stats.logical_failures) / static_cast<double>(trials);
  stats.std_error = std::sqrt(stats.rate * (1.0 - stats.rate) / static_cast<double>(trials));
  return stats;
}

double exhaustive_rate(double p) {
  check_probability(p);
  const Complex alpha = std::sqrt(0.3);
  const Complex beta = std::polar(std::sqrt(0.7), 0.4);
  Rng rng(0);
  int failing[4] = {0, 0, 0, 0};  // failing patterns by weight
  for (unsigned mask = 0; mask < 8; ++mask) {
    if (run_cycle(alpha, beta, mask, rng)) ++failing[std::popcount(mask)];
  }
  const double q = 1.0 - p;
  return failing[0] * (q * q * q) + failing[1] * (p * q * q) + failing[2] * (p * p * q) +
         failing[3] * (p * p * p);
}

double analytic_rate(double p) {
  check_probability(p);
  return 3.0 * p * p * (1.0 - p) + p * p * p;
}

}  // namespace jjq::qec
