#pragma once

#include <cstdint>
#include <optional>

#include "jjq/statesim.hpp"

// Three-qubit bit-flip code. Qubit 0 carries the data; qubits 1 and 2 start in |0>.
namespace jjq::qec {

struct Syndrome {
  int s12 = 1;  // Z0 Z1 parity
  int s23 = 1;  // Z1 Z2 parity

  bool operator==(const Syndrome&) const = default;
};

// Two CNOTs from qubit 0 onto qubits 1 and 2: alpha|000> + beta|111>.
// Throws InvalidSpec unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
PureState encode(Complex alpha, Complex beta);

// X on every qubit q whose bit (1 << q) is set in mask.
PureState apply_flips(const PureState& state, unsigned mask);

struct SyndromeResult {
  Syndrome syndrome;
  PureState state;
};

// Parity of (0,1) then (1,2).
SyndromeResult extract_syndrome(const PureState& state, Rng& rng);

// Qubit flipped by the correction table: (+,+) none, (-,+) 0, (-,-) 1, (+,-) 2.
std::optional<int> correction_qubit(const Syndrome& syndrome);
PureState correct(const PureState& state, const Syndrome& syndrome);

// Inverse of encode: CNOT(0->2) then CNOT(0->1).
PureState decode(const PureState& state);

// <psi| rho_0 |psi> where rho_0 is the reduced state of qubit 0 and psi the logical input.
double logical_fidelity(const PureState& decoded, Complex alpha, Complex beta);

inline constexpr double kFailureTolerance = 1e-9;

// Full cycle: encode, flip, syndrome, correct, decode. True on logical failure.
bool run_cycle(Complex alpha, Complex beta, unsigned flip_mask, Rng& rng);

struct TrialStats {
  std::int64_t trials = 0;
  double physical_p = 0.0;
  std::int64_t logical_failures = 0;
  double rate = 0.0;       // failures / trials
  double std_error = 0.0;  // sqrt(rate (1 - rate) / trials)
};

inline constexpr std::int64_t kTrialsPerChunk = 65536;

// Trials are grouped in chunks of kTrialsPerChunk; chunk c draws from
// Rng::stream(seed, c), so counts do not depend on the worker count.
TrialStats monte_carlo(double p, std::int64_t trials, std::uint64_t seed, int workers = 0);

// Sum over the 8 flip patterns of P(pattern) * [cycle fails], each pattern
// simulated on a fixed non-trivial logical state.
double exhaustive_rate(double p);

// 3 p^2 (1 - p) + p^3.
double analytic_rate(double p);

}  // namespace jjq::qec
