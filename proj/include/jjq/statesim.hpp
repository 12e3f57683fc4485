#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jjq/operator.hpp"

// Computational-basis simulator. Qubit 0 is the leftmost ket label, i.e. the
// most significant bit of the basis index: |q0 q1 ... q_{n-1}>.
namespace jjq {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxPureQubits = 10;
inline constexpr int kMaxDensityQubits = 6;

// Deterministic generator. uniform() = (next() >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream number `index` derived from `seed` by splitmix64.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

class PureState {
 public:
  // Throws InvalidSpec unless the norm is 1 within 1e-12.
  PureState(int nqubits, Vector amplitudes);

  static PureState basis(int nqubits, int index);
  // "110" -> |110>.
  static PureState from_bits(const std::string& bits);

  int nqubits() const { return n_; }
  const Vector& amplitudes() const { return amps_; }
  Complex amplitude(int index) const { return amps_(index); }

  // |<this|other>|^2.
  double fidelity(const PureState& other) const;

 private:
  int n_;
  Vector amps_;
};

class DensityState {
 public:
  // Throws InvalidSpec unless Hermitian, trace 1 and PSD within tolerance.
  DensityState(int nqubits, Matrix rho);
  static DensityState from_pure(const PureState& psi);

  int nqubits() const { return n_; }
  const Matrix& matrix() const { return rho_; }
  double min_eigenvalue() const;

 private:
  int n_;
  Matrix rho_;
};

struct Gate {
  std::string name;
  Matrix unitary;
  int arity = 1;

  double unitarity_error() const;  // max |U^dagger U - I|
};

namespace gates {
Gate identity();
Gate pauli_x();
Gate pauli_y();
Gate pauli_z();
Gate rx(double theta);
Gate ry(double theta);
Gate rz(double theta);
// i Ry(pi/2) Rz(pi), i.e. built from Bloch-sphere rotations.
Gate hadamard();
Gate cnot();
Gate cphase(double phi);
Gate cz();
Gate iswap();
Gate toffoli();
}  // namespace gates

// Embeds a k-qubit gate acting on `targets` (targets[0] is the gate's most
// significant qubit) into the 2^n-dimensional space.
Matrix embed(const Gate& gate, const std::vector<int>& targets, int nqubits);

PureState apply_gate(const PureState& state, const Gate& gate, const std::vector<int>& targets);
DensityState apply_gate(const DensityState& rho, const Gate& gate, const std::vector<int>& targets);
PureState toffoli(const PureState& state, int c1, int c2, int target);

// Probability of the +1 (even) and -1 (odd) Z_a Z_b outcome.
std::pair<double, double> parity_probabilities(const PureState& state, int a, int b);

// Projects onto the parity subspace and renormalizes. Throws DomainError when
// the branch has zero weight.
PureState project_parity(const PureState& state, int a, int b, int parity);

struct ParityOutcome {
  int parity = 1;
  double probability = 1.0;
  PureState state;
};

// Born-rule sample of the Z_a Z_b parity; one uniform draw per call.
ParityOutcome parity_measure(const PureState& state, int a, int b, Rng& rng);

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
PureState bloch_state(double theta, double phi);
// (theta, phi) with theta in [0, pi], phi in [0, 2 pi); phi = 0 at the poles.
std::pair<double, double> bloch_angles(const PureState& state);

struct Channel {
  std::string name;
  std::vector<Eigen::Matrix2cd> kraus;
};

// gamma = 1 - exp(-dt/T1). T1 = +inf gives the identity channel.
Channel amplitude_damping_channel(double t1, double dt);
// {sqrt(1-p) I, sqrt(p) Z} with p = (1 - exp(-dt/Tphi))/2, so coherences scale
// by exp(-dt/Tphi).
Channel dephasing_channel(double tphi, double dt);

DensityState apply_channel(const DensityState& rho, const Channel& channel, int qubit);
DensityState amplitude_damping(const DensityState& rho, double t1, double dt, int qubit = 0);
DensityState pure_dephasing(const DensityState& rho, double tphi, double dt, int qubit = 0);

// sum_ij |i><j| (x) E(|i><j|), 4x4.
Eigen::Matrix4cd choi_matrix(const Channel& channel);
// Min eigenvalue of the Choi matrix and max deviation of its partial trace from I.
struct CptpReport {
  double min_eigenvalue = 0.0;
  double trace_error = 0.0;
};
CptpReport check_cptp(const Channel& channel);

struct NoiseParams {
  double t1 = 1.0;    // us
  double tphi = 1.0;  // us

  void validate() const;
  // 1/T2 = 1/(2 T1) + 1/Tphi.
  double t2() const;
};

struct DecayCurve {
  std::vector<double> time;        // us
  std::vector<double> population;  // <1|rho|1>, starting from |1>
  std::vector<double> coherence;   // |rho_01|, starting from |+>
};

// Repeated application of both channels with step dt = t_end / steps.
DecayCurve simulate_decay(const NoiseParams& noise, double t_end, int steps);

struct DecayFit {
  double t1 = 0.0;           // from log-linear fit of the population
  double t2 = 0.0;           // from log-linear fit of 2|rho_01|
  double t2_expected = 0.0;  // NoiseParams::t2()
  double relative_error() const;
};

DecayFit fit_decay(const DecayCurve& curve, const NoiseParams& noise);

}  // namespace jjq
