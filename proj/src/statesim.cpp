#include "jjq/statesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "jjq/error.hpp"

namespace jjq {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

int bit_of(int index, int qubit, int n) { return (index >> (n - 1 - qubit)) & 1; }

void check_targets(const std::vector<int>& targets, int arity, int n) {
  if (static_cast<int>(targets.size()) != arity) {
    throw InvalidSpec("gate acts on " + std::to_string(arity) + " qubits but " +
                      std::to_string(targets.size()) + " targets were given");
  }
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n) {
      throw InvalidSpec("qubit index " + std::to_string(targets[i]) + " out of range for " +
                        std::to_string(n) + " qubits");
    }
    for (size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw InvalidSpec("gate targets must be distinct");
    }
  }
}

Gate make(std::string name, Matrix u) {
  Gate g;
  g.name = std::move(name);
  g.arity = 0;
  for (auto d = u.rows(); d > 1; d /= 2) ++g.arity;
  g.unitary = std::move(u);
  return g;
}

Matrix diag(std::initializer_list<Complex> values) {
  Vector v(static_cast<int>(values.size()));
  int i = 0;
  for (Complex c : values) v(i++) = c;
  return v.asDiagonal();
}

Eigen::Matrix2cd m2(Complex a, Complex b, Complex c, Complex d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ index));
}

PureState::PureState(int nqubits, Vector amplitudes) : n_(nqubits), amps_(std::move(amplitudes)) {
  if (n_ < 1 || n_ > kMaxPureQubits) {
    throw InvalidSpec("pure state supports 1.." + std::to_string(kMaxPureQubits) + " qubits");
  }
  if (amps_.size() != (1 << n_)) throw InvalidSpec("amplitude vector must have length 2^n");
  if (std::abs(amps_.norm() - 1.0) > 1e-12) {
    throw InvalidSpec("state is not normalized: norm = " + std::to_string(amps_.norm()));
  }
}

PureState PureState::basis(int nqubits, int index) {
  if (nqubits < 1 || nqubits > kMaxPureQubits || index < 0 || index >= (1 << nqubits)) {
    throw InvalidSpec("basis state index out of range");
  }
  Vector v = Vector::Zero(1 << nqubits);
  v(index) = 1.0;
  return PureState(nqubits, std::move(v));
}

PureState PureState::from_bits(const std::string& bits) {
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidSpec("basis label must contain only 0 and 1");
    index = 2 * index + (c - '0');
  }
  return basis(static_cast<int>(bits.size()), index);
}

double PureState::fidelity(const PureState& other) const {
  if (other.n_ != n_) throw InvalidSpec("fidelity of states with different qubit counts");
  return std::norm(amps_.dot(other.amps_));
}

DensityState::DensityState(int nqubits, Matrix rho) : n_(nqubits), rho_(std::move(rho)) {
  if (n_ < 1 || n_ > kMaxDensityQubits) {
    throw InvalidSpec("density state supports 1.." + std::to_string(kMaxDensityQubits) + " qubits");
  }
  if (rho_.rows() != (1 << n_) || rho_.cols() != (1 << n_)) {
    throw InvalidSpec("density matrix must be 2^n x 2^n");
  }
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidSpec("density matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > 1e-12) throw InvalidSpec("density matrix trace is not 1");
  if (min_eigenvalue() < -1e-10) throw InvalidSpec("density matrix is not positive semidefinite");
}

DensityState DensityState::from_pure(const PureState& psi) {
  return DensityState(psi.nqubits(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double Gate::unitarity_error() const {
  const Matrix id = Matrix::Identity(unitary.rows(), unitary.cols());
  return (unitary.adjoint() * unitary - id).cwiseAbs().maxCoeff();
}

namespace gates {

Gate identity() { return make("I", Matrix::Identity(2, 2)); }
Gate pauli_x() { return make("X", m2(0, 1, 1, 0)); }
Gate pauli_y() { return make("Y", m2(0, -kI, kI, 0)); }
Gate pauli_z() { return make("Z", m2(1, 0, 0, -1)); }

Gate rx(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return make("RX", m2(c, -kI * s, -kI * s, c));
}

Gate ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return make("RY", m2(c, -s, s, c));
}

Gate rz(double theta) {
  return make("RZ", m2(std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2)));
}

Gate hadamard() {
  Gate h = make("H", kI * ry(kPi / 2).unitary * rz(kPi).unitary);
  return h;
}

Gate cnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(1, 1) = 1.0;
  u(3, 2) = u(2, 3) = 1.0;
  return make("CNOT", u);
}

Gate cphase(double phi) { return make("CPHASE", diag({1, 1, 1, std::polar(1.0, phi)})); }

Gate cz() { return make("CZ", diag({1, 1, 1, -1})); }

Gate iswap() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(3, 3) = 1.0;
  u(2, 1) = u(1, 2) = kI;
  return make("ISWAP", u);
}

Gate toffoli() {
  Matrix u = Matrix::Identity(8, 8);
  u(6, 6) = u(7, 7) = 0.0;
  u(7, 6) = u(6, 7) = 1.0;
  return make("TOFFOLI", u);
}

}  // namespace gates

Matrix embed(const Gate& gate, const std::vector<int>& targets, int nqubits) {
  check_targets(targets, gate.arity, nqubits);
  const int dim = 1 << nqubits;
  const int k = gate.arity;
  Matrix full = Matrix::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    int local_col = 0;
    for (int t = 0; t < k; ++t) local_col = 2 * local_col + bit_of(col, targets[t], nqubits);
    for (int local_row = 0; local_row < (1 << k); ++local_row) {
      const Complex u = gate.unitary(local_row, local_col);
      if (u == 0.0) continue;
      int row = col;
      for (int t = 0; t < k; ++t) {
        const int shift = nqubits - 1 - targets[t];
        const int bit = (local_row >> (k - 1 - t)) & 1;
        row = (row & ~(1 << shift)) | (bit << shift);
      }
      full(row, col) += u;
    }
  }
  return full;
}

PureState apply_gate(const PureState& state, const Gate& gate, const std::vector<int>& targets) {
  const int n = state.nqubits();
  check_targets(targets, gate.arity, n);
  const int k = gate.arity;
  const int dim = 1 << n;
  int mask = 0;
  std::vector<int> shifts(k);
  for (int t = 0; t < k; ++t) {
    shifts[t] = n - 1 - targets[t];
    mask |= 1 << shifts[t];
  }
  const Vector& in = state.amplitudes();
  Vector out = Vector::Zero(dim);
  std::vector<int> index(1 << k);
  Vector local(1 << k);
  for (int base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (int l = 0; l < (1 << k); ++l) {
      int i = base;
      for (int t = 0; t < k; ++t) i |= ((l >> (k - 1 - t)) & 1) << shifts[t];
      index[l] = i;
      local(l) = in(i);
    }
    const Vector mapped = gate.unitary * local;
    for (int l = 0; l < (1 << k); ++l) out(index[l]) = mapped(l);
  }
  // Unitary maps preserve the norm up to rounding; renormalize the residue.
  out /= out.norm();
  return PureState(n, std::move(out));
}

DensityState apply_gate(const DensityState& rho, const Gate& gate, const std::vector<int>& targets) {
  const Matrix u = embed(gate, targets, rho.nqubits());
  Matrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + Matrix(out.adjoint()));
  return DensityState(rho.nqubits(), std::move(out));
}

PureState toffoli(const PureState& state, int c1, int c2, int target) {
  return apply_gate(state, gates::toffoli(), {c1, c2, target});
}

std::pair<double, double> parity_probabilities(const PureState& state, int a, int b) {
  const int n = state.nqubits();
  check_targets({a, b}, 2, n);
  double even = 0.0;
  double odd = 0.0;
  for (int i = 0; i < (1 << n); ++i) {
    const double w = std::norm(state.amplitude(i));
    (bit_of(i, a, n) == bit_of(i, b, n) ? even : odd) += w;
  }
  return {even, odd};
}

PureState project_parity(const PureState& state, int a, int b, int parity) {
  if (parity != 1 && parity != -1) throw InvalidSpec("parity must be +1 or -1");
  const int n = state.nqubits();
  check_targets({a, b}, 2, n);
  Vector v = state.amplitudes();
  for (int i = 0; i < (1 << n); ++i) {
    const bool even = bit_of(i, a, n) == bit_of(i, b, n);
    if (even != (parity == 1)) v(i) = 0.0;
  }
  const double norm = v.norm();
  if (norm == 0.0) throw DomainError("parity branch has zero probability");
  return PureState(n, v / norm);
}

ParityOutcome parity_measure(const PureState& state, int a, int b, Rng& rng) {
  const auto [even, odd] = parity_probabilities(state, a, b);
  const double r = rng.uniform() * (even + odd);
  const int parity = (odd == 0.0 || r < even) ? 1 : -1;
  return {parity, (parity == 1 ? even : odd) / (even + odd), project_parity(state, a, b, parity)};
}

PureState bloch_state(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2);
  v(1) = std::polar(std::sin(theta / 2), phi);
  v /= v.norm();
  return PureState(1, std::move(v));
}

std::pair<double, double> bloch_angles(const PureState& state) {
  if (state.nqubits() != 1) throw InvalidSpec("Bloch angles need a single-qubit state");
  const Complex a = state.amplitude(0);
  const Complex b = state.amplitude(1);
  const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  if (std::abs(a) < 1e-15 || std::abs(b) < 1e-15) return {theta, 0.0};
  double phi = std::arg(b) - std::arg(a);
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {theta, phi};
}

Channel amplitude_damping_channel(double t1, double dt) {
  if (!(t1 > 0.0) || !(dt > 0.0)) throw InvalidSpec("amplitude damping needs T1 > 0 and dt > 0");
  const double gamma = std::isinf(t1) ? 0.0 : -std::expm1(-dt / t1);
  return {"amplitude_damping",
          {m2(1, 0, 0, std::sqrt(1.0 - gamma)), m2(0, std::sqrt(gamma), 0, 0)}};
}

Channel dephasing_channel(double tphi, double dt) {
  if (!(tphi > 0.0) || !(dt > 0.0)) throw InvalidSpec("dephasing needs Tphi > 0 and dt > 0");
  const double p = std::isinf(tphi) ? 0.0 : -0.5 * std::expm1(-dt / tphi);
  return {"dephasing", {std::sqrt(1.0 - p) * Eigen::Matrix2cd::Identity(), m2(std::sqrt(p), 0, 0,
                                                                                 -std::sqrt(p))}};
}

DensityState apply_channel(const DensityState& rho, const Channel& channel, int qubit) {
  const int n = rho.nqubits();
  const int dim = 1 << n;
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& k : channel.kraus) {
    Gate g;
    g.name = channel.name;
    g.unitary = k;
    g.arity = 1;
    const Matrix e = embed(g, {qubit}, n);
    out += e * rho.matrix() * e.adjoint();
  }
  out = 0.5 * (out + Matrix(out.adjoint()));
  return DensityState(n, std::move(out));
}

DensityState amplitude_damping(const DensityState& rho, double t1, double dt, int qubit) {
  return apply_channel(rho, amplitude_damping_channel(t1, dt), qubit);
}

DensityState pure_dephasing(const DensityState& rho, double tphi, double dt, int qubit) {
  return apply_channel(rho, dephasing_channel(tphi, dt), qubit);
}

Eigen::Matrix4cd choi_matrix(const Channel& channel) {
  Eigen::Matrix4cd choi = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
      unit(i, j) = 1.0;
      Eigen::Matrix2cd image = Eigen::Matrix2cd::Zero();
      for (const auto& k : channel.kraus) image += k * unit * k.adjoint();
      choi.block<2, 2>(2 * i, 2 * j) = image;
    }
  }
  return choi;
}

CptpReport check_cptp(const Channel& channel) {
  const Eigen::Matrix4cd choi = choi_matrix(channel);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(choi, Eigen::EigenvaluesOnly);
  CptpReport r;
  r.min_eigenvalue = es.eigenvalues()(0);
  // Tracing out the output factor must give the identity on the input.
  Eigen::Matrix2cd reduced;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) reduced(i, j) = choi.block<2, 2>(2 * i, 2 * j).trace();
  }
  r.trace_error = (reduced - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  return r;
}

void NoiseParams::validate() const {
  if (!(t1 > 0.0) || !(tphi > 0.0)) throw InvalidSpec("noise: T1 and Tphi must be > 0");
}

double NoiseParams::t2() const { return 1.0 / (0.5 / t1 + 1.0 / tphi); }

DecayCurve simulate_decay(const NoiseParams& noise, double t_end, int steps) {
  noise.validate();
  if (!(t_end > 0.0) || steps < 2) throw InvalidSpec("decay: need t_end > 0 and steps >= 2");
  const double dt = t_end / steps;
  const Channel damp = amplitude_damping_channel(noise.t1, dt);
  const Channel deph = dephasing_channel(noise.tphi, dt);
  DensityState excited = DensityState::from_pure(PureState::basis(1, 1));
  DensityState plus = DensityState::from_pure(bloch_state(kPi / 2, 0.0));
  DecayCurve curve;
  for (int s = 0; s <= steps; ++s) {
    if (s > 0) {
      excited = apply_channel(apply_channel(excited, damp, 0), deph, 0);
      plus = apply_channel(apply_channel(plus, damp, 0), deph, 0);
    }
    curve.time.push_back(s * dt);
    curve.population.push_back(excited.matrix()(1, 1).real());
    curve.coherence.push_back(std::abs(plus.matrix()(0, 1)));
  }
  return curve;
}

double DecayFit::relative_error() const { return std::abs(t2 - t2_expected) / t2_expected; }

DecayFit fit_decay(const DecayCurve& curve, const NoiseParams& noise) {
  // Least squares of log(y) = -t / T through the origin, skipping underflowed points.
  const auto fit_rate = [&](const std::vector<double>& y, double scale) {
    double stt = 0.0;
    double sty = 0.0;
    for (size_t i = 0; i < curve.time.size(); ++i) {
      const double v = scale * y[i];
      if (!(v > 1e-12)) continue;
      stt += curve.time[i] * curve.time[i];
      sty += curve.time[i] * std::log(v);
    }
    if (stt == 0.0) throw DomainError("decay fit: no usable samples");
    const double rate = -sty / stt;
    return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
  };
  DecayFit fit;
  fit.t1 = fit_rate(curve.population, 1.0);
  fit.t2 = fit_rate(curve.coherence, 2.0);
  fit.t2_expected = noise.t2();
  return fit;
}

}  // namespace jjq
