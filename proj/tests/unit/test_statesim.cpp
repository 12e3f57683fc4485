#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jjq/error.hpp"
#include "jjq/statesim.hpp"
#include "test_support.hpp"

using namespace jjq;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Column k of the unitary is the image of basis state k; compares against a table
// of (input bits, output bits, phase).
struct Row {
  const char* in;
  const char* out;
  Complex phase;
};
void check_truth_table(const Gate& gate, const std::vector<Row>& rows) {
  REQUIRE(static_cast<int>(rows.size()) == (1 << gate.arity));
  for (const auto& r : rows) {
    const PureState in = PureState::from_bits(r.in);
    std::vector<int> targets(gate.arity);
    for (int q = 0; q < gate.arity; ++q) targets[q] = q;
    const PureState got = apply_gate(in, gate, targets);
    const PureState want = PureState::from_bits(r.out);
    for (int k = 0; k < (1 << gate.arity); ++k) {
      const Complex expected = want.amplitude(k) * r.phase;
      CHECK(std::abs(got.amplitude(k) - expected) == 0.0);
    }
  }
}

PureState random_pure(int n) { return PureState(n, test::random_state(1 << n)); }

}  // namespace

TEST_CASE("basis labels are big-endian") {
  const PureState s = PureState::from_bits("100");
  CHECK(std::abs(s.amplitude(4) - 1.0) == 0.0);
  CHECK(PureState::basis(3, 4).fidelity(s) == 1.0);
  CHECK_THROWS_AS(PureState::from_bits("102"), InvalidSpec);
  CHECK_THROWS_AS(PureState(1, Vector::Ones(2)), InvalidSpec);
  CHECK_THROWS_AS(PureState(2, Vector::Ones(2).normalized()), InvalidSpec);
}

TEST_CASE("CNOT truth table") {
  check_truth_table(gates::cnot(), {{"00", "00", 1}, {"01", "01", 1}, {"10", "11", 1}, {"11", "10", 1}});
}

TEST_CASE("CPHASE truth table") {
  const double phi = 0.73;
  check_truth_table(gates::cphase(phi),
                    {{"00", "00", 1}, {"01", "01", 1}, {"10", "10", 1}, {"11", "11", std::polar(1.0, phi)}});
}

TEST_CASE("iSWAP truth table") {
  check_truth_table(gates::iswap(), {{"00", "00", 1}, {"01", "10", kI}, {"10", "01", kI}, {"11", "11", 1}});
}

TEST_CASE("Toffoli truth table") {
  check_truth_table(gates::toffoli(), {{"000", "000", 1}, {"001", "001", 1}, {"010", "010", 1}, {"011", "011", 1},
                                        {"100", "100", 1}, {"101", "101", 1}, {"110", "111", 1}, {"111", "110", 1}});
}

TEST_CASE("every gate is unitary") {
  const Gate all[] = {gates::identity(), gates::pauli_x(), gates::pauli_y(), gates::pauli_z(),
                      gates::rx(0.3),    gates::ry(1.1),   gates::rz(-2.0),  gates::hadamard(),
                      gates::cnot(),     gates::cphase(2), gates::cz(),      gates::iswap(),
                      gates::toffoli()};
  for (const auto& g : all) {
    CHECK(g.unitarity_error() < 1e-12);
    CHECK(g.unitary.rows() == (1 << g.arity));
  }
}

TEST_CASE("gate identities") {
  CHECK(max_abs_diff(gates::cz().unitary, gates::cphase(kPi).unitary) < 1e-12);
  // CNOT = (I x H) CZ (I x H).
  const Matrix h1 = embed(gates::hadamard(), {1}, 2);
  CHECK(max_abs_diff(h1 * gates::cz().unitary * h1, gates::cnot().unitary) < 1e-12);
  // The Hadamard built from rotations is the usual one.
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  CHECK(max_abs_diff(gates::hadamard().unitary, h / std::sqrt(2.0)) < 1e-12);
  // Rx(pi) = -i X.
  CHECK(max_abs_diff(gates::rx(kPi).unitary, -kI * gates::pauli_x().unitary) < 1e-12);
}

TEST_CASE("apply_gate matches the embedded matrix") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = test::uniform_int(3, 6);
    const PureState psi = random_pure(n);
    int a = test::uniform_int(0, n - 1), b = test::uniform_int(0, n - 1);
    while (b == a) b = test::uniform_int(0, n - 1);
    const Gate g = trial % 2 ? gates::iswap() : gates::cphase(test::uniform(0, 2 * kPi));
    const Vector expected = embed(g, {a, b}, n) * psi.amplitudes();
    CHECK((apply_gate(psi, g, {a, b}).amplitudes() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("target ordering: targets[0] is the control") {
  const PureState in = PureState::from_bits("01");
  CHECK(apply_gate(in, gates::cnot(), {1, 0}).fidelity(PureState::from_bits("11")) == doctest::Approx(1.0));
  CHECK(apply_gate(in, gates::cnot(), {0, 1}).fidelity(in) == doctest::Approx(1.0));
}

TEST_CASE("gate argument validation") {
  const PureState psi = PureState::basis(3, 0);
  CHECK_THROWS_AS(apply_gate(psi, gates::cnot(), {0}), InvalidSpec);
  CHECK_THROWS_AS(apply_gate(psi, gates::cnot(), {1, 1}), InvalidSpec);
  CHECK_THROWS_AS(apply_gate(psi, gates::pauli_x(), {3}), InvalidSpec);
}

TEST_CASE("Toffoli is an involution") {
  for (int trial = 0; trial < 10; ++trial) {
    const PureState psi = random_pure(4);
    const PureState twice = toffoli(toffoli(psi, 0, 2, 3), 0, 2, 3);
    CHECK(twice.fidelity(psi) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("density-matrix gates agree with pure-state gates") {
  const PureState psi = random_pure(3);
  const DensityState rho = apply_gate(DensityState::from_pure(psi), gates::toffoli(), {2, 0, 1});
  const Vector v = apply_gate(psi, gates::toffoli(), {2, 0, 1}).amplitudes();
  CHECK(max_abs_diff(rho.matrix(), v * v.adjoint()) < 1e-12);
}

TEST_CASE("density state validation") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  CHECK_NOTHROW(DensityState(1, m));
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityState(1, m), InvalidSpec);  // not Hermitian
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityState(1, neg), InvalidSpec);  // not PSD
  CHECK_THROWS_AS(DensityState(1, Matrix::Identity(2, 2)), InvalidSpec);  // trace 2
}

TEST_CASE("parity measurement") {
  SUBCASE("definite parity") {
    const auto [even, odd] = parity_probabilities(PureState::from_bits("110"), 0, 1);
    CHECK(even == 1.0);
    CHECK(odd == 0.0);
    CHECK_THROWS_AS(project_parity(PureState::from_bits("110"), 0, 1, -1), DomainError);
  }
  SUBCASE("|+>|0> splits evenly into its two branches") {
    const PureState plus0 = apply_gate(PureState::from_bits("00"), gates::hadamard(), {0});
    const auto [even, odd] = parity_probabilities(plus0, 0, 1);
    CHECK(even == doctest::Approx(0.5));
    CHECK(odd == doctest::Approx(0.5));
    CHECK(project_parity(plus0, 0, 1, 1).fidelity(PureState::from_bits("00")) == doctest::Approx(1.0));
    CHECK(project_parity(plus0, 0, 1, -1).fidelity(PureState::from_bits("10")) == doctest::Approx(1.0));
    Rng rng(7);
    int n_even = 0;
    const int shots = 20000;
    for (int i = 0; i < shots; ++i) n_even += parity_measure(plus0, 0, 1, rng).parity == 1;
    CHECK(std::abs(n_even - shots / 2) < 3.0 * std::sqrt(shots * 0.25));
  }
  SUBCASE("superposition inside a parity subspace survives") {
    Vector v = Vector::Zero(8);
    v(0) = 0.6;   // |000>
    v(7) = 0.8;   // |111>
    const PureState ghz(3, v);
    const auto out = project_parity(ghz, 0, 1, 1);
    CHECK(out.fidelity(ghz) == doctest::Approx(1.0));
  }
  SUBCASE("joint distribution does not depend on the measurement order") {
    for (int trial = 0; trial < 10; ++trial) {
      const PureState psi = random_pure(3);
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
          const auto p_first = [&](int a, int b, int pa, int c, int d, int pc) {
            const double p1 = pa == 1 ? parity_probabilities(psi, a, b).first : parity_probabilities(psi, a, b).second;
            if (p1 < 1e-15) return 0.0;
            const PureState mid = project_parity(psi, a, b, pa);
            const auto p2 = parity_probabilities(mid, c, d);
            return p1 * (pc == 1 ? p2.first : p2.second);
          };
          CHECK(p_first(0, 1, s1, 1, 2, s2) == doctest::Approx(p_first(1, 2, s2, 0, 1, s1)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("Bloch sphere round trip") {
  CHECK(bloch_state(0.0, 0.0).fidelity(PureState::from_bits("0")) == doctest::Approx(1.0));
  CHECK(bloch_state(kPi, 0.0).fidelity(PureState::from_bits("1")) == doctest::Approx(1.0));
  const auto [t0, p0] = bloch_angles(PureState::from_bits("1"));
  CHECK(t0 == doctest::Approx(kPi));
  CHECK(p0 == 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const PureState psi = random_pure(1);
    const auto [theta, phi] = bloch_angles(psi);
    CHECK(theta >= 0.0);
    CHECK(theta <= kPi);
    CHECK(phi >= 0.0);
    CHECK(phi < 2.0 * kPi);
    CHECK(bloch_state(theta, phi).fidelity(psi) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("amplitude damping and dephasing") {
  const DensityState one = DensityState::from_pure(PureState::from_bits("1"));
  const DensityState decayed = amplitude_damping(one, 3.0, 3.0);
  CHECK(decayed.matrix()(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(std::abs(decayed.matrix().trace() - 1.0) < 1e-12);

  const DensityState plus = DensityState::from_pure(bloch_state(kPi / 2, 0.0));
  const DensityState dephased = pure_dephasing(plus, 2.0, 1.0);
  CHECK(std::abs(dephased.matrix()(0, 1)) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(dephased.matrix()(0, 0).real() == doctest::Approx(0.5));

  const double inf = std::numeric_limits<double>::infinity();
  CHECK(max_abs_diff(amplitude_damping(plus, inf, 1.0).matrix(), plus.matrix()) < 1e-15);
  CHECK(max_abs_diff(pure_dephasing(plus, inf, 1.0).matrix(), plus.matrix()) < 1e-15);
  CHECK_THROWS_AS(amplitude_damping_channel(-1.0, 1.0), InvalidSpec);
}

TEST_CASE("channels are CPTP") {
  for (int trial = 0; trial < 50; ++trial) {
    const double t = test::uniform(0.1, 100.0);
    const double dt = test::uniform(1e-3, 10.0);
    for (const Channel& c : {amplitude_damping_channel(t, dt), dephasing_channel(t, dt)}) {
      const auto r = check_cptp(c);
      CHECK(r.min_eigenvalue > -1e-12);
      CHECK(r.trace_error < 1e-12);
    }
  }
}

TEST_CASE("channels act on one qubit of a register") {
  const PureState psi = random_pure(3);
  const DensityState rho = DensityState::from_pure(psi);
  const DensityState out = amplitude_damping(rho, 1.0, 0.4, 1);
  CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-12);
  CHECK(out.min_eigenvalue() > -1e-12);
  // Population of qubit 1 in |1> decays by exp(-dt/T1).
  const auto excited = [](const DensityState& r) {
    double p = 0.0;
    for (int k = 0; k < 8; ++k) {
      if (k & 0b010) p += r.matrix()(k, k).real();
    }
    return p;
  };
  CHECK(excited(out) == doctest::Approx(excited(rho) * std::exp(-0.4)).epsilon(1e-12));
}

TEST_CASE("combined decay follows T2") {
  const NoiseParams noise{.t1 = 10.0, .tphi = 20.0};
  CHECK(noise.t2() == doctest::Approx(10.0));
  const auto curve = simulate_decay(noise, 30.0, 60);
  REQUIRE(curve.time.size() == 61);
  for (size_t i = 0; i < curve.time.size(); ++i) {
    const double t = curve.time[i];
    CHECK(curve.population[i] == doctest::Approx(std::exp(-t / noise.t1)).epsilon(1e-10));
    CHECK(curve.coherence[i] == doctest::Approx(0.5 * std::exp(-t / noise.t2())).epsilon(1e-10));
  }
  const auto fit = fit_decay(curve, noise);
  CHECK(fit.t1 == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(fit.relative_error() < 1e-9);
  CHECK_THROWS_AS(NoiseParams({.t1 = 0.0}).validate(), InvalidSpec);
}

TEST_CASE("random streams are deterministic and distinct") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(Rng::stream(42, 0).next() != Rng::stream(42, 1).next());
  CHECK(Rng::stream(42, 3).next() == Rng::stream(42, 3).next());
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}
