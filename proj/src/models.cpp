#include "jjq/models.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "jjq/error.hpp"

namespace jjq {

namespace {

constexpr double kPi = std::numbers::pi;

using Triplet = Eigen::Triplet<Complex>;

SparseMatrix from_triplets(int dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

bool finite(double x) { return std::isfinite(x); }

std::string flux_description(const FluxQubitSpec& spec) {
  return "Np=" + std::to_string(spec.np) + " Nm=" + std::to_string(spec.nm) +
         (spec.sector == FluxSector::kPhysical ? " sector=physical" : " sector=torus");
}

// Grid bookkeeping for the finite-difference flux basis. In the physical sector
// each basis vector is (|i,j> + |i+Np/2, j+Nm/2>)/sqrt2, labelled by the
// representative with i < Np/2.
struct FluxGrid {
  int np;
  int nm;
  bool physical;

  int rows() const { return physical ? np / 2 : np; }
  int dim() const { return rows() * nm; }

  int index(int i, int j) const {
    i = ((i % np) + np) % np;
    j = ((j % nm) + nm) % nm;
    if (physical && i >= np / 2) {
      i -= np / 2;
      j = (j + nm / 2) % nm;
    }
    return i * nm + j;
  }
};

// Plane-wave labels (kp, km) kept in the basis.
struct FluxPlaneWaves {
  std::vector<std::pair<int, int>> momenta;
  std::vector<int> lookup;  // (kp + Kp) * (2Km + 1) + (km + Km) -> index or -1
  int kp_max;
  int km_max;

  FluxPlaneWaves(int np, int nm, bool physical) : kp_max(np / 2), km_max(nm / 2) {
    lookup.assign((2 * kp_max + 1) * (2 * km_max + 1), -1);
    for (int kp = -kp_max; kp <= kp_max; ++kp) {
      for (int km = -km_max; km <= km_max; ++km) {
        if (physical && ((kp + km) % 2 != 0)) continue;
        lookup[slot(kp, km)] = static_cast<int>(momenta.size());
        momenta.emplace_back(kp, km);
      }
    }
  }

  int slot(int kp, int km) const { return (kp + kp_max) * (2 * km_max + 1) + (km + km_max); }

  int find(int kp, int km) const {
    if (std::abs(kp) > kp_max || std::abs(km) > km_max) return -1;
    return lookup[slot(kp, km)];
  }

  int dim() const { return static_cast<int>(momenta.size()); }
};

}  // namespace

void ChargeQubitSpec::validate() const {
  if (!(ec > 0.0) || !finite(ec)) throw InvalidSpec("charge qubit: EC must be > 0");
  if (!(ej >= 0.0) || !finite(ej)) throw InvalidSpec("charge qubit: EJ must be >= 0");
  if (!finite(ng)) throw InvalidSpec("charge qubit: ng must be finite");
  if (ncut < 1) throw InvalidSpec("charge qubit: ncut must be >= 1");
}

void SquidSpec::validate() const {
  if (!(ej1 >= 0.0) || !(ej2 >= 0.0) || !finite(ej1) || !finite(ej2)) {
    throw InvalidSpec("squid: EJ1 and EJ2 must be >= 0");
  }
  if (!finite(flux)) throw InvalidSpec("squid: flux must be finite");
}

void FluxQubitSpec::validate() const {
  if (!(ej > 0.0) || !finite(ej)) throw InvalidSpec("flux qubit: EJ must be > 0");
  if (!(alpha > 0.0) || !finite(alpha)) throw InvalidSpec("flux qubit: alpha must be > 0");
  if (!(ec > 0.0) || !finite(ec)) throw InvalidSpec("flux qubit: EC must be > 0");
  if (!finite(flux)) throw InvalidSpec("flux qubit: f must be finite");
  if (np < 16 || nm < 16 || np % 2 != 0 || nm % 2 != 0) {
    throw InvalidSpec("flux qubit: grid sizes must be even and >= 16");
  }
}

void PhaseQubitSpec::validate() const {
  if (!(ej > 0.0) || !finite(ej)) throw InvalidSpec("phase qubit: EJ must be > 0");
  if (!(ec > 0.0) || !finite(ec)) throw InvalidSpec("phase qubit: EC must be > 0");
  if (!finite(bias) || bias < 0.0) throw InvalidSpec("phase qubit: bias must be >= 0");
  if (bias >= 1.0) throw DomainError("phase qubit: bias at or above critical current (b >= 1), no metastable well");
  const PhaseWindow w = resolved_window();
  if (!(w.lo < w.hi) || !finite(w.lo) || !finite(w.hi)) {
    throw InvalidSpec("phase qubit: window must satisfy phi_min < phi_max");
  }
  if (npts < 64) throw InvalidSpec("phase qubit: npts must be >= 64");
  // Minima of -cos(phi) - b phi sit at asin(b) + 2 pi k.
  const double phi0 = std::asin(bias);
  const double k = std::ceil((w.lo - phi0) / (2.0 * kPi));
  if (!(phi0 + 2.0 * kPi * k < w.hi)) {
    throw DomainError("phase qubit: window contains no local minimum of the washboard");
  }
}

PhaseWindow PhaseQubitSpec::resolved_window() const {
  if (window.lo == 0.0 && window.hi == 0.0) return default_phase_window(bias);
  return window;
}

PhaseWindow default_phase_window(double bias) {
  if (!(bias < 1.0)) {
    throw DomainError("phase qubit: bias at or above critical current (b >= 1), no metastable well");
  }
  const double phi0 = std::asin(bias);
  return {phi0 - 2.0, kPi - phi0};
}

SquidEnergy effective_josephson_energy(const SquidSpec& squid) {
  squid.validate();
  // Reduce f into [-1/2, 1/2]; the magnitude is even and 1-periodic in f.
  const double turns = std::round(squid.flux);
  const double r = std::abs(squid.flux - turns);
  const double c = std::cos(kPi * r);
  const double s = std::sin(kPi * r);
  const double sum = squid.ej1 + squid.ej2;
  const double diff = squid.ej2 - squid.ej1;
  SquidEnergy out;
  // Regular form of (EJ1+EJ2) cos(pi f) sqrt(1 + d^2 tan^2(pi f)); no tan singularity.
  out.magnitude = std::sqrt(sum * sum * c * c + diff * diff * s * s);
  out.sign = (static_cast<long long>(turns) % 2 == 0) ? 1 : -1;
  return out;
}

HermitianOperator build_cpb(const ChargeQubitSpec& spec) {
  spec.validate();
  const int dim = spec.dim();
  std::vector<Triplet> t;
  t.reserve(3 * dim);
  for (int k = 0; k < dim; ++k) {
    const double n = k - spec.ncut;
    t.emplace_back(k, k, 4.0 * spec.ec * (n - spec.ng) * (n - spec.ng));
    if (k + 1 < dim && spec.ej != 0.0) {
      t.emplace_back(k + 1, k, -0.5 * spec.ej);
      t.emplace_back(k, k + 1, -0.5 * spec.ej);
    }
  }
  return HermitianOperator(from_triplets(dim, t),
                           {BasisKind::kCharge, {dim}, "ncut=" + std::to_string(spec.ncut)});
}

std::optional<std::string> cpb_cutoff_warning(const ChargeQubitSpec& spec) {
  const double needed = 4.0 * std::sqrt(spec.ej / spec.ec) + 10.0;
  if (spec.ncut < needed) {
    return "charge cutoff ncut=" + std::to_string(spec.ncut) + " is below the suggested " +
           std::to_string(static_cast<int>(std::ceil(needed))) + " for EJ/EC=" +
           std::to_string(spec.ej / spec.ec);
  }
  return std::nullopt;
}

HermitianOperator charge_number_operator(int ncut, double ng) {
  if (ncut < 1) throw InvalidSpec("charge qubit: ncut must be >= 1");
  const int dim = 2 * ncut + 1;
  std::vector<Triplet> t;
  for (int k = 0; k < dim; ++k) {
    const double v = (k - ncut) - ng;
    if (v != 0.0) t.emplace_back(k, k, v);
  }
  return HermitianOperator(from_triplets(dim, t),
                           {BasisKind::kCharge, {dim}, "ncut=" + std::to_string(ncut)});
}

double flux_potential(const FluxQubitSpec& spec, double phi_p, double phi_m) {
  return 2.0 * spec.ej * (1.0 - std::cos(phi_p) * std::cos(phi_m)) +
         spec.alpha * spec.ej * (1.0 - std::cos(2.0 * kPi * spec.flux + 2.0 * phi_m));
}

HermitianOperator build_flux3jj(const FluxQubitSpec& spec) {
  spec.validate();
  const bool physical = spec.sector == FluxSector::kPhysical;
  const double kin_p = 2.0 * spec.ec;
  const double kin_m = 2.0 * spec.ec / (1.0 + 2.0 * spec.alpha);
  std::vector<Triplet> t;

  if (spec.discretization == FluxDiscretization::kFourier) {
    const FluxPlaneWaves waves(spec.np, spec.nm, physical);
    const Complex twist = std::polar(1.0, 2.0 * kPi * spec.flux);
    const double offset = 2.0 * spec.ej + spec.alpha * spec.ej;
    t.reserve(7 * waves.dim());
    for (int a = 0; a < waves.dim(); ++a) {
      const auto [kp, km] = waves.momenta[a];
      t.emplace_back(a, a, kin_p * kp * kp + kin_m * km * km + offset);
      // -2EJ cos(phi_p) cos(phi_m) = -EJ/2 sum over exp(+-i phi_p +- i phi_m)
      for (int dp : {-1, 1}) {
        for (int dm : {-1, 1}) {
          const int b = waves.find(kp + dp, km + dm);
          if (b >= 0) t.emplace_back(b, a, -0.5 * spec.ej);
        }
      }
      // -alpha EJ cos(2 pi f + 2 phi_m): <km+2|.|km> = -alpha EJ/2 e^{i 2 pi f}
      if (const int b = waves.find(kp, km + 2); b >= 0) {
        t.emplace_back(b, a, -0.5 * spec.alpha * spec.ej * twist);
      }
      if (const int b = waves.find(kp, km - 2); b >= 0) {
        t.emplace_back(b, a, -0.5 * spec.alpha * spec.ej * std::conj(twist));
      }
    }
    return HermitianOperator(from_triplets(waves.dim(), t),
                             {BasisKind::kFluxPlaneWave, {waves.dim()}, flux_description(spec)});
  }

  const FluxGrid grid{spec.np, spec.nm, physical};
  const double hp = 2.0 * kPi / spec.np;
  const double hm = 2.0 * kPi / spec.nm;
  const double cp = kin_p / (hp * hp);
  const double cm = kin_m / (hm * hm);
  t.reserve(5 * grid.dim());
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < spec.nm; ++j) {
      const int a = grid.index(i, j);
      const double phi_p = -kPi + i * hp;
      const double phi_m = -kPi + j * hm;
      t.emplace_back(a, a, 2.0 * cp + 2.0 * cm + flux_potential(spec, phi_p, phi_m));
      // Neighbours folded onto their representatives; duplicates are summed.
      t.emplace_back(grid.index(i + 1, j), a, -cp);
      t.emplace_back(grid.index(i - 1, j), a, -cp);
      t.emplace_back(grid.index(i, j + 1), a, -cm);
      t.emplace_back(grid.index(i, j - 1), a, -cm);
    }
  }
  return HermitianOperator(from_triplets(grid.dim(), t),
                           {BasisKind::kFluxGrid, {grid.dim()}, flux_description(spec)});
}

HermitianOperator flux_parity_operator(const FluxQubitSpec& spec) {
  spec.validate();
  const bool physical = spec.sector == FluxSector::kPhysical;
  std::vector<Triplet> t;
  if (spec.discretization == FluxDiscretization::kFourier) {
    const FluxPlaneWaves waves(spec.np, spec.nm, physical);
    for (int a = 0; a < waves.dim(); ++a) {
      const auto [kp, km] = waves.momenta[a];
      t.emplace_back(waves.find(-kp, -km), a, 1.0);
    }
    return HermitianOperator(from_triplets(waves.dim(), t),
                             {BasisKind::kFluxPlaneWave, {waves.dim()}, flux_description(spec)});
  }
  const FluxGrid grid{spec.np, spec.nm, physical};
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < spec.nm; ++j) {
      t.emplace_back(grid.index(-i, -j), grid.index(i, j), 1.0);
    }
  }
  return HermitianOperator(from_triplets(grid.dim(), t),
                           {BasisKind::kFluxGrid, {grid.dim()}, flux_description(spec)});
}

std::pair<double, double> flux_grid_point(const FluxQubitSpec& spec, int index) {
  if (spec.discretization != FluxDiscretization::kFiniteDifference) {
    throw BasisMismatch("flux basis is plane-wave; no grid coordinates");
  }
  const int i = index / spec.nm;
  const int j = index % spec.nm;
  return {-kPi + i * 2.0 * kPi / spec.np, -kPi + j * 2.0 * kPi / spec.nm};
}

double phase_grid_point(const PhaseQubitSpec& spec, int index) {
  const PhaseWindow w = spec.resolved_window();
  const double h = (w.hi - w.lo) / (spec.npts + 1);
  return w.lo + (index + 1) * h;
}

HermitianOperator build_phase(const PhaseQubitSpec& spec) {
  spec.validate();
  const int n = spec.npts;
  const PhaseWindow w = spec.resolved_window();
  const double h = (w.hi - w.lo) / (n + 1);
  const double c = 4.0 * spec.ec / (h * h);
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (int k = 0; k < n; ++k) {
    const double phi = phase_grid_point(spec, k);
    t.emplace_back(k, k, 2.0 * c - spec.ej * (std::cos(phi) + spec.bias * phi));
    if (k + 1 < n) {
      t.emplace_back(k + 1, k, -c);
      t.emplace_back(k, k + 1, -c);
    }
  }
  return HermitianOperator(
      from_triplets(n, t),
      {BasisKind::kPhaseGrid, {n},
       "window=[" + std::to_string(w.lo) + "," + std::to_string(w.hi) + "]"});
}

double transmon_level(int m, double ej, double ec) {
  const double mm = m;
  return -ej + std::sqrt(8.0 * ej * ec) * (mm + 0.5) - ec / 12.0 * (6.0 * mm * mm + 6.0 * mm + 3.0);
}

double transmon_omega01(double ej, double ec) { return std::sqrt(8.0 * ej * ec) - ec; }

double transmon_anharmonicity(double ec) { return -ec; }

}  // namespace jjq
