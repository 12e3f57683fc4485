#include "jjq/cavity.hpp"

#include <algorithm>
#include <cmath>

#include "jjq/error.hpp"

namespace jjq {

namespace {

using Triplet = Eigen::Triplet<Complex>;

BasisLabel cavity_basis(const CavitySpec& spec) {
  return {BasisKind::kQubitFock, {2, spec.nmax + 1}, "nmax=" + std::to_string(spec.nmax)};
}

Spectrum full_spectrum(const CavitySpec& spec) {
  const HermitianOperator h = build_cavity(spec);
  EigenOptions dense;
  dense.method = EigenMethod::kDense;
  return eigensolve(h, h.dim(), true, dense);
}

double expectation(const HermitianOperator& op, const Eigen::VectorXcd& v) {
  return v.dot(op.matrix() * v).real();
}

// Index of the eigenvector with the largest overlap with a bare state.
int label(const Spectrum& s, int bare, double* overlap) {
  int best = 0;
  double best_w = -1.0;
  for (int j = 0; j < s.size(); ++j) {
    const double w = std::norm((*s.eigenvectors)(bare, j));
    if (w > best_w) {
      best_w = w;
      best = j;
    }
  }
  *overlap = best_w;
  return best;
}

}  // namespace

void CavitySpec::validate() const {
  if (!(omega_r > 0.0) || !std::isfinite(omega_r)) throw InvalidSpec("cavity: omega_r must be > 0");
  if (!std::isfinite(omega01)) throw InvalidSpec("cavity: omega01 must be finite");
  if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidSpec("cavity: g must be >= 0");
  if (nmax < 2) throw InvalidSpec("cavity: nmax must be >= 2");
}

int cavity_index(const CavitySpec& spec, int qubit, int photons) {
  if (qubit < 0 || qubit > 1 || photons < 0 || photons > spec.nmax) {
    throw InvalidSpec("cavity: state (" + std::to_string(qubit) + ", " + std::to_string(photons) +
                      ") outside the truncated basis");
  }
  return qubit * (spec.nmax + 1) + photons;
}

HermitianOperator build_cavity(const CavitySpec& spec) {
  spec.validate();
  const int d = spec.dim();
  std::vector<Triplet> t;
  t.reserve(4 * d);
  for (int n = 0; n <= spec.nmax; ++n) {
    const int gn = cavity_index(spec, 0, n);
    const int en = cavity_index(spec, 1, n);
    t.emplace_back(gn, gn, spec.omega_r * n - 0.5 * spec.omega01);
    t.emplace_back(en, en, spec.omega_r * n + 0.5 * spec.omega01);
    if (spec.g == 0.0 || n == spec.nmax) continue;
    const double amp = spec.g * std::sqrt(n + 1.0);
    // a^dag sigma_-: |e,n> -> |g,n+1>
    const int g_up = cavity_index(spec, 0, n + 1);
    t.emplace_back(g_up, en, amp);
    t.emplace_back(en, g_up, amp);
    if (spec.counter_rotating) {
      // a^dag sigma_+: |g,n> -> |e,n+1>
      const int e_up = cavity_index(spec, 1, n + 1);
      t.emplace_back(e_up, gn, amp);
      t.emplace_back(gn, e_up, amp);
    }
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return HermitianOperator(std::move(m), cavity_basis(spec));
}

HermitianOperator photon_number(const CavitySpec& spec) {
  spec.validate();
  const int d = spec.dim();
  std::vector<Triplet> t;
  for (int q = 0; q < 2; ++q) {
    for (int n = 1; n <= spec.nmax; ++n) {
      const int i = cavity_index(spec, q, n);
      t.emplace_back(i, i, static_cast<double>(n));
    }
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return HermitianOperator(std::move(m), cavity_basis(spec));
}

HermitianOperator excitation_number(const CavitySpec& spec) {
  spec.validate();
  const int d = spec.dim();
  std::vector<Triplet> t;
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n <= spec.nmax; ++n) {
      const int i = cavity_index(spec, q, n);
      if (n + q != 0) t.emplace_back(i, i, static_cast<double>(n + q));
    }
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return HermitianOperator(std::move(m), cavity_basis(spec));
}

double excitation_variance(const CavitySpec& spec, const Eigen::VectorXcd& state) {
  if (state.size() != spec.dim()) {
    throw BasisMismatch("state has dimension " + std::to_string(state.size()) +
                        ", cavity basis has " + std::to_string(spec.dim()));
  }
  double mean = 0.0;
  double second = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n <= spec.nmax; ++n) {
      const double w = std::norm(state(cavity_index(spec, q, n)));
      mean += w * (n + q);
      second += w * (n + q) * (n + q);
    }
  }
  return second - mean * mean;
}

PhotonEstimate ground_state_photons(const CavitySpec& spec) {
  const auto photons_at = [](const CavitySpec& s) {
    const HermitianOperator h = build_cavity(s);
    EigenOptions dense;
    dense.method = EigenMethod::kDense;
    const Spectrum sp = eigensolve(h, 1, true, dense);
    return expectation(photon_number(s), sp.vector(0));
  };
  PhotonEstimate out;
  out.photons = photons_at(spec);
  CavitySpec doubled = spec;
  doubled.nmax = 2 * spec.nmax;
  out.cutoff_change = std::abs(photons_at(doubled) - out.photons);
  if (out.cutoff_change > 1e-8) {
    out.warning = "photon number not converged in the Fock cutoff: doubling nmax=" +
                  std::to_string(spec.nmax) + " changes it by " + std::to_string(out.cutoff_change);
  }
  return out;
}

double dispersive_shift(const CavitySpec& spec) {
  spec.validate();
  if (std::abs(spec.omega_r - spec.omega01) < 10.0 * spec.g) {
    throw DomainError("not dispersive: |omega_r - omega01| = " +
                      std::to_string(std::abs(spec.omega_r - spec.omega01)) + " GHz < 10 g = " +
                      std::to_string(10.0 * spec.g) + " GHz");
  }
  const Spectrum s = full_spectrum(spec);
  double energy[2][2];
  std::vector<int> used;
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n < 2; ++n) {
      double overlap = 0.0;
      const int j = label(s, cavity_index(spec, q, n), &overlap);
      if (overlap < 0.9 || std::find(used.begin(), used.end(), j) != used.end()) {
        throw DomainError("ambiguous dressed-state label for |" + std::string(q ? "e" : "g") + "," +
                          std::to_string(n) + ">: overlap " + std::to_string(overlap) +
                          " < 0.9; reduce g or increase detuning");
      }
      used.push_back(j);
      energy[q][n] = s.eigenvalues[j];
    }
  }
  return 0.5 * ((energy[1][1] - energy[1][0]) - (energy[0][1] - energy[0][0]));
}

double three_photon_splitting(const CavitySpec& spec) {
  if (spec.nmax < 3) throw InvalidSpec("cavity: three-photon scan needs nmax >= 3");
  const Spectrum s = full_spectrum(spec);
  const int e0 = cavity_index(spec, 1, 0);
  const int g3 = cavity_index(spec, 0, 3);
  int first = -1;
  int second = -1;
  double w1 = -1.0;
  double w2 = -1.0;
  for (int j = 0; j < s.size(); ++j) {
    const double w = std::norm((*s.eigenvectors)(e0, j)) + std::norm((*s.eigenvectors)(g3, j));
    if (w > w1) {
      second = first;
      w2 = w1;
      first = j;
      w1 = w;
    } else if (w > w2) {
      second = j;
      w2 = w;
    }
  }
  return std::abs(s.eigenvalues[first] - s.eigenvalues[second]);
}

ResonanceScan resonance_scan_3photon(const CavitySpec& spec, double lo, double hi, int points) {
  spec.validate();
  if (!(lo < hi) || points < 5) throw InvalidSpec("resonance scan: need lo < hi and >= 5 points");
  ResonanceScan scan;
  scan.omega01.resize(points);
  scan.gap.resize(points);
  for (int i = 0; i < points; ++i) {
    CavitySpec at = spec;
    at.omega01 = lo + (hi - lo) * i / (points - 1);
    scan.omega01[i] = at.omega01;
    scan.gap[i] = three_photon_splitting(at);
  }
  const int best =
      static_cast<int>(std::min_element(scan.gap.begin(), scan.gap.end()) - scan.gap.begin());
  if (best == 0 || best == points - 1) {
    throw DomainError("no avoided crossing between |e,0> and |g,3> inside omega01 in [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "] GHz");
  }
  const auto gap_at = [&](double w) {
    CavitySpec at = spec;
    at.omega01 = w;
    return three_photon_splitting(at);
  };
  // Golden-section search on the bracket around the coarse minimum.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = scan.omega01[best - 1];
  double b = scan.omega01[best + 1];
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = gap_at(c);
  double fd = gap_at(d);
  const double tol = 1e-13 * std::max(1.0, std::abs(hi));
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = gap_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = gap_at(d);
    }
  }
  scan.location = fc < fd ? c : d;
  scan.min_gap = std::min({fc, fd, scan.gap[best]});
  if (scan.min_gap == scan.gap[best] && scan.gap[best] < std::min(fc, fd)) {
    scan.location = scan.omega01[best];
  }
  return scan;
}

std::string to_string(CavityParameter p) {
  switch (p) {
    case CavityParameter::kG: return "g";
    case CavityParameter::kOmega01: return "omega01";
    case CavityParameter::kOmegaR: return "omega_r";
  }
  return "unknown";
}

CavityParameter parse_cavity_parameter(const std::string& name) {
  if (name == "g") return CavityParameter::kG;
  if (name == "omega01" || name == "w01") return CavityParameter::kOmega01;
  if (name == "omega_r" || name == "wr") return CavityParameter::kOmegaR;
  throw InvalidSpec("unknown cavity parameter '" + name + "' (expected g, omega01 or omega_r)");
}

SweepResult cavity_sweep(const CavitySpec& spec, CavityParameter p, std::span<const double> grid,
                         const SweepOptions& options) {
  if (grid.empty()) throw InvalidSpec("sweep grid is empty");
  for (double x : grid) {
    if (!std::isfinite(x)) throw InvalidSpec("sweep grid contains a non-finite value");
  }
  SweepResult result;
  result.parameter = to_string(p);
  result.grid.assign(grid.begin(), grid.end());
  result.rows.resize(grid.size());
  result.extra_columns = {"n_variance", "photons"};
  parallel_for(static_cast<int>(grid.size()), options.workers, [&](int i) {
    SweepRow& row = result.rows[i];
    row.param = grid[i];
    try {
      CavitySpec at = spec;
      switch (p) {
        case CavityParameter::kG: at.g = grid[i]; break;
        case CavityParameter::kOmega01: at.omega01 = grid[i]; break;
        case CavityParameter::kOmegaR: at.omega_r = grid[i]; break;
      }
      const Spectrum s = full_spectrum(at);
      const int keep = std::min(5, s.size());
      QubitMetrics m;
      m.levels.assign(s.eigenvalues.begin(), s.eigenvalues.begin() + keep);
      m.omega01 = m.levels[1] - m.levels[0];
      m.omega12 = m.levels[2] - m.levels[1];
      m.anharmonicity = m.omega12 - m.omega01;
      double variance = 0.0;
      for (int j = 0; j < keep; ++j) {
        variance = std::max(variance, excitation_variance(at, s.vector(j)));
      }
      row.metrics = std::move(m);
      row.extras = {{"n_variance", variance},
                    {"photons", expectation(photon_number(at), s.vector(0))}};
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return result;
}

}  // namespace jjq
