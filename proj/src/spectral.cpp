#include "jjq/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "jjq/error.hpp"

namespace jjq {

namespace {

constexpr int kMetricLevels = 5;

QubitMetrics from_levels(std::vector<double> levels) {
  if (levels.size() < 3) throw InvalidSpec("metrics need at least three levels");
  QubitMetrics m;
  m.omega01 = levels[1] - levels[0];
  m.omega12 = levels[2] - levels[1];
  m.anharmonicity = m.omega12 - m.omega01;
  m.levels = std::move(levels);
  return m;
}

std::vector<double> lowest_levels(const HermitianOperator& h, int count) {
  return eigensolve(h, std::min(count, h.dim()), false).eigenvalues;
}

double charge_omega01(ChargeQubitSpec spec, double ng) {
  spec.ng = ng;
  const auto levels = lowest_levels(build_cpb(spec), 2);
  return levels[1] - levels[0];
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double charge_dispersion(const ChargeQubitSpec& spec) {
  spec.validate();
  double lo = 0.0;
  double hi = 0.0;
  for (int i = 0; i < kDispersionPoints; ++i) {
    const double w = charge_omega01(spec, static_cast<double>(i) / (kDispersionPoints - 1));
    if (i == 0 || w < lo) lo = w;
    if (i == 0 || w > hi) hi = w;
  }
  return hi - lo;
}

QubitMetrics metrics(const ChargeQubitSpec& spec) {
  QubitMetrics m = from_levels(lowest_levels(build_cpb(spec), kMetricLevels));
  std::vector<double> ng(kDispersionPoints);
  std::vector<double> w(kDispersionPoints);
  for (int i = 0; i < kDispersionPoints; ++i) {
    ng[i] = static_cast<double>(i) / (kDispersionPoints - 1);
    w[i] = charge_omega01(spec, ng[i]);
  }
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  m.charge_dispersion_01 = *hi - *lo;
  m.sweet_spots = find_sweet_spots(ng, w);
  return m;
}

QubitMetrics metrics(const FluxQubitSpec& spec) {
  return from_levels(lowest_levels(build_flux3jj(spec), kMetricLevels));
}

QubitMetrics metrics(const PhaseQubitSpec& spec) {
  return from_levels(lowest_levels(build_phase(spec), kMetricLevels));
}

QubitMetrics metrics(const QubitModel& model) {
  return std::visit([](const auto& spec) { return metrics(spec); }, model);
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kNg: return "ng";
    case SweepParameter::kFlux: return "f";
    case SweepParameter::kBias: return "b";
    case SweepParameter::kEJ: return "EJ";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "ng") return SweepParameter::kNg;
  if (name == "f" || name == "flux") return SweepParameter::kFlux;
  if (name == "b" || name == "bias") return SweepParameter::kBias;
  if (name == "EJ" || name == "ej") return SweepParameter::kEJ;
  throw InvalidSpec("unknown sweep parameter '" + name + "' (expected ng, f, b or EJ)");
}

QubitModel with_parameter(const QubitModel& model, SweepParameter p, double value) {
  QubitModel out = model;
  const auto reject = [&](const char* kind) {
    throw InvalidSpec(std::string("parameter '") + to_string(p) + "' does not apply to a " +
                      kind + " model");
  };
  if (auto* c = std::get_if<ChargeQubitSpec>(&out)) {
    if (p == SweepParameter::kNg) c->ng = value;
    else if (p == SweepParameter::kEJ) c->ej = value;
    else reject("charge qubit");
  } else if (auto* f = std::get_if<FluxQubitSpec>(&out)) {
    if (p == SweepParameter::kFlux) f->flux = value;
    else if (p == SweepParameter::kEJ) f->ej = value;
    else reject("flux qubit");
  } else if (auto* ph = std::get_if<PhaseQubitSpec>(&out)) {
    if (p == SweepParameter::kBias) ph->bias = value;
    else if (p == SweepParameter::kEJ) ph->ej = value;
    else reject("phase qubit");
  }
  return out;
}

SweepResult sweep(const QubitModel& model, SweepParameter p, std::span<const double> grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw InvalidSpec("sweep grid is empty");
  for (double x : grid) {
    if (!std::isfinite(x)) throw InvalidSpec("sweep grid contains a non-finite value");
  }
  // Reject inapplicable parameters up front rather than once per row.
  with_parameter(model, p, grid.front());

  SweepResult result;
  result.parameter = to_string(p);
  result.grid.assign(grid.begin(), grid.end());
  result.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), options.workers, [&](int i) {
    SweepRow& row = result.rows[i];
    row.param = grid[i];
    try {
      row.metrics = metrics(with_parameter(model, p, grid[i]));
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return result;
}

std::vector<double> find_sweet_spots(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidSpec("find_sweet_spots: x and y differ in length");
  std::vector<double> spots;
  const int n = static_cast<int>(x.size());
  if (n < 3) return spots;

  std::vector<double> d(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);

  // Vertex of the parabola through points c-1, c, c+1.
  const auto vertex = [&](int c) -> std::optional<double> {
    const double x0 = x[c - 1], x1 = x[c], x2 = x[c + 1];
    const double y0 = y[c - 1], y1 = y[c], y2 = y[c + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a == 0.0) return std::nullopt;
    return -b / (2.0 * a);
  };

  const auto add = [&](int c, double lo, double hi) {
    const auto v = vertex(c);
    double s = v ? *v : x[c];
    if (!(s >= std::min(lo, hi) && s <= std::max(lo, hi))) s = x[c];
    for (double t : spots) {
      if (std::abs(t - s) < 1e-6) return;
    }
    spots.push_back(s);
  };

  for (int i = 1; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      if (i - 1 >= 1 && i + 1 <= n - 2 && sign_of(d[i - 1]) * sign_of(d[i + 1]) < 0) {
        add(i, x[i - 1], x[i + 1]);
      }
      continue;
    }
    if (i + 1 <= n - 2 && sign_of(d[i]) * sign_of(d[i + 1]) < 0) {
      const int c = std::abs(d[i]) <= std::abs(d[i + 1]) ? i : i + 1;
      add(c, x[i - 1], x[i + 2]);
    }
  }
  std::sort(spots.begin(), spots.end());
  return spots;
}

std::vector<double> find_sweet_spot(const SweepResult& sweep) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : sweep.rows) {
    if (!row.metrics) continue;
    x.push_back(row.param);
    y.push_back(row.metrics->omega01);
  }
  return find_sweet_spots(x, y);
}

TwoLevelFit two_level_fit(const FluxQubitSpec& spec, double half_width, int points) {
  spec.validate();
  if (!(half_width > 0.0) || points < 3 || points % 2 == 0) {
    throw InvalidSpec("two_level_fit: need half_width > 0 and an odd number of points >= 3");
  }
  FluxQubitSpec at = spec;
  at.flux = 0.5;
  const auto center = lowest_levels(build_flux3jj(at), 3);
  TwoLevelFit fit;
  fit.gap_ratio = (center[2] - center[1]) / (center[1] - center[0]);
  if (!(fit.gap_ratio > 3.0)) {
    throw DomainError("not a qubit: (E2-E1)/(E1-E0) = " + std::to_string(fit.gap_ratio) +
                      " at f=0.5 (need > 3)");
  }
  fit.delta = center[1] - center[0];

  fit.flux.resize(points);
  fit.gap.resize(points);
  fit.epsilons.resize(points);
  const int mid = points / 2;
  for (int i = 0; i < points; ++i) {
    const double f = 0.5 + half_width * (i - mid) / mid;
    fit.flux[i] = f;
    if (i == mid) {
      fit.gap[i] = fit.delta;
    } else {
      at.flux = f;
      const auto e = lowest_levels(build_flux3jj(at), 2);
      fit.gap[i] = e[1] - e[0];
    }
    const double eps2 = std::max(fit.gap[i] * fit.gap[i] - fit.delta * fit.delta, 0.0);
    fit.epsilons[i] = (i < mid ? -1.0 : 1.0) * std::sqrt(eps2);
    if (i == mid) fit.epsilons[i] = 0.0;
  }
  // Least squares through the origin: eps = ip_proxy * (2f - 1).
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < points; ++i) {
    const double u = 2.0 * fit.flux[i] - 1.0;
    sxx += u * u;
    sxy += u * fit.epsilons[i];
  }
  fit.ip_proxy = sxy / sxx;
  for (int i = 0; i < points; ++i) {
    const double eps = fit.ip_proxy * (2.0 * fit.flux[i] - 1.0);
    const double model = std::sqrt(eps * eps + fit.delta * fit.delta);
    fit.max_relative_residual =
        std::max(fit.max_relative_residual, std::abs(model - fit.gap[i]) / fit.gap[i]);
  }
  return fit;
}

ConvergenceReport flux_convergence(const FluxQubitSpec& spec, int levels) {
  ConvergenceReport r;
  r.coarse = lowest_levels(build_flux3jj(spec), levels);
  FluxQubitSpec fine = spec;
  fine.np *= 2;
  fine.nm *= 2;
  r.fine = lowest_levels(build_flux3jj(fine), levels);
  for (int i = 0; i < levels; ++i) {
    r.max_change = std::max(r.max_change, std::abs(r.fine[i] - r.coarse[i]));
  }
  return r;
}

}  // namespace jjq
