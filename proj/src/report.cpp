#include "jjq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "jjq/error.hpp"

namespace jjq::report {

namespace {

using nlohmann::ordered_json;

constexpr int kLevelColumns = 5;

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(); }

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InvalidSpec("cannot format number");
  return std::string(buf, ptr);
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "param";
  for (int i = 0; i < kLevelColumns; ++i) out += ",E" + std::to_string(i);
  out += ",omega01,omega12,anharm,dispersion";
  for (const auto& c : sweep.extra_columns) out += "," + c;
  out += ",status\n";
  for (const auto& row : sweep.rows) {
    out += format_number(row.param);
    if (row.metrics) {
      const QubitMetrics& m = *row.metrics;
      for (int i = 0; i < kLevelColumns; ++i) {
        out += ",";
        if (i < static_cast<int>(m.levels.size())) out += format_number(m.levels[i]);
      }
      out += "," + format_number(m.omega01) + "," + format_number(m.omega12) + "," +
             format_number(m.anharmonicity) + "," + format_number(m.charge_dispersion_01);
      for (const auto& c : sweep.extra_columns) {
        out += ",";
        for (const auto& [name, value] : row.extras) {
          if (name == c) out += format_number(value);
        }
      }
      out += ",ok\n";
    } else {
      out += std::string(kLevelColumns + 4 + sweep.extra_columns.size(), ',');
      out += "," + csv_field("error: " + row.error) + "\n";
    }
  }
  return out;
}

std::string sweep_json(const SweepResult& sweep) {
  ordered_json j;
  j["parameter"] = sweep.parameter;
  j["grid"] = sweep.grid;
  j["rows"] = ordered_json::array();
  for (const auto& row : sweep.rows) {
    ordered_json r;
    r["param"] = row.param;
    if (row.metrics) {
      const QubitMetrics& m = *row.metrics;
      r["levels"] = m.levels;
      r["omega01"] = m.omega01;
      r["omega12"] = m.omega12;
      r["anharm"] = m.anharmonicity;
      r["dispersion"] = m.charge_dispersion_01;
      r["sweet_spots"] = m.sweet_spots;
      ordered_json extras = ordered_json::object();
      for (const auto& [name, value] : row.extras) extras[name] = number_or_null(value);
      if (!row.extras.empty()) r["extras"] = extras;
      r["status"] = "ok";
    } else {
      r["status"] = "error";
      r["error"] = row.error;
    }
    j["rows"].push_back(r);
  }
  j["sweet_spots"] = find_sweet_spot(sweep);
  return j.dump(2) + "\n";
}

std::string sweep_svg(const SweepResult& sweep, const std::string& title) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Series> series(kLevelColumns);
  for (int i = 0; i < kLevelColumns; ++i) series[i].name = "E" + std::to_string(i);
  std::vector<double> x;
  for (const auto& row : sweep.rows) {
    x.push_back(row.param);
    for (int i = 0; i < kLevelColumns; ++i) {
      const bool has = row.metrics && i < static_cast<int>(row.metrics->levels.size());
      series[i].y.push_back(has ? row.metrics->levels[i] : nan);
    }
  }
  return line_plot_svg(title, sweep.parameter, "E / h (GHz)", x, series);
}

std::string spectrum_csv(const std::vector<double>& levels) {
  std::string out = "level,energy\n";
  for (size_t i = 0; i < levels.size(); ++i) {
    out += std::to_string(i) + "," + format_number(levels[i]) + "\n";
  }
  return out;
}

std::string spectrum_json(const std::string& model, const std::vector<double>& levels,
                          const QubitMetrics& metrics) {
  ordered_json j;
  j["model"] = model;
  j["levels"] = levels;
  j["omega01"] = metrics.omega01;
  j["omega12"] = metrics.omega12;
  j["anharm"] = metrics.anharmonicity;
  j["dispersion"] = metrics.charge_dispersion_01;
  j["sweet_spots"] = metrics.sweet_spots;
  return j.dump(2) + "\n";
}

std::string decay_csv(const DecayCurve& curve) {
  std::string out = "time,population,coherence\n";
  for (size_t i = 0; i < curve.time.size(); ++i) {
    out += format_number(curve.time[i]) + "," + format_number(curve.population[i]) + "," +
           format_number(curve.coherence[i]) + "\n";
  }
  return out;
}

std::string decay_json(const NoiseParams& noise, const DecayCurve& curve, const DecayFit& fit) {
  ordered_json j;
  j["T1"] = noise.t1;
  j["Tphi"] = noise.tphi;
  j["T2_expected"] = fit.t2_expected;
  j["T1_fit"] = number_or_null(fit.t1);
  j["T2_fit"] = number_or_null(fit.t2);
  j["T2_relative_error"] = number_or_null(fit.relative_error());
  j["time"] = curve.time;
  j["population"] = curve.population;
  j["coherence"] = curve.coherence;
  return j.dump(2) + "\n";
}

std::string decay_svg(const DecayCurve& curve, const std::string& title) {
  return line_plot_svg(title, "t (us)", "value", curve.time,
                       {{"population", curve.population}, {"coherence", curve.coherence}});
}

std::string qec_json(const qec::TrialStats& stats, double analytic_rate) {
  ordered_json j;
  j["p"] = stats.physical_p;
  j["trials"] = stats.trials;
  j["failures"] = stats.logical_failures;
  j["rate"] = stats.rate;
  j["stderr"] = stats.std_error;
  j["analytic_rate"] = analytic_rate;
  return j.dump(2) + "\n";
}

std::string qec_csv(const qec::TrialStats& stats, double analytic_rate) {
  return "p,trials,failures,rate,stderr,analytic_rate\n" + format_number(stats.physical_p) + "," +
         std::to_string(stats.trials) + "," + std::to_string(stats.logical_failures) + "," +
         format_number(stats.rate) + "," + format_number(stats.std_error) + "," +
         format_number(analytic_rate) + "\n";
}

std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<double>& x,
                          const std::vector<Series>& series) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 120, kTop = 40, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (double v : x) {
    if (std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
  }
  for (const auto& s : series) {
    for (double v : s.y) {
      if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double v) { return kTop + (ymax - v) / (ymax - ymin) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                    "viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + escape_xml(title) + "</text>\n";
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) +
         "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto label = [&](double tx, double ty, const std::string& anchor, const std::string& text) {
    out += "<text x=\"" + fixed(tx) + "\" y=\"" + fixed(ty) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape_xml(text) + "</text>\n";
  };
  label(kLeft, kTop + ph + 16, "start", format_number(xmin));
  label(kLeft + pw, kTop + ph + 16, "end", format_number(xmax));
  label(kLeft - 6, kTop + ph, "end", format_number(ymin));
  label(kLeft - 6, kTop + 10, "end", format_number(ymax));
  label(kLeft + pw / 2, kHeight - 12, "middle", xlabel);
  label(14, kTop + ph / 2, "middle", ylabel);

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    std::string points;
    const auto flush = [&] {
      if (!points.empty()) {
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      }
      points.clear();
    };
    for (size_t i = 0; i < x.size() && i < series[s].y.size(); ++i) {
      const double v = series[s].y[i];
      if (!std::isfinite(v) || !std::isfinite(x[i])) {
        flush();
        continue;
      }
      points += (points.empty() ? "" : " ") + fixed(px(x[i])) + "," + fixed(py(v));
    }
    flush();
    const double ly = kTop + 14 + 16 * static_cast<double>(s);
    out += "<line x1=\"" + fixed(kLeft + pw + 10) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" +
           fixed(kLeft + pw + 30) + "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    label(kLeft + pw + 34, ly, "start", series[s].name);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace jjq::report
