#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jjq/qec.hpp"
#include "jjq/spectral.hpp"
#include "jjq/statesim.hpp"

// Serializers for result files. Numbers use the shortest representation that
// round-trips, so identical results give byte-identical files.
namespace jjq::report {

std::string format_number(double x);

// Header: param,E0,E1,E2,E3,E4,omega01,omega12,anharm,dispersion[,extras...],status
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);
// E0..E4 against the sweep parameter.
std::string sweep_svg(const SweepResult& sweep, const std::string& title);

std::string spectrum_csv(const std::vector<double>& levels);
std::string spectrum_json(const std::string& model, const std::vector<double>& levels,
                          const QubitMetrics& metrics);

std::string decay_csv(const DecayCurve& curve);
std::string decay_json(const NoiseParams& noise, const DecayCurve& curve, const DecayFit& fit);
std::string decay_svg(const DecayCurve& curve, const std::string& title);

std::string qec_json(const qec::TrialStats& stats, double analytic_rate);
std::string qec_csv(const qec::TrialStats& stats, double analytic_rate);

struct Series {
  std::string name;
  std::vector<double> y;  // NaN entries break the polyline
};

// Minimal fixed-style line chart.
std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<double>& x,
                          const std::vector<Series>& series);

}  // namespace jjq::report
