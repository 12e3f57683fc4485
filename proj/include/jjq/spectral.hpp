#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "jjq/models.hpp"
#include "jjq/operator.hpp"
#include "jjq/parallel.hpp"

namespace jjq {

struct Spectrum {
  std::vector<double> eigenvalues;                 // ascending, GHz
  std::optional<Eigen::MatrixXcd> eigenvectors;    // column i pairs with eigenvalues[i]
  BasisLabel basis;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  Eigen::VectorXcd vector(int i) const;
};

enum class EigenMethod {
  kAuto,    // dense up to dense_limit, tridiagonal QL for values-only, else sparse
  kDense,
  kSparse,  // shift-invert block Krylov with Rayleigh-Ritz
};

struct EigenOptions {
  EigenMethod method = EigenMethod::kAuto;
  int dense_limit = 600;
  // Sparse solver stops when every wanted residual is below tolerance * ||H||_inf.
  double tolerance = 1e-11;
  int max_restarts = 40;
};

// k lowest eigenpairs. Eigenvector phases are fixed so that the largest-magnitude
// component is real and positive.
Spectrum eigensolve(const HermitianOperator& h, int k, bool want_vectors,
                    const EigenOptions& options = {});

// max_i ||H v_i - lambda_i v_i|| and max |V^dagger V - I|; used to audit solves.
double max_residual(const HermitianOperator& h, const Spectrum& s);
double orthonormality_error(const Spectrum& s);

// <psi_i| op |psi_j> for eigenvectors of s. Throws BasisMismatch when the
// operator and the spectrum do not share a basis.
Complex matrix_element(const HermitianOperator& op, const Spectrum& s, int i, int j);

struct QubitMetrics {
  double omega01 = 0.0;
  double omega12 = 0.0;
  double anharmonicity = 0.0;         // omega12 - omega01
  double charge_dispersion_01 = 0.0;  // peak-to-peak of omega01 over ng in [0,1]
  std::vector<double> sweet_spots;
  std::vector<double> levels;         // lowest five levels (fewer if dim < 5)
};

using QubitModel = std::variant<ChargeQubitSpec, FluxQubitSpec, PhaseQubitSpec>;

inline constexpr int kDispersionPoints = 101;

QubitMetrics metrics(const ChargeQubitSpec& spec);
QubitMetrics metrics(const FluxQubitSpec& spec);
QubitMetrics metrics(const PhaseQubitSpec& spec);
QubitMetrics metrics(const QubitModel& model);

// Peak-to-peak omega01 over ng in [0, 1] sampled at kDispersionPoints points.
double charge_dispersion(const ChargeQubitSpec& spec);

enum class SweepParameter { kNg, kFlux, kBias, kEJ };

std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);

struct SweepRow {
  double param = 0.0;
  std::optional<QubitMetrics> metrics;
  std::vector<std::pair<std::string, double>> extras;  // appended columns
  std::string error;                                   // empty on success
};

struct SweepResult {
  std::string parameter;
  std::vector<double> grid;
  std::vector<SweepRow> rows;  // rows[i] belongs to grid[i]
  std::vector<std::string> extra_columns;
};

struct SweepOptions {
  int workers = 0;  // 0 = hardware concurrency
};

// Apply one sweep parameter to a model. Throws InvalidSpec for parameters the
// model does not have (e.g. ng on a flux qubit).
QubitModel with_parameter(const QubitModel& model, SweepParameter p, double value);

SweepResult sweep(const QubitModel& model, SweepParameter p, std::span<const double> grid,
                  const SweepOptions& options = {});

// Interior stationary points of omega01, refined by a three-point parabola.
std::vector<double> find_sweet_spots(std::span<const double> x, std::span<const double> y);
std::vector<double> find_sweet_spot(const SweepResult& sweep);

struct TwoLevelFit {
  double delta = 0.0;      // gap at f = 1/2
  double epsilon = 0.0;    // epsilon at f = 1/2 (zero by construction)
  double ip_proxy = 0.0;   // slope: epsilon = ip_proxy * (2f - 1)
  double max_relative_residual = 0.0;  // max |sqrt(eps_fit^2 + delta^2) - gap| / gap
  double gap_ratio = 0.0;  // (E2 - E1) / (E1 - E0) at f = 1/2
  std::vector<double> flux;
  std::vector<double> gap;
  std::vector<double> epsilons;  // signed sqrt(gap^2 - delta^2)
};

// Fits (eps sigma_z + delta sigma_x)/2 to the two lowest levels over
// f in [1/2 - half_width, 1/2 + half_width] sampled at `points` (odd) values.
TwoLevelFit two_level_fit(const FluxQubitSpec& spec, double half_width, int points = 11);

// Lowest `levels` eigenvalues at (Np, Nm) and (2Np, 2Nm).
struct ConvergenceReport {
  std::vector<double> coarse;
  std::vector<double> fine;
  double max_change = 0.0;
};

ConvergenceReport flux_convergence(const FluxQubitSpec& spec, int levels = 4);

}  // namespace jjq
