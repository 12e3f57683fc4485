#pragma once

#include <optional>
#include <string>
#include <utility>

#include "jjq/operator.hpp"

// Hamiltonian builders for the Josephson-junction qubit circuits. All energies
// are E/h in GHz; phases are dimensionless, fluxes are in units of Phi_0.
namespace jjq {

inline constexpr int kDefaultChargeCutoff = 35;

struct ChargeQubitSpec {
  double ec = 1.0;  // single-electron charging energy e^2/2C
  double ej = 1.0;
  double ng = 0.0;  // offset charge in Cooper pairs
  int ncut = kDefaultChargeCutoff;

  void validate() const;
  int dim() const { return 2 * ncut + 1; }
};

struct SquidSpec {
  double ej1 = 0.0;
  double ej2 = 0.0;
  double flux = 0.0;  // Phi_ext / Phi_0

  void validate() const;
};

enum class FluxDiscretization {
  kFourier,          // plane waves with |kp| <= Np/2, |km| <= Nm/2
  kFiniteDifference, // Np x Nm grid with periodic central differences
};

enum class FluxSector {
  kPhysical,   // invariant under (phi_p, phi_m) -> (phi_p + pi, phi_m + pi)
  kFullTorus,  // every function on [-pi, pi)^2
};

struct FluxQubitSpec {
  double ej = 50.0;
  double alpha = 0.7;
  double ec = 1.0;  // e^2 / 2 C_J of the large junctions
  double flux = 0.5;
  int np = 64;
  int nm = 64;
  FluxDiscretization discretization = FluxDiscretization::kFourier;
  FluxSector sector = FluxSector::kPhysical;

  void validate() const;
};

struct PhaseWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct PhaseQubitSpec {
  double ej = 1e4;
  double ec = 1.0;
  double bias = 0.0;  // I_b / I_c
  PhaseWindow window; // hard walls; {0, 0} selects default_phase_window(bias)
  int npts = 1024;

  void validate() const;
  PhaseWindow resolved_window() const;
};

// [phi_min - 2, phi_top] around the first metastable well of -cos(phi) - b phi.
PhaseWindow default_phase_window(double bias);

struct SquidEnergy {
  double magnitude = 0.0;
  int sign = 1;  // sign of (EJ1 + EJ2) cos(pi f)
};

SquidEnergy effective_josephson_energy(const SquidSpec& squid);

// Tridiagonal charge-basis Hamiltonian 4EC(n - ng)^2 |n><n| - EJ/2 (|n+1><n| + h.c.).
HermitianOperator build_cpb(const ChargeQubitSpec& spec);

// Warning text when ncut < 4 sqrt(EJ/EC) + 10.
std::optional<std::string> cpb_cutoff_warning(const ChargeQubitSpec& spec);

// diag(n - ng) in the charge basis.
HermitianOperator charge_number_operator(int ncut, double ng);

// H/h = -2EC d^2/dphi_p^2 - 2EC/(1+2 alpha) d^2/dphi_m^2
//       + 2EJ (1 - cos phi_p cos phi_m) + alpha EJ (1 - cos(2 pi f + 2 phi_m))
HermitianOperator build_flux3jj(const FluxQubitSpec& spec);

// Potential term of the flux-qubit Hamiltonian.
double flux_potential(const FluxQubitSpec& spec, double phi_p, double phi_m);

// (phi_p, phi_m) -> (-phi_p, -phi_m) in the basis used by build_flux3jj.
HermitianOperator flux_parity_operator(const FluxQubitSpec& spec);

// Grid coordinates (phi_p, phi_m) for a grid-based flux basis index.
std::pair<double, double> flux_grid_point(const FluxQubitSpec& spec, int index);

// H/h = -4EC d^2/dphi^2 - EJ (cos phi + b phi) with hard walls at the window edges.
HermitianOperator build_phase(const PhaseQubitSpec& spec);

double phase_grid_point(const PhaseQubitSpec& spec, int index);

// -EJ + sqrt(8 EJ EC)(m + 1/2) - EC/12 (6m^2 + 6m + 3)
double transmon_level(int m, double ej, double ec);
double transmon_omega01(double ej, double ec);
double transmon_anharmonicity(double ec);

}  // namespace jjq
