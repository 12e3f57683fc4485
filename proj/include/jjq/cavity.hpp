#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jjq/operator.hpp"
#include "jjq/spectral.hpp"

// Qubit coupled to one resonator mode, truncated at nmax photons. Basis index
// is q * (nmax + 1) + n with q = 0 for |g> and q = 1 for |e>.
namespace jjq {

struct CavitySpec {
  double omega_r = 5.0;  // GHz
  double omega01 = 5.0;  // GHz
  double g = 0.05;       // GHz
  int nmax = 20;
  bool counter_rotating = false;  // false: Jaynes-Cummings, true: quantum Rabi

  double eta() const { return g / omega_r; }
  int dim() const { return 2 * (nmax + 1); }
  void validate() const;
};

int cavity_index(const CavitySpec& spec, int qubit, int photons);

// omega_r a^dag a + (omega01/2) sigma_z + g (a^dag sigma_- + a sigma_+)
// [+ g (a^dag sigma_+ + a sigma_-) for the Rabi model].
HermitianOperator build_cavity(const CavitySpec& spec);

// N = a^dag a + |e><e|.
HermitianOperator excitation_number(const CavitySpec& spec);
HermitianOperator photon_number(const CavitySpec& spec);

// <N^2> - <N>^2 for a normalized state in the cavity basis.
double excitation_variance(const CavitySpec& spec, const Eigen::VectorXcd& state);

struct PhotonEstimate {
  double photons = 0.0;           // <a^dag a> in the ground state at nmax
  double cutoff_change = 0.0;     // |photons(2 nmax) - photons(nmax)|
  std::optional<std::string> warning;  // set when cutoff_change > 1e-8
};

PhotonEstimate ground_state_photons(const CavitySpec& spec);

// chi = [(E(1,e) - E(0,e)) - (E(1,g) - E(0,g))] / 2 from labelled eigenstates.
// Throws DomainError when |omega_r - omega01| < 10 g or a label overlap is < 0.9.
double dispersive_shift(const CavitySpec& spec);

struct ResonanceScan {
  double location = 0.0;  // omega01 at the minimum splitting, GHz
  double min_gap = 0.0;   // GHz
  std::vector<double> omega01;
  std::vector<double> gap;
};

// Splitting between the two eigenstates with the largest weight on
// span{|e,0>, |g,3>} at the given omega01.
double three_photon_splitting(const CavitySpec& spec);

// Coarse scan of omega01 over [lo, hi] followed by golden-section refinement.
// Throws DomainError when the minimum sits on the scan boundary.
ResonanceScan resonance_scan_3photon(const CavitySpec& spec, double lo, double hi,
                                     int points = 81);

enum class CavityParameter { kG, kOmega01, kOmegaR };

std::string to_string(CavityParameter p);
CavityParameter parse_cavity_parameter(const std::string& name);

// Rows carry the lowest five levels and omega01/omega12 of the coupled system,
// plus extra columns n_variance (max over those five states) and photons
// (ground-state <a^dag a>).
SweepResult cavity_sweep(const CavitySpec& spec, CavityParameter p, std::span<const double> grid,
                         const SweepOptions& options = {});

}  // namespace jjq
