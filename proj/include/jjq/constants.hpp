#pragma once

#include <cmath>
#include <numbers>

// Physical constants (exact SI values since 2019) and the unit conversions used
// to turn circuit parameters into reduced energies E/h in GHz.
namespace jjq::constants {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kReducedPlanck = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kFluxQuantum = kPlanck / (2.0 * kElementaryCharge);  // Wb

inline constexpr double kFemtoFarad = 1e-15;
inline constexpr double kNanoHenry = 1e-9;
inline constexpr double kMilliVolt = 1e-3;
inline constexpr double kGigaHertz = 1e9;

// E_C / h in GHz for a capacitance given in fF: e^2 / (2 C h).
inline double charging_energy_ghz(double capacitance_ff) {
  const double c = capacitance_ff * kFemtoFarad;
  return kElementaryCharge * kElementaryCharge / (2.0 * c * kPlanck) / kGigaHertz;
}

// Offset charge in Cooper pairs, n_g = C_g V_g / 2e.
inline double offset_charge(double gate_capacitance_ff, double gate_voltage_mv) {
  return gate_capacitance_ff * kFemtoFarad * gate_voltage_mv * kMilliVolt /
         (2.0 * kElementaryCharge);
}

// Bare LC frequency 1/(2 pi sqrt(LC)) in GHz.
inline double lc_frequency_ghz(double inductance_nh, double capacitance_ff) {
  const double lc = inductance_nh * kNanoHenry * capacitance_ff * kFemtoFarad;
  return 1.0 / (2.0 * std::numbers::pi * std::sqrt(lc)) / kGigaHertz;
}

}  // namespace jjq::constants
