#pragma once

#include <string>
#include <vector>

#include "ssr/network.hpp"
#include "ssr/numeric.hpp"

namespace ssr {

/// CODATA 2018 constants in SI units.
namespace constants {
inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kSpeedOfLight = 299792458.0;        // m / s
inline constexpr double kMu0 = 1.25663706212e-6;            // N / A^2
inline constexpr double kElementaryCharge = 1.602176634e-19; // C (= J / eV)
}  // namespace constants

namespace units {
inline constexpr double kJoulePerGeV = 1e9 * constants::kElementaryCharge;
inline constexpr double kCubicMetrePerCubicCm = 1e-6;
inline constexpr double kCubicMetrePerLiter = 1e-3;

inline double gev_per_cm3_to_j_per_m3(double x) { return x * kJoulePerGeV / kCubicMetrePerCubicCm; }
inline double j_per_m3_to_gev_per_cm3(double x) { return x * kCubicMetrePerCubicCm / kJoulePerGeV; }
inline double inv_ev_to_inv_joule(double g) { return g / constants::kElementaryCharge; }
inline double inv_joule_to_inv_ev(double g) { return g * constants::kElementaryCharge; }
inline double liters_to_m3(double v) { return v * kCubicMetrePerLiter; }
inline double m3_to_liters(double v) { return v / kCubicMetrePerLiter; }
}  // namespace units

/// Physical axion and haloscope parameters in customary units.
struct HaloscopePhysical {
  double rho_a_gev_cm3 = 0.45;   // local dark matter density, GeV / cm^3
  double b0_tesla = 9.0;         // static field
  double g_agg_inv_ev = -7.7e-24; // axion-photon coupling, eV^-1 (signed)
  double delta_a_hz = 5e3;       // axion linewidth
  double omega_a = kTwoPi * 5e9;  // axion angular frequency, rad/s
  double volume_liters = 1.5;
  double form_factor = 0.5;      // C_mnl

  void validate() const;
};

/// Fictitious-generator model parameters.
struct ModelParams {
  double n_A = 0.0;      // generator occupancy
  double kappa_a = 0.0;  // signal-port coupling, rad/s
  double N_A = 0.0;      // total axion occupancy of the cavity volume
};

ModelParams model_params(const HaloscopePhysical& phys);

/// On-resonance signal power (W) at the cavity output from the generator
/// model: 4 hbar w_a n_A delta_a k_a k_m / (k_m + k_l)^2.
double signal_power(const NetworkParams& p, double delta_a_hz, double omega_a);

/// Steady-state output power (W) of the two-cavity exchange model:
/// hbar w_a N_A k_a^2 k_m / (k_m + k_l)^2.
double signal_power_two_cavity(const NetworkParams& p, double N_A, double omega_a);

enum class LimitStatus { kPass, kWarn, kFail };

std::string to_string(LimitStatus s);

struct LimitCheck {
  std::string name;
  double ratio = 0.0;  // left side over right side of "x << y"
  LimitStatus status = LimitStatus::kPass;
};

struct ClassicalLimitReport {
  std::vector<LimitCheck> checks;
  /// No check failed (warnings allowed).
  bool ok() const;
};

/// Checks n_A >> 1, 2 pi delta_a << {kappa_l, kappa_m} and n_A kappa_a <<
/// kappa_l. A ratio >= 1 fails; a ratio within a factor 100 of 1 warns.
ClassicalLimitReport validate_classical_limit(const NetworkParams& p, double delta_a_hz);

}  // namespace ssr
