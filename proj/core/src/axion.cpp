#include "ssr/axion.hpp"

#include <cmath>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"

namespace ssr {

void HaloscopePhysical::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(rho_a_gev_cm3)) throw ConfigError("axion: rho_a must be > 0");
  if (!positive(b0_tesla)) throw ConfigError("axion: B0 must be > 0");
  if (!std::isfinite(g_agg_inv_ev) || g_agg_inv_ev == 0.0) {
    throw ConfigError("axion: g_agg must be finite and nonzero");
  }
  if (!positive(delta_a_hz)) throw ConfigError("axion: delta_a must be > 0");
  if (!positive(omega_a)) throw ConfigError("axion: omega_a must be > 0");
  if (!positive(volume_liters)) throw ConfigError("axion: V must be > 0");
  if (!(form_factor > 0.0 && form_factor <= 1.0)) {
    throw ConfigError("axion: C_mnl must lie in (0, 1]");
  }
}

ModelParams model_params(const HaloscopePhysical& phys) {
  phys.validate();
  using namespace constants;
  const double g = std::abs(units::inv_ev_to_inv_joule(phys.g_agg_inv_ev));
  const double rho = units::gev_per_cm3_to_j_per_m3(phys.rho_a_gev_cm3);
  const double volume = units::liters_to_m3(phys.volume_liters);
  const double c3 = kSpeedOfLight * kSpeedOfLight * kSpeedOfLight;

  ModelParams m;
  m.n_A = g * rho * phys.b0_tesla * volume / (4.0 * phys.omega_a * phys.delta_a_hz) *
          std::sqrt(phys.form_factor * c3 / (kHbar * kMu0));
  m.kappa_a = g * phys.b0_tesla * std::sqrt(phys.form_factor * kHbar * c3 / kMu0);
  m.N_A = volume * rho / (kHbar * phys.omega_a);
  if (!std::isfinite(m.n_A) || !std::isfinite(m.kappa_a) || !std::isfinite(m.N_A) ||
      m.n_A <= 0.0 || m.kappa_a <= 0.0 || m.N_A <= 0.0) {
    throw ConfigError("axion: model parameters overflow or vanish for these inputs");
  }
  return m;
}

double signal_power(const NetworkParams& p, double delta_a_hz, double omega_a) {
  const double s = p.kappa_m + p.kappa_l;
  return 4.0 * constants::kHbar * omega_a * p.n_A * delta_a_hz * p.kappa_a * p.kappa_m /
         (s * s);
}

double signal_power_two_cavity(const NetworkParams& p, double N_A, double omega_a) {
  const double s = p.kappa_m + p.kappa_l;
  return constants::kHbar * omega_a * N_A * p.kappa_a * p.kappa_a * p.kappa_m / (s * s);
}

std::string to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::kPass: return "pass";
    case LimitStatus::kWarn: return "warn";
    case LimitStatus::kFail: return "fail";
  }
  return "unknown";
}

bool ClassicalLimitReport::ok() const {
  for (const auto& c : checks) {
    if (c.status == LimitStatus::kFail) return false;
  }
  return true;
}

ClassicalLimitReport validate_classical_limit(const NetworkParams& p, double delta_a_hz) {
  auto classify = [](double ratio) {
    if (!(ratio < 1.0)) return LimitStatus::kFail;
    if (ratio > 1e-2) return LimitStatus::kWarn;
    return LimitStatus::kPass;
  };
  ClassicalLimitReport report;
  auto add = [&](std::string name, double ratio) {
    report.checks.push_back({std::move(name), ratio, classify(ratio)});
  };
  const double linewidth = hz_to_rad(delta_a_hz);
  add("classical amplitude (1 << n_A)", p.n_A > 0.0 ? 1.0 / p.n_A : INFINITY);
  add("narrowband vs loss (delta_a << kappa_l)", linewidth / p.kappa_l);
  add("narrowband vs coupling (delta_a << kappa_m)", linewidth / p.kappa_m);
  add("weak drive (n_A kappa_a << kappa_l)", p.n_A * p.kappa_a / p.kappa_l);
  return report;
}

}  // namespace ssr
