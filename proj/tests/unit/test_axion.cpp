#include <gtest/gtest.h>

#include <random>

#include "ssr/axion.hpp"
#include "ssr/errors.hpp"

namespace {

using namespace ssr;

TEST(Axion, ReferenceInputsReproduceTabulatedParameters) {
  const auto m = model_params(HaloscopePhysical{});
  EXPECT_NEAR(m.N_A / 3.3e16, 1.0, 0.05);
  EXPECT_NEAR(rad_to_hz(m.kappa_a) / 2.3e-6, 1.0, 0.05);
  EXPECT_NEAR(m.n_A / 2.4e7, 1.0, 0.05);
}

// Same quantities assembled through a different factorization: energy of
// the dark-matter field in the volume, coupling energy scale, and linewidth.
TEST(Axion, IndependentEvaluationFrozen) {
  const double e = 1.602176634e-19;
  const double hbar = 1.054571817e-34;
  const double c = 299792458.0;
  const double mu0 = 1.25663706212e-6;
  const double rho = 0.45e9 * e * 1e6;  // J / m^3
  const double v = 1.5e-3;
  const double w = 2.0 * M_PI * 5e9;
  const double g = 7.7e-24 / e;         // 1 / J
  const double energy = rho * v;
  const double n_total = energy / (hbar * w);
  const double field = 9.0 * std::sqrt(0.5 * c * c * c / mu0);
  const double ka = g * field * std::sqrt(hbar);
  const double na = n_total * ka / (4.0 * 5e3);
  const auto m = model_params(HaloscopePhysical{});
  EXPECT_NEAR(m.N_A / n_total, 1.0, 1e-12);
  EXPECT_NEAR(m.kappa_a / ka, 1.0, 1e-12);
  EXPECT_NEAR(m.n_A / na, 1.0, 1e-12);
  EXPECT_NEAR(m.N_A, 3.26428e16, 1e12);
  EXPECT_NEAR(rad_to_hz(m.kappa_a), 2.31469e-6, 1e-11);
  EXPECT_NEAR(m.n_A, 2.3737238e7, 10.0);
}

TEST(Axion, CouplingSignIsIrrelevant) {
  HaloscopePhysical a;
  HaloscopePhysical b;
  b.g_agg_inv_ev = -a.g_agg_inv_ev;
  const auto ma = model_params(a);
  const auto mb = model_params(b);
  EXPECT_DOUBLE_EQ(ma.n_A, mb.n_A);
  EXPECT_DOUBLE_EQ(ma.kappa_a, mb.kappa_a);
}

TEST(Axion, ScalingLaws) {
  const HaloscopePhysical ref;
  const auto m0 = model_params(ref);
  auto h = ref;
  h.b0_tesla *= 2.0;
  EXPECT_NEAR(model_params(h).kappa_a / m0.kappa_a, 2.0, 1e-12);
  EXPECT_NEAR(model_params(h).n_A / m0.n_A, 2.0, 1e-12);
  h = ref;
  h.rho_a_gev_cm3 *= 3.0;
  EXPECT_NEAR(model_params(h).N_A / m0.N_A, 3.0, 1e-12);
  EXPECT_NEAR(model_params(h).n_A / m0.n_A, 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(model_params(h).kappa_a, m0.kappa_a);
  h = ref;
  h.delta_a_hz *= 4.0;
  EXPECT_NEAR(model_params(h).n_A / m0.n_A, 0.25, 1e-12);
}

TEST(Axion, PowerFormulasAgree) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    HaloscopePhysical h;
    h.b0_tesla = 1.0 + 20.0 * u(rng);
    h.volume_liters = 0.1 + 100.0 * u(rng);
    h.delta_a_hz = 1e2 + 1e4 * u(rng);
    h.form_factor = 0.05 + 0.95 * u(rng);
    const auto m = model_params(h);
    NetworkParams p;
    p.kappa_l = hz_to_rad(1e5);
    p.kappa_m = p.kappa_l * (0.2 + 5.0 * u(rng));
    p.kappa_a = m.kappa_a;
    p.n_A = m.n_A;
    EXPECT_NEAR(signal_power(p, h.delta_a_hz, h.omega_a) /
                    signal_power_two_cavity(p, m.N_A, h.omega_a),
                1.0, 1e-12);
  }
}

TEST(Axion, CriticallyCoupledSignalPowerFrozen) {
  const HaloscopePhysical h;
  const auto m = model_params(h);
  NetworkParams p;
  p.kappa_l = hz_to_rad(100e3);
  p.kappa_m = p.kappa_l;
  p.kappa_a = m.kappa_a;
  p.n_A = m.n_A;
  EXPECT_NEAR(signal_power(p, h.delta_a_hz, h.omega_a), 9.1016e-24, 1e-27);
}

TEST(Axion, UnitRoundTrips) {
  for (double x : {1e-3, 0.45, 17.0}) {
    EXPECT_NEAR(units::j_per_m3_to_gev_per_cm3(units::gev_per_cm3_to_j_per_m3(x)) / x, 1.0, 1e-15);
    EXPECT_NEAR(units::inv_joule_to_inv_ev(units::inv_ev_to_inv_joule(x)) / x, 1.0, 1e-15);
    EXPECT_NEAR(units::m3_to_liters(units::liters_to_m3(x)) / x, 1.0, 1e-15);
  }
  EXPECT_NEAR(units::gev_per_cm3_to_j_per_m3(1.0), 1.602176634e-4, 1e-18);
}

TEST(Axion, InvalidInputsRejected) {
  HaloscopePhysical h;
  h.volume_liters = 0.0;
  EXPECT_THROW(model_params(h), ConfigError);
  h = HaloscopePhysical{};
  h.g_agg_inv_ev = 0.0;
  EXPECT_THROW(model_params(h), ConfigError);
  h = HaloscopePhysical{};
  h.form_factor = 1.5;
  EXPECT_THROW(model_params(h), ConfigError);
}

TEST(Axion, ClassicalLimitClassification) {
  const auto m = model_params(HaloscopePhysical{});
  NetworkParams p;
  p.kappa_l = hz_to_rad(100e3);
  p.kappa_m = p.kappa_l;
  p.kappa_a = m.kappa_a;
  p.n_A = m.n_A;
  auto r = validate_classical_limit(p, 5e3);
  ASSERT_EQ(r.checks.size(), 4u);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.checks[0].status, LimitStatus::kPass);
  EXPECT_EQ(r.checks[1].status, LimitStatus::kWarn);
  EXPECT_DOUBLE_EQ(r.checks[1].ratio, 0.05);
  EXPECT_EQ(r.checks[3].status, LimitStatus::kPass);

  p.n_A = 0.5;
  r = validate_classical_limit(p, 5e3);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.checks[0].status, LimitStatus::kFail);

  p.n_A = m.n_A;
  r = validate_classical_limit(p, 500e3);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(to_string(r.checks[1].status), "fail");
}

}  // namespace
