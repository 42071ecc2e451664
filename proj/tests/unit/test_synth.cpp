#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"
#include "ssr/synth.hpp"
#include "test_support.hpp"

namespace {

using namespace ssr;
using ssr::testing::small_config;

TEST(Synth, UnsqueezedNoiseIsFlat) {
  const auto cfg = small_config();
  const auto p = cfg.unsqueezed;
  const auto mean = mean_power_profile(p, cfg.synth);
  const double flat = 2.0 * p.G_a * p.vacuum() * (1.0 + cfg.synth.hemt_noise);
  for (double m : mean) ASSERT_NEAR(m / flat, 1.0, 1e-12);
}

TEST(Synth, FarDetunedSqueezingMatchesExpectation) {
  auto cfg = small_config();
  cfg.synth.lo_offset_hz = 50e6;
  cfg.synth.faxion.start_window_hz = 0.0;
  const double on = mean_power_profile(cfg.squeezed, cfg.synth).back();
  const double off = mean_power_profile(cfg.unsqueezed, cfg.synth).back();
  const double h = cfg.synth.hemt_noise;
  const double eta = cfg.squeezed.eta();
  const double oracle = (eta / cfg.squeezed.G_s + 1.0 - eta + h) / (1.0 + h);
  // Residual cavity tail at 50 MHz is ~(0.55 MHz / 50 MHz)^2.
  EXPECT_NEAR(on / off / oracle, 1.0, 5e-4);
  EXPECT_NEAR(linear_to_db(on / off), expected_squeezing_db(eta, cfg.squeezed.G_s), 0.2);
}

TEST(Synth, UnitPowerFractionIsOneVacuumAtCriticalCoupling) {
  NetworkParams p;
  p.kappa_l = hz_to_rad(1e5);
  p.kappa_m = p.kappa_l;
  p.G_a = 300.0;
  EXPECT_NEAR(signal_response(p, 0.0) / (p.G_a * p.vacuum()), 1.0, 1e-12);
}

TEST(Synth, ToneAddsLorentzianOnBothImages) {
  auto cfg = small_config(0.3);
  const auto p = cfg.squeezed;
  const double tone = 12345.0;
  const auto base = mean_power_profile(p, cfg.synth);
  const auto with = mean_power_profile(p, cfg.synth, tone);
  const double lw = cfg.synth.faxion.linewidth_hz;
  for (std::size_t k : {0u, 120u, 123u, 500u}) {
    const double f = k * cfg.synth.bin_width_hz;
    const double expected =
        0.3 * (lorentzian_peak(f - tone, lw) * signal_response(p, hz_to_rad(f)) +
               lorentzian_peak(-f - tone, lw) * signal_response(p, hz_to_rad(-f)));
    EXPECT_NEAR((with[k] - base[k]) / expected, 1.0, 1e-9);
  }
}

TEST(Synth, GammaDrawsHaveRadiometerMoments) {
  std::mt19937_64 rng(42);
  const std::vector<double> means(200000, 2.0);
  const auto x = synthesize_raw(means, 32, rng);
  const auto m = sample_moments(x);
  EXPECT_NEAR(m.mean, 2.0, 4.0 * 2.0 / std::sqrt(32.0 * x.size()));
  EXPECT_NEAR(m.stddev, 2.0 / std::sqrt(32.0), 2e-3);
  EXPECT_NEAR(m.skewness, 2.0 / std::sqrt(32.0), 0.03);
}

TEST(Synth, NoiseOnlyRunFollowsGammaLaw) {
  const auto cfg = small_config();
  const auto raw = synthesize_run(cfg.squeezed, cfg.synth, 0);
  const double m = cfg.synth.subspectra;
  std::vector<double> u;
  for (std::size_t i = 0; i < raw.n_spectra(); i += 4) {
    const auto s = raw.spectrum(i);
    for (std::size_t k = 0; k < s.size(); k += 7) {
      u.push_back(boost::math::gamma_p(m, m * s[k] / raw.expected_mean[k]));
    }
  }
  // Probability-integral transform: uniform on [0, 1].
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, u[i] - static_cast<double>(i) / u.size(),
                  static_cast<double>(i + 1) / u.size() - u[i]});
  }
  EXPECT_GT(kolmogorov_pvalue(d, u.size()), 1e-3);
}

TEST(Synth, ZeroPowerToneIsIndistinguishableFromNoise) {
  auto cfg = small_config(0.0);
  const auto a = synthesize_run(cfg.squeezed, cfg.synth, 0);
  cfg.synth.faxion.start_window_hz = 0.0;  // faxion-free geometry, different draws
  const auto b = synthesize_run(cfg.squeezed, cfg.synth, 1);
  std::vector<double> ra, rb;
  for (std::size_t i = 0; i < a.n_spectra(); i += 3) {
    for (std::size_t k = 0; k < a.n_bins(); k += 5) {
      ra.push_back(a.spectrum(i)[k] / a.expected_mean[k]);
      rb.push_back(b.spectrum(i)[k] / b.expected_mean[k]);
    }
  }
  EXPECT_GT(ks_test_two_sample(ra, rb).second, 1e-3);
}

TEST(Synth, RunsAreDeterministicAndThreadIndependent) {
  auto cfg = small_config(0.2);
  const auto a = synthesize_run(cfg.squeezed, cfg.synth, 3);
  cfg.synth.threads = 4;
  const auto b = synthesize_run(cfg.squeezed, cfg.synth, 3);
  EXPECT_EQ(a.spectra, b.spectra);
  EXPECT_EQ(a.truth.start_hz, b.truth.start_hz);
  const auto c = synthesize_run(cfg.squeezed, cfg.synth, 4);
  EXPECT_NE(a.spectra, c.spectra);
}

TEST(Synth, TruthSweepUsesReferenceIndex) {
  const auto cfg = small_config(0.1);
  const auto raw = synthesize_run(cfg.squeezed, cfg.synth, 0);
  const int ref = cfg.synth.reference_index();
  EXPECT_EQ(ref, 20);
  EXPECT_LE(std::abs(raw.truth.start_hz), 0.5 * cfg.synth.faxion.start_window_hz);
  for (std::size_t i = 0; i < raw.n_spectra(); ++i) {
    EXPECT_DOUBLE_EQ(raw.truth.tone_hz[i],
                     raw.truth.start_hz + (static_cast<int>(i) - ref) * cfg.synth.faxion.step_hz);
  }
}

TEST(Synth, VisibilityProfileIsSymmetricAndPeaksNearCavity) {
  const auto cfg = small_config();
  const auto v = make_visibility_profile(cfg.squeezed, cfg.synth);
  ASSERT_EQ(v.values.size(), 2 * v.half_bins - 1);
  const std::size_t c = v.half_bins - 1;
  EXPECT_DOUBLE_EQ(v.offset_hz(c), 0.0);
  for (std::size_t k = 1; k < v.half_bins; ++k) {
    ASSERT_DOUBLE_EQ(v.values[c + k], v.values[c - k]);
    ASSERT_LE(v.values[c + k], v.values[c + k - 1] * (1.0 + 1e-12));
  }
}

TEST(Synth, ValidationRejectsInconsistentGeometry) {
  auto cfg = small_config().synth;
  cfg.if_band_hz = 6e5 + 50.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config().synth;
  cfg.faxion.linewidth_hz = 500.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config().synth;
  cfg.faxion.start_window_hz = 2e6;
  EXPECT_NO_THROW(cfg.validate());
  cfg.faxion.power_fraction = 0.01;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config().synth;
  cfg.faxion.power_fraction = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  std::mt19937_64 rng(1);
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(synthesize_raw(bad, 4, rng), ConfigError);
}

}  // namespace
