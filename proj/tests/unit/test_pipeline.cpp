#include <gtest/gtest.h>

#include <random>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"
#include "ssr/pipeline.hpp"
#include "test_support.hpp"

namespace {

using namespace ssr;
using ssr::testing::small_config;

PipelineConfig pipeline_for(const ExperimentConfig& c) {
  auto p = c.pipeline;
  p.tuning_shift_hz = -c.synth.faxion.step_hz;
  return p;
}

VisibilityProfile flat_layout(std::size_t half_bins, double bin_width) {
  VisibilityProfile v;
  v.half_bins = half_bins;
  v.bin_width_hz = bin_width;
  v.values.assign(2 * half_bins - 1, 1.0);
  return v;
}

TEST(Pipeline, SymmetrizeAndFold) {
  const std::vector<double> folded{5.0, 1.0, 2.0};
  const auto two = symmetrize(folded);
  EXPECT_EQ(two, (std::vector<double>{2.0, 1.0, 5.0, 1.0, 2.0}));
  EXPECT_EQ(fold(two), folded);
  const std::vector<double> asym{1.0, 3.0, 7.0, 5.0, 9.0};
  EXPECT_EQ(fold(asym), (std::vector<double>{7.0, 4.0, 5.0}));
  EXPECT_THROW(fold(std::vector<double>(4, 1.0)), ConfigError);
}

TEST(Pipeline, LorentzianTemplateIsNormalizedAndCentred) {
  const auto w = lorentzian_weights(41, 9e3, 1e3);
  double s = 0.0;
  for (double x : w) s += x;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_EQ(std::max_element(w.begin(), w.end()) - w.begin(), 20);
  EXPECT_NEAR(w[20 + 4] / w[20], 1.0 / (1.0 + (8.0 / 9.0) * (8.0 / 9.0)), 1e-14);
  EXPECT_THROW(lorentzian_weights(40, 9e3, 1e3), ConfigError);
}

TEST(Pipeline, RejectsSpikeAndNeighbours) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.001);
  std::vector<double> mean(5001);
  for (auto& m : mean) m = 1.0 + g(rng);
  mean[2500] += 0.05;
  PipelineConfig cfg;
  const auto r = reject_bins(mean, cfg);
  EXPECT_EQ(r.flagged, 1u);
  EXPECT_EQ(r.rejected, 11u);
  for (std::size_t k = 2495; k <= 2505; ++k) EXPECT_EQ(r.keep[k], 0);
  EXPECT_EQ(r.keep[2494], 1);
  EXPECT_EQ(r.keep[2506], 1);
  EXPECT_NEAR(r.retained_fraction, 1.0 - 11.0 / 5001.0, 1e-15);
}

TEST(Pipeline, ContaminationAlarm) {
  std::vector<double> mean(5001, 1.0);
  for (std::size_t k = 0; k < mean.size(); k += 50) mean[k] = 1.5;
  PipelineConfig cfg;
  cfg.max_rejected_fraction = 0.1;
  EXPECT_THROW(reject_bins(mean, cfg), NumericalError);
}

TEST(Pipeline, InverseVarianceWeightedMean) {
  PipelineConfig cfg;
  cfg.tuning_shift_hz = 0.0;
  const auto layout = flat_layout(2, 100.0);
  Combiner c(2, 0, layout, cfg);
  c.add(0, std::vector<double>(3, 0.0), std::vector<double>(3, 1.0));
  c.add(1, std::vector<double>(3, 5.0), std::vector<double>(3, 4.0));
  const auto r = c.result();
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(r.value[k], 1.0);
    EXPECT_DOUBLE_EQ(r.variance[k], 0.8);
    EXPECT_EQ(r.n_contrib[k], 2u);
  }
}

TEST(Pipeline, ShiftedSpectraLandOnCommonGrid) {
  PipelineConfig cfg;
  cfg.tuning_shift_hz = 200.0;
  const auto layout = flat_layout(3, 100.0);  // two-sided length 5
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> var{1.0, 1.0, inf, 1.0, 1.0};
  const auto r = combine({{1, 1, 1, 1, 1}, {2, 2, 2, 2, 2}, {3, 3, 3, 3, 3}}, var, 1, layout, cfg);
  // Offsets -2, 0, +2 bins around the reference; size 5 + 4.
  ASSERT_EQ(r.size(), 9u);
  EXPECT_DOUBLE_EQ(r.first_hz, -400.0);
  EXPECT_EQ(r.n_contrib, (std::vector<std::uint32_t>{1, 1, 1, 2, 2, 2, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(r.value[0], 1.0);
  EXPECT_DOUBLE_EQ(r.value[2], 2.0);  // masked centre of spectrum 0
  EXPECT_DOUBLE_EQ(r.value[3], 1.5);
  EXPECT_DOUBLE_EQ(r.value[4], 2.0);  // masked centre of spectrum 1
  EXPECT_DOUBLE_EQ(r.value[8], 3.0);
  EXPECT_EQ(*r.bin_of(0.0), 4u);
  cfg.tuning_shift_hz = 150.0;
  EXPECT_THROW(Combiner(3, 1, layout, cfg), ConfigError);
}

TEST(Pipeline, CombinedSpreadMatchesPropagatedVariance) {
  PipelineConfig cfg;
  cfg.tuning_shift_hz = 0.0;
  const auto layout = flat_layout(1001, 100.0);
  const std::vector<double> sigmas{0.5, 1.0, 2.0, 3.0};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  Combiner c(sigmas.size(), 0, layout, cfg);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::vector<double> v(layout.values.size());
    for (auto& x : v) x = sigmas[i] * g(rng);
    c.add(i, v, std::vector<double>(v.size(), sigmas[i] * sigmas[i]));
  }
  const auto r = c.result();
  double w = 0.0;
  for (double s : sigmas) w += 1.0 / (s * s);
  EXPECT_NEAR(r.variance[0], 1.0 / w, 1e-15);
  const auto m = sample_moments(r.value);
  EXPECT_NEAR(m.stddev / std::sqrt(1.0 / w), 1.0, 0.05);
}

TEST(Pipeline, RebinIsWeightedAndSkipsEmptyBins) {
  CombinedSpectrum in;
  in.first_hz = 0.0;
  in.bin_width_hz = 10.0;
  const double inf = std::numeric_limits<double>::infinity();
  in.value = {1.0, 4.0, 2.0, std::nan(""), 7.0};
  in.variance = {1.0, 2.0, 1.0, inf, 1.0};
  in.n_contrib = {1, 3, 2, 0, 1};
  const auto r = rebin(in, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.bin_width_hz, 20.0);
  EXPECT_DOUBLE_EQ(r.first_hz, 5.0);
  EXPECT_DOUBLE_EQ(r.value[0], (1.0 + 4.0 * 0.5) / 1.5);
  EXPECT_DOUBLE_EQ(r.variance[0], 1.0 / 1.5);
  EXPECT_EQ(r.n_contrib[0], 4u);
  EXPECT_DOUBLE_EQ(r.value[1], 2.0);
  EXPECT_EQ(r.n_contrib[1], 2u);
}

TEST(Pipeline, MatchedFilterRecoversTemplateAmplitude) {
  const int kg = 21;
  const auto w = lorentzian_weights(kg, 9e3, 1e3);
  CombinedSpectrum s;
  s.bin_width_hz = 1e3;
  const std::size_t n = 2000;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1e-3);
  s.value.resize(n);
  s.variance.assign(n, 1e-6);
  s.n_contrib.assign(n, 1);
  for (auto& v : s.value) v = g(rng);
  const std::size_t centre = 1000;
  for (int k = -kg / 2; k <= kg / 2; ++k) s.value[centre + k] += 0.5 * w[k + kg / 2];
  PipelineConfig cfg;
  cfg.K_g = kg;
  const auto out = grand(s, w, cfg, s.frequency(centre));
  double sw2 = 0.0;
  for (double x : w) sw2 += x * x;
  EXPECT_NEAR(out.power[centre], 0.5, 5.0 * 1e-3 / std::sqrt(sw2));
  EXPECT_NEAR(out.power_sigma[centre], 1e-3 / std::sqrt(sw2), 1e-12);
  EXPECT_NEAR(out.scale, 1.0, 0.05);
  EXPECT_GT(out.excess_sigma[centre], 50.0);
  EXPECT_NEAR(measure_faxion(out, s.frequency(centre)), out.excess_sigma[centre], 0.0);
  EXPECT_THROW(measure_faxion(out, 1e9), ConfigError);
}

TEST(Pipeline, GrandRejectsNarrowBand) {
  CombinedSpectrum s;
  s.bin_width_hz = 1.0;
  s.value.assign(10, 0.0);
  s.variance.assign(10, 1.0);
  s.n_contrib.assign(10, 1);
  PipelineConfig cfg;
  EXPECT_THROW(grand(s, lorentzian_weights(41, 9.0, 1.0), cfg), ConfigError);
}

class PipelineRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    cfg_ = small_config(0.0);
    raw_ = synthesize_run(cfg_.squeezed, cfg_.synth, 0);
    result_ = run_pipeline(raw_, pipeline_for(cfg_));
  }
  static ExperimentConfig cfg_;
  static RawSpectrumSet raw_;
  static PipelineResult result_;
};
ExperimentConfig PipelineRun::cfg_;
RawSpectrumSet PipelineRun::raw_;
PipelineResult PipelineRun::result_;

TEST_F(PipelineRun, ProcessedSpreadFollowsRadiometer) {
  const auto& st = result_.stats;
  EXPECT_DOUBLE_EQ(st.expected_sigma_p, 1.0 / std::sqrt(32.0));
  EXPECT_NEAR(st.sigma_p / st.expected_sigma_p, 1.0, 0.02);
  EXPECT_GE(st.retained_fraction, 0.99);
}

TEST_F(PipelineRun, ProcessedSpectraHaveZeroMean) {
  const auto p = process(raw_, pipeline_for(cfg_));
  CompensatedSum s;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.n_spectra; ++i) {
    const auto row = p.spectrum(i);
    for (std::size_t k = 0; k < p.n_bins; ++k) {
      if (!p.keep[k]) continue;
      s.add(row[k]);
      ++n;
    }
  }
  EXPECT_NEAR(s.value() / n, 0.0, 3.0 / std::sqrt(32.0 * n) * std::sqrt(2.0));
}

TEST_F(PipelineRun, NoiseOnlyGrandSpectrumIsStandardNormal) {
  const auto& g = result_.grand;
  std::vector<double> z;
  for (std::size_t b = 0; b < g.size(); b += static_cast<std::size_t>(cfg_.pipeline.K_g)) {
    if (std::isfinite(g.excess_sigma[b])) z.push_back(g.excess_sigma[b]);
  }
  ASSERT_GT(z.size(), 40u);
  const auto m = sample_moments(z);
  EXPECT_LT(std::abs(m.mean), 4.0 / std::sqrt(static_cast<double>(z.size())));
  EXPECT_NEAR(m.stddev, 1.0, 0.25);
  EXPECT_GT(ks_test_standard_normal(z).second, 1e-3);
}

TEST_F(PipelineRun, ThreadCountDoesNotChangeResult) {
  auto pc = pipeline_for(cfg_);
  pc.threads = 3;
  const auto r = run_pipeline(raw_, pc);
  EXPECT_EQ(r.grand.excess_sigma.size(), result_.grand.excess_sigma.size());
  for (std::size_t b = 0; b < r.grand.size(); ++b) {
    if (std::isnan(r.grand.excess_sigma[b])) {
      ASSERT_TRUE(std::isnan(result_.grand.excess_sigma[b]));
    } else {
      ASSERT_EQ(r.grand.excess_sigma[b], result_.grand.excess_sigma[b]);
    }
  }
}

TEST_F(PipelineRun, CommonGainIsIrrelevant) {
  auto scaled = raw_;
  for (auto& v : scaled.spectra) v *= 7.0;
  const auto r = run_pipeline(scaled, pipeline_for(cfg_));
  for (std::size_t b = 0; b < r.grand.size(); ++b) {
    if (!std::isfinite(r.grand.excess_sigma[b])) continue;
    ASSERT_NEAR(r.grand.excess_sigma[b], result_.grand.excess_sigma[b], 1e-9);
  }
}

TEST(PipelineSignal, ExcessIsLinearInPowerFraction) {
  // Identical noise draws; only the injected tone changes.
  auto measure = [](double pf) {
    auto c = small_config(pf);
    const auto raw = synthesize_run(c.squeezed, c.synth, 5);
    const auto r = run_pipeline(raw, pipeline_for(c));
    const auto b = *r.grand.bin_of(raw.truth.start_hz);
    return r.grand.power[b];
  };
  const double p0 = measure(0.0);
  const double p1 = measure(0.1);
  const double p2 = measure(0.2);
  EXPECT_GT(p1 - p0, 0.0);
  EXPECT_NEAR((p2 - p0) / (p1 - p0), 2.0, 0.05);
}

TEST(PipelineSignal, StrongToneIsFoundAtTruth) {
  auto c = small_config(1.0);
  const auto raw = synthesize_run(c.squeezed, c.synth, 1);
  const auto r = run_pipeline(raw, pipeline_for(c));
  ASSERT_TRUE(r.stats.faxion_excess.has_value());
  EXPECT_GT(*r.stats.faxion_excess, 5.0);
  const auto& e = r.grand.excess_sigma;
  std::size_t best = 0;
  for (std::size_t b = 0; b < e.size(); ++b) {
    if (std::isfinite(e[b]) && (!std::isfinite(e[best]) || e[b] > e[best])) best = b;
  }
  EXPECT_LE(std::abs(r.grand.frequency_hz[best] - raw.truth.start_hz), 3.0 * r.grand.bin_width_hz);
}

TEST(PipelineConfigValidation, RejectsBadSettings) {
  PipelineConfig c;
  c.K_g = 40;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.sg1 = {10, 10};
  EXPECT_THROW(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.lineshape_weights = {1.0, 2.0};
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
