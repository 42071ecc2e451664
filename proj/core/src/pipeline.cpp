#include "ssr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssr/errors.hpp"
#include "ssr/savitzky_golay.hpp"

namespace ssr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMadToSigma = 1.4826;

std::optional<std::size_t> grid_bin(double first_hz, double width_hz, std::size_t n, double f_hz) {
  const double k = std::floor((f_hz - first_hz) / width_hz + 0.5);
  if (!(k >= 0.0) || k >= static_cast<double>(n)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

void check_sg(const SgSettings& s, const char* name) {
  if (s.degree < 0 || s.half_width <= s.degree) {
    std::ostringstream os;
    os << "pipeline: " << name << " needs half_width > degree >= 0";
    throw ConfigError(os.str());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  check_sg(sg1, "sg1");
  check_sg(sg2, "sg2");
  if (!(reject_sigma > 0.0)) throw ConfigError("pipeline: reject_sigma must be > 0");
  if (reject_neighbors < 0) throw ConfigError("pipeline: reject_neighbors must be >= 0");
  if (!(max_rejected_fraction > 0.0 && max_rejected_fraction <= 1.0)) {
    throw ConfigError("pipeline: max_rejected_fraction must lie in (0, 1]");
  }
  if (K_r < 1) throw ConfigError("pipeline: K_r must be >= 1");
  if (K_g < 1 || K_g % 2 == 0) throw ConfigError("pipeline: K_g must be odd and positive");
  if (!std::isfinite(tuning_shift_hz)) throw ConfigError("pipeline: tuning_shift_hz must be finite");
  if (!lineshape_weights.empty()) {
    if (lineshape_weights.size() != static_cast<std::size_t>(K_g)) {
      throw ConfigError("pipeline: lineshape_weights must have K_g entries");
    }
    double sum = 0.0;
    for (double w : lineshape_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("pipeline: weights must be >= 0");
      sum += w;
    }
    if (!(sum > 0.0)) throw ConfigError("pipeline: weights must not all vanish");
  }
  if (!(visibility_floor >= 0.0 && visibility_floor < 1.0)) {
    throw ConfigError("pipeline: visibility_floor must lie in [0, 1)");
  }
}

std::vector<double> lorentzian_weights(int K_g, double linewidth_hz, double resolution_hz) {
  if (K_g < 1 || K_g % 2 == 0) throw ConfigError("lorentzian_weights: K_g must be odd");
  if (!(linewidth_hz > 0.0 && resolution_hz > 0.0)) {
    throw ConfigError("lorentzian_weights: widths must be > 0");
  }
  std::vector<double> w(static_cast<std::size_t>(K_g));
  const int half = K_g / 2;
  double sum = 0.0;
  for (int k = -half; k <= half; ++k) {
    w[static_cast<std::size_t>(k + half)] = lorentzian_peak(k * resolution_hz, linewidth_hz);
    sum += w[static_cast<std::size_t>(k + half)];
  }
  for (auto& x : w) x /= sum;
  return w;
}

std::vector<double> symmetrize(std::span<const double> folded) {
  const std::size_t n = folded.size();
  if (n == 0) return {};
  std::vector<double> out(2 * n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    out[n - 1 + k] = folded[k];
    out[n - 1 - k] = folded[k];
  }
  return out;
}

std::vector<double> fold(std::span<const double> two_sided) {
  if (two_sided.size() % 2 == 0) throw ConfigError("fold: two-sided length must be odd");
  const std::size_t n = (two_sided.size() + 1) / 2;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = 0.5 * (two_sided[n - 1 + k] + two_sided[n - 1 - k]);
  }
  return out;
}

RejectionResult reject_bins(std::span<const double> mean_spectrum, const PipelineConfig& cfg) {
  RejectionResult r;
  const std::size_t n = mean_spectrum.size();
  r.baseline = sg_filter(mean_spectrum, cfg.sg1.degree, cfg.sg1.half_width);
  std::vector<double> residual(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(r.baseline[k] > 0.0)) {
      throw NumericalError("reject_bins: non-positive baseline of the mean spectrum");
    }
    residual[k] = mean_spectrum[k] / r.baseline[k] - 1.0;
  }
  const auto moments = sample_moments(residual);
  r.residual_sigma = moments.stddev;
  r.keep.assign(n, 1);
  const double threshold = moments.mean + cfg.reject_sigma * moments.stddev;
  const auto reach = static_cast<std::size_t>(cfg.reject_neighbors);
  for (std::size_t k = 0; k < n; ++k) {
    if (residual[k] > threshold) {
      ++r.flagged;
      const std::size_t lo = k >= reach ? k - reach : 0;
      const std::size_t hi = std::min(n - 1, k + reach);
      for (std::size_t j = lo; j <= hi; ++j) r.keep[j] = 0;
    }
  }
  r.rejected = static_cast<std::size_t>(std::count(r.keep.begin(), r.keep.end(), 0));
  r.retained_fraction = n > 0 ? 1.0 - static_cast<double>(r.rejected) / static_cast<double>(n) : 1.0;
  if (1.0 - r.retained_fraction > cfg.max_rejected_fraction) {
    std::ostringstream os;
    os << "reject_bins: contamination alarm, " << r.rejected << " of " << n
       << " bins rejected (limit " << cfg.max_rejected_fraction << ")";
    throw NumericalError(os.str());
  }
  return r;
}

std::vector<double> mean_two_sided(const RawSpectrumSet& raw) {
  const std::size_t nb = raw.n_bins();
  const std::size_t ns = raw.n_spectra();
  if (ns == 0 || nb == 0) throw ConfigError("pipeline: empty raw spectrum set");
  std::vector<CompensatedSum> acc(nb);
  for (std::size_t i = 0; i < ns; ++i) {
    const auto s = raw.spectrum(i);
    for (std::size_t k = 0; k < nb; ++k) acc[k].add(s[k]);
  }
  std::vector<double> folded(nb);
  for (std::size_t k = 0; k < nb; ++k) folded[k] = acc[k].value() / static_cast<double>(ns);
  return symmetrize(folded);
}

std::vector<double> process_spectrum(std::span<const double> two_sided,
                                     std::span<const double> baseline,
                                     std::span<const std::uint8_t> keep,
                                     const PipelineConfig& cfg) {
  const std::size_t n = two_sided.size();
  if (baseline.size() != n || keep.size() != n) {
    throw ConfigError("process_spectrum: baseline/mask length mismatch");
  }
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(baseline[k] > 0.0)) throw NumericalError("process: non-positive first-pass baseline");
    x[k] = two_sided[k] / baseline[k];
  }
  const auto profile = sg_filter(x, cfg.sg2.degree, cfg.sg2.half_width, keep);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(profile[k] > 0.0)) throw NumericalError("process: non-positive spectrum profile");
    x[k] = keep[k] ? x[k] / profile[k] - 1.0 : 0.0;
  }
  return x;
}

namespace {

struct Normalization {
  std::vector<double> mean;
  RejectionResult rejection;
  std::vector<double> baseline;
};

Normalization normalization(const RawSpectrumSet& raw, const PipelineConfig& cfg) {
  Normalization n;
  n.mean = mean_two_sided(raw);
  n.rejection = reject_bins(n.mean, cfg);
  n.baseline = sg_filter(n.mean, cfg.sg1.degree, cfg.sg1.half_width, n.rejection.keep);
  return n;
}

}  // namespace

ProcessedSpectra process(const RawSpectrumSet& raw, const PipelineConfig& cfg) {
  cfg.validate();
  auto norm = normalization(raw, cfg);
  ProcessedSpectra out;
  out.n_spectra = raw.n_spectra();
  out.n_bins = norm.mean.size();
  out.values.resize(out.n_spectra * out.n_bins);
  parallel_for(out.n_spectra, cfg.threads, [&](std::size_t i) {
    const auto row = process_spectrum(symmetrize(raw.spectrum(i)), norm.baseline,
                                      norm.rejection.keep, cfg);
    std::copy(row.begin(), row.end(),
              out.values.begin() + static_cast<std::ptrdiff_t>(i * out.n_bins));
  });
  out.mean_spectrum = std::move(norm.mean);
  out.baseline = std::move(norm.baseline);
  out.keep = norm.rejection.keep;
  out.rejection = std::move(norm.rejection);
  return out;
}

std::vector<double> rescaled_variance(const VisibilityProfile& profile,
                                      std::span<const std::uint8_t> keep, int subspectra,
                                      double floor) {
  const std::size_t n = profile.values.size();
  if (keep.size() != n) throw ConfigError("rescale: mask length does not match profile");
  if (subspectra < 1) throw ConfigError("rescale: subspectra must be >= 1");
  double peak = 0.0;
  for (double r : profile.values) peak = std::max(peak, r);
  if (!(peak > 0.0)) throw NumericalError("rescale: visibility profile vanishes everywhere");
  const double cutoff = floor * peak;
  std::vector<double> var(n, kInf);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = profile.values[k];
    if (keep[k] && r > cutoff && r > 0.0) var[k] = 1.0 / (subspectra * r * r);
  }
  return var;
}

void rescale(std::span<double> processed, const VisibilityProfile& profile,
             std::span<const double> variance) {
  if (processed.size() != profile.values.size() || variance.size() != processed.size()) {
    throw ConfigError("rescale: length mismatch");
  }
  for (std::size_t k = 0; k < processed.size(); ++k) {
    processed[k] = std::isfinite(variance[k]) ? processed[k] / profile.values[k] : 0.0;
  }
}

std::optional<std::size_t> CombinedSpectrum::bin_of(double f_hz) const {
  return grid_bin(first_hz, bin_width_hz, size(), f_hz);
}

Combiner::Combiner(std::size_t n_spectra, int reference_index, const VisibilityProfile& layout,
                   const PipelineConfig& cfg)
    : two_sided_(layout.values.size()), reference_(reference_index),
      bin_width_hz_(layout.bin_width_hz) {
  if (n_spectra == 0 || two_sided_ == 0) throw ConfigError("combine: nothing to combine");
  const double q = cfg.tuning_shift_hz / layout.bin_width_hz;
  shift_bins_ = std::lround(q);
  if (std::abs(q - static_cast<double>(shift_bins_)) > 1e-9 * std::max(1.0, std::abs(q))) {
    throw ConfigError("combine: tuning_shift_hz must be a whole number of bins");
  }
  const long first = (0 - reference_) * shift_bins_;
  const long last = (static_cast<long>(n_spectra) - 1 - reference_) * shift_bins_;
  min_offset_ = std::min(first, last);
  const long span = std::max(first, last) - min_offset_;
  const std::size_t size = two_sided_ + static_cast<std::size_t>(span);
  const long half = static_cast<long>(layout.half_bins) - 1;
  first_hz_ = layout.lo_offset_hz + static_cast<double>(min_offset_ - half) * bin_width_hz_;
  weights_.resize(size);
  weighted_values_.resize(size);
  counts_.assign(size, 0);
}

void Combiner::add(std::size_t i, std::span<const double> values, std::span<const double> variance) {
  if (values.size() != two_sided_ || variance.size() != two_sided_) {
    throw ConfigError("combine: spectrum length mismatch");
  }
  const long offset = (static_cast<long>(i) - reference_) * shift_bins_ - min_offset_;
  if (offset < 0 || static_cast<std::size_t>(offset) + two_sided_ > counts_.size()) {
    throw ConfigError("combine: spectrum index outside the configured range");
  }
  for (std::size_t k = 0; k < two_sided_; ++k) {
    if (!std::isfinite(variance[k])) continue;
    const std::size_t g = static_cast<std::size_t>(offset) + k;
    const double w = 1.0 / variance[k];
    weights_[g].add(w);
    weighted_values_[g].add(w * values[k]);
    ++counts_[g];
  }
}

CombinedSpectrum Combiner::result() const {
  CombinedSpectrum c;
  c.first_hz = first_hz_;
  c.bin_width_hz = bin_width_hz_;
  const std::size_t n = counts_.size();
  c.value.resize(n);
  c.variance.resize(n);
  c.n_contrib = counts_;
  for (std::size_t g = 0; g < n; ++g) {
    const double w = weights_[g].value();
    if (counts_[g] == 0 || !(w > 0.0)) {
      c.value[g] = kNaN;
      c.variance[g] = kInf;
    } else {
      c.value[g] = weighted_values_[g].value() / w;
      c.variance[g] = 1.0 / w;
    }
  }
  return c;
}

CombinedSpectrum combine(const std::vector<std::vector<double>>& spectra,
                         std::span<const double> variance, int reference_index,
                         const VisibilityProfile& layout, const PipelineConfig& cfg) {
  Combiner c(spectra.size(), reference_index, layout, cfg);
  for (std::size_t i = 0; i < spectra.size(); ++i) c.add(i, spectra[i], variance);
  return c.result();
}

CombinedSpectrum rebin(const CombinedSpectrum& in, int K) {
  if (K < 1) throw ConfigError("rebin: K must be >= 1");
  const std::size_t k = static_cast<std::size_t>(K);
  const std::size_t n = in.size() / k;
  CombinedSpectrum out;
  out.bin_width_hz = in.bin_width_hz * K;
  out.first_hz = in.first_hz + 0.5 * static_cast<double>(K - 1) * in.bin_width_hz;
  out.value.resize(n);
  out.variance.resize(n);
  out.n_contrib.assign(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    CompensatedSum w, wx;
    std::uint32_t count = 0;
    for (std::size_t j = b * k; j < (b + 1) * k; ++j) {
      if (in.n_contrib[j] == 0 || !std::isfinite(in.variance[j])) continue;
      const double wj = 1.0 / in.variance[j];
      w.add(wj);
      wx.add(wj * in.value[j]);
      count += in.n_contrib[j];
    }
    out.n_contrib[b] = count;
    if (count > 0 && w.value() > 0.0) {
      out.value[b] = wx.value() / w.value();
      out.variance[b] = 1.0 / w.value();
    } else {
      out.value[b] = kNaN;
      out.variance[b] = kInf;
    }
  }
  return out;
}

std::optional<std::size_t> GrandSpectrum::bin_of(double f_hz) const {
  if (frequency_hz.empty()) return std::nullopt;
  return grid_bin(frequency_hz.front(), bin_width_hz, size(), f_hz);
}

GrandSpectrum grand(const CombinedSpectrum& rebinned, std::span<const double> weights,
                    const PipelineConfig& cfg, std::optional<double> exclude_hz) {
  const std::size_t n = rebinned.size();
  const std::size_t kg = weights.size();
  if (kg == 0 || kg % 2 == 0) throw ConfigError("grand: template length must be odd");
  if (n < kg) {
    std::ostringstream os;
    os << "grand: band too narrow (" << n << " bins for a " << kg << "-bin template)";
    throw ConfigError(os.str());
  }
  const long half = static_cast<long>(kg / 2);
  GrandSpectrum g;
  g.bin_width_hz = rebinned.bin_width_hz;
  g.frequency_hz.resize(n);
  g.excess_sigma.assign(n, kNaN);
  g.power.assign(n, kNaN);
  g.power_sigma.assign(n, kNaN);
  g.n_contrib = rebinned.n_contrib;
  std::vector<double> z(n, kNaN);
  for (std::size_t b = 0; b < n; ++b) {
    g.frequency_hz[b] = rebinned.frequency(b);
    CompensatedSum num, den;
    for (long k = -half; k <= half; ++k) {
      const long j = static_cast<long>(b) + k;
      if (j < 0 || j >= static_cast<long>(n)) continue;
      const auto ju = static_cast<std::size_t>(j);
      if (rebinned.n_contrib[ju] == 0 || !std::isfinite(rebinned.variance[ju])) continue;
      const double w = weights[static_cast<std::size_t>(k + half)];
      num.add(w * rebinned.value[ju] / rebinned.variance[ju]);
      den.add(w * w / rebinned.variance[ju]);
    }
    if (den.value() > 0.0) {
      g.power[b] = num.value() / den.value();
      g.power_sigma[b] = 1.0 / std::sqrt(den.value());
      z[b] = num.value() / std::sqrt(den.value());
    }
  }
  std::optional<std::size_t> excluded;
  if (exclude_hz) excluded = grid_bin(g.frequency_hz.front(), g.bin_width_hz, n, *exclude_hz);
  std::vector<double> pool;
  pool.reserve(n);
  for (std::size_t b = 0; b < n; ++b) {
    if (!std::isfinite(z[b])) continue;
    if (excluded) {
      const auto d = b > *excluded ? b - *excluded : *excluded - b;
      if (d <= static_cast<std::size_t>(cfg.K_g)) continue;
    }
    pool.push_back(z[b]);
  }
  if (pool.size() < 3) throw NumericalError("grand: too few valid bins to normalize");
  g.center = median(pool);
  for (auto& v : pool) v = std::abs(v - g.center);
  g.scale = kMadToSigma * median(pool);
  if (!(g.scale > 0.0)) throw NumericalError("grand: degenerate spread of matched-filter output");
  for (std::size_t b = 0; b < n; ++b) {
    if (std::isfinite(z[b])) g.excess_sigma[b] = (z[b] - g.center) / g.scale;
  }
  return g;
}

double measure_faxion(const GrandSpectrum& g, double truth_hz) {
  const auto b = g.bin_of(truth_hz);
  if (!b || !std::isfinite(g.excess_sigma[*b])) {
    std::ostringstream os;
    os << "measure_faxion: truth frequency " << truth_hz << " Hz is outside the grand spectrum";
    throw ConfigError(os.str());
  }
  return g.excess_sigma[*b];
}

PipelineResult run_pipeline(const RawSpectrumSet& raw, const PipelineConfig& cfg,
                            PipelineDump* dump) {
  cfg.validate();
  const auto& sc = raw.config;
  auto norm = normalization(raw, cfg);
  const auto profile = make_visibility_profile(raw.params, sc);
  const auto variance =
      rescaled_variance(profile, norm.rejection.keep, sc.subspectra, cfg.visibility_floor);

  const std::size_t ns = raw.n_spectra();
  const std::size_t nb = norm.mean.size();
  Combiner combiner(ns, sc.reference_index(), profile, cfg);
  CompensatedSum sum, sum_sq;
  std::size_t count = 0;
  if (dump && dump->keep_processed) dump->processed.assign(ns * nb, 0.0);

  // Spectra are normalized in parallel chunks and accumulated in index order.
  const std::size_t chunk = std::max<std::size_t>(1, 4 * std::max(1u, cfg.threads));
  std::vector<std::vector<double>> rows(chunk);
  for (std::size_t c0 = 0; c0 < ns; c0 += chunk) {
    const std::size_t c1 = std::min(ns, c0 + chunk);
    parallel_for(c1 - c0, cfg.threads, [&](std::size_t r) {
      rows[r] = process_spectrum(symmetrize(raw.spectrum(c0 + r)), norm.baseline,
                                 norm.rejection.keep, cfg);
    });
    for (std::size_t i = c0; i < c1; ++i) {
      auto& row = rows[i - c0];
      for (std::size_t k = 0; k < nb; ++k) {
        if (!norm.rejection.keep[k]) continue;
        sum.add(row[k]);
        sum_sq.add(row[k] * row[k]);
        ++count;
      }
      if (dump && dump->keep_processed) {
        std::copy(row.begin(), row.end(), dump->processed.begin() + static_cast<std::ptrdiff_t>(i * nb));
      }
      rescale(row, profile, variance);
      combiner.add(i, row, variance);
    }
  }

  auto combined = combiner.result();
  auto rebinned = rebin(combined, cfg.K_r);
  const auto weights = cfg.lineshape_weights.empty()
                           ? lorentzian_weights(cfg.K_g, sc.faxion.linewidth_hz, rebinned.bin_width_hz)
                           : cfg.lineshape_weights;
  std::vector<double> normalized(weights);
  double wsum = 0.0;
  for (double w : normalized) wsum += w;
  for (auto& w : normalized) w /= wsum;

  const bool has_tone = raw.truth.power_fraction > 0.0;
  PipelineResult result;
  result.grand = grand(rebinned, normalized, cfg,
                       has_tone ? std::optional<double>(raw.truth.start_hz) : std::nullopt);

  auto& st = result.stats;
  st.retained_fraction = norm.rejection.retained_fraction;
  st.rejected_bins = norm.rejection.rejected;
  st.residual_sigma = norm.rejection.residual_sigma;
  if (count > 1) {
    const double mean = sum.value() / static_cast<double>(count);
    st.sigma_p = std::sqrt(std::max(0.0, sum_sq.value() / static_cast<double>(count) - mean * mean));
  }
  st.expected_sigma_p = 1.0 / std::sqrt(static_cast<double>(sc.subspectra));
  st.sigma_g = result.grand.scale;
  st.grand_center = result.grand.center;
  st.grand_bins = static_cast<std::size_t>(std::count_if(
      result.grand.excess_sigma.begin(), result.grand.excess_sigma.end(),
      [](double v) { return std::isfinite(v); }));
  if (result.grand.bin_of(raw.truth.start_hz)) {
    st.faxion_excess = measure_faxion(result.grand, raw.truth.start_hz);
  }

  if (dump) {
    dump->mean_spectrum = std::move(norm.mean);
    dump->baseline = std::move(norm.baseline);
    dump->keep = std::move(norm.rejection.keep);
    dump->profile = profile;
    dump->combined = std::move(combined);
    dump->rebinned = std::move(rebinned);
  }
  return result;
}

}  // namespace ssr
