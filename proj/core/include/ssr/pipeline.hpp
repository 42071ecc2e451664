#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssr/numeric.hpp"
#include "ssr/synth.hpp"

namespace ssr {

struct SgSettings {
  int degree = 0;
  int half_width = 0;
};

struct PipelineConfig {
  SgSettings sg1{10, 500};  // baseline of the mean spectrum
  SgSettings sg2{4, 500};   // per-spectrum residual profile
  double reject_sigma = 4.0;
  int reject_neighbors = 5;
  double max_rejected_fraction = 0.2;
  int K_r = 10;                          // rebinning factor
  int K_g = 41;                          // matched-filter length, rebinned bins
  double tuning_shift_hz = 10e3;         // grand-frequency shift per spectrum index
  std::vector<double> lineshape_weights; // K_g values; empty = Lorentzian template
  double visibility_floor = 1e-6;        // relative to the profile maximum
  unsigned threads = 1;

  void validate() const;
};

/// Lorentzian template of FWHM `linewidth_hz` sampled at `resolution_hz` over
/// K_g points centred on zero, normalized to unit sum.
std::vector<double> lorentzian_weights(int K_g, double linewidth_hz, double resolution_hz);

/// Two-sided spectrum of length 2N - 1 from a folded spectrum of length N:
/// index j holds offset (j - (N - 1)) bins and both +-f carry the folded
/// value at f.
std::vector<double> symmetrize(std::span<const double> folded);

/// Inverse of symmetrize: the folded value at f is the mean of +-f.
std::vector<double> fold(std::span<const double> two_sided);

struct RejectionResult {
  std::vector<std::uint8_t> keep;  // 1 = bin retained
  std::vector<double> baseline;    // SG baseline of the unmasked mean
  double residual_sigma = 0.0;     // standard deviation of mean / baseline - 1
  std::size_t flagged = 0;         // bins above the threshold
  std::size_t rejected = 0;        // flagged bins plus neighbours
  double retained_fraction = 1.0;
};

/// Flags bins of the mean spectrum lying more than reject_sigma standard
/// deviations above its SG baseline and masks them with reject_neighbors on
/// each side. Throws NumericalError (contamination alarm) when more than
/// max_rejected_fraction of the bins are masked.
RejectionResult reject_bins(std::span<const double> mean_spectrum, const PipelineConfig& cfg);

/// Normalized spectra: each two-sided spectrum divided by the masked
/// baseline of the mean, then by its own SG profile, minus one. Masked bins
/// hold 0.
struct ProcessedSpectra {
  std::size_t n_spectra = 0;
  std::size_t n_bins = 0;           // two-sided length
  std::vector<double> values;       // row-major [spectrum][bin]
  std::vector<double> mean_spectrum;
  std::vector<double> baseline;     // masked SG baseline of the mean
  std::vector<std::uint8_t> keep;
  RejectionResult rejection;

  std::span<const double> spectrum(std::size_t i) const {
    return {values.data() + i * n_bins, n_bins};
  }
};

/// Mean of the symmetrized spectra at real frequencies.
std::vector<double> mean_two_sided(const RawSpectrumSet& raw);

/// Normalizes one symmetrized spectrum against the given baseline and mask.
/// Throws NumericalError for a non-positive baseline or profile.
std::vector<double> process_spectrum(std::span<const double> two_sided,
                                     std::span<const double> baseline,
                                     std::span<const std::uint8_t> keep,
                                     const PipelineConfig& cfg);

ProcessedSpectra process(const RawSpectrumSet& raw, const PipelineConfig& cfg);

/// Per-bin variance of a rescaled spectrum: 1 / (M r^2), infinite for masked
/// bins and where r falls below the floor.
std::vector<double> rescaled_variance(const VisibilityProfile& profile,
                                      std::span<const std::uint8_t> keep, int subspectra,
                                      double floor);

/// Divides a processed spectrum by the visibility profile in place; excluded
/// bins (infinite variance) are set to 0.
void rescale(std::span<double> processed, const VisibilityProfile& profile,
             std::span<const double> variance);

/// Spectrum on a uniform frequency grid with per-bin variance. Bins without
/// contributions have n_contrib = 0, infinite variance and NaN value.
struct CombinedSpectrum {
  double first_hz = 0.0;
  double bin_width_hz = 0.0;
  std::vector<double> value;
  std::vector<double> variance;
  std::vector<std::uint32_t> n_contrib;

  std::size_t size() const { return value.size(); }
  double frequency(std::size_t k) const { return first_hz + static_cast<double>(k) * bin_width_hz; }
  /// Index of the bin whose extent contains f, if any.
  std::optional<std::size_t> bin_of(double f_hz) const;
};

/// Inverse-variance accumulation of shifted spectra onto the grand
/// frequency grid. Spectrum i is shifted by (i - i_ref) * tuning_shift.
class Combiner {
 public:
  Combiner(std::size_t n_spectra, int reference_index, const VisibilityProfile& layout,
           const PipelineConfig& cfg);
  /// Adds spectrum i. Spectra may arrive in any order; the result is
  /// independent of the order up to compensated-summation rounding.
  void add(std::size_t i, std::span<const double> values, std::span<const double> variance);
  CombinedSpectrum result() const;

 private:
  std::size_t two_sided_ = 0;
  long shift_bins_ = 0;
  long min_offset_ = 0;
  int reference_ = 0;
  double first_hz_ = 0.0;
  double bin_width_hz_ = 0.0;
  std::vector<CompensatedSum> weights_;
  std::vector<CompensatedSum> weighted_values_;
  std::vector<std::uint32_t> counts_;
};

CombinedSpectrum combine(const std::vector<std::vector<double>>& spectra,
                         std::span<const double> variance, int reference_index,
                         const VisibilityProfile& layout, const PipelineConfig& cfg);

/// Non-overlapping K-bin inverse-variance averages; a trailing partial block
/// is dropped.
CombinedSpectrum rebin(const CombinedSpectrum& in, int K);

struct GrandSpectrum {
  std::vector<double> frequency_hz;
  std::vector<double> excess_sigma;        // normalized matched-filter excess
  std::vector<double> power;               // ML amplitude, power-fraction units
  std::vector<double> power_sigma;         // its standard deviation
  std::vector<std::uint32_t> n_contrib;
  double bin_width_hz = 0.0;
  double center = 0.0;  // robust location of the raw z scores
  double scale = 1.0;   // robust spread of the raw z scores

  std::size_t size() const { return frequency_hz.size(); }
  std::optional<std::size_t> bin_of(double f_hz) const;
};

/// Matched-filter ML estimate of a template-shaped excess centred on every
/// bin, in units of its standard deviation, then renormalized by the median
/// and MAD of all bins farther than K_g from `exclude_hz`.
GrandSpectrum grand(const CombinedSpectrum& rebinned, std::span<const double> weights,
                    const PipelineConfig& cfg, std::optional<double> exclude_hz = std::nullopt);

/// Grand-spectrum value of the bin containing `truth_hz`. Throws ConfigError
/// when the frequency lies outside the spectrum.
double measure_faxion(const GrandSpectrum& g, double truth_hz);

struct StageStats {
  double retained_fraction = 1.0;
  std::size_t rejected_bins = 0;
  double residual_sigma = 0.0;
  double sigma_p = 0.0;           // sample sd of processed bins
  double expected_sigma_p = 0.0;  // 1 / sqrt(M)
  double sigma_g = 0.0;           // robust spread of raw matched-filter z scores
  double grand_center = 0.0;
  std::size_t grand_bins = 0;
  std::optional<double> faxion_excess;
};

struct PipelineResult {
  GrandSpectrum grand;
  StageStats stats;
};

/// Intermediate products kept for inspection when requested.
struct PipelineDump {
  bool keep_processed = false;
  std::vector<double> mean_spectrum;
  std::vector<double> baseline;
  std::vector<std::uint8_t> keep;
  VisibilityProfile profile;
  std::vector<double> processed;  // row-major, only with keep_processed
  CombinedSpectrum combined;
  CombinedSpectrum rebinned;
};

/// Full chain: symmetrize, reject, normalize, rescale by the visibility of
/// the run's own network, combine, rebin and matched-filter.
PipelineResult run_pipeline(const RawSpectrumSet& raw, const PipelineConfig& cfg,
                            PipelineDump* dump = nullptr);

}  // namespace ssr
