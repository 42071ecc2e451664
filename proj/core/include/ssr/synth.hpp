#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ssr/network.hpp"

namespace ssr {

enum class Lineshape { kLorentzian };

struct FaxionConfig {
  double power_fraction = 0.01;  // peak excess over the unsqueezed vacuum density
  double linewidth_hz = 9e3;     // FWHM
  double start_window_hz = 2e6;  // truth frequency drawn uniformly in +-window/2
  double step_hz = -10e3;        // tone step between consecutive spectra
  Lineshape lineshape = Lineshape::kLorentzian;
};

struct SynthConfig {
  double bin_width_hz = 100.0;
  double if_band_hz = 1.9e6;
  int subspectra = 32;  // periodograms averaged per spectrum
  int n_spectra = 401;
  FaxionConfig faxion;
  double hemt_noise = 0.01;   // receiver added noise over the amplified vacuum
  double lo_offset_hz = 0.0;  // LO frequency minus cavity resonance
  std::uint64_t seed = 1;
  unsigned threads = 1;

  std::size_t n_bins() const;
  /// Index of the spectrum at which the tone sits at its truth frequency.
  int reference_index() const { return (n_spectra - 1) / 2; }
  void validate() const;
};

/// Lorentzian of unit height and the given FWHM.
double lorentzian_peak(double offset_hz, double fwhm_hz);

/// Folded IF bin frequencies f_k = k * bin_width, k = 0 .. n_bins - 1.
std::vector<double> if_frequencies(const SynthConfig& cfg);

/// Excess output density (amplifier-referred photons) produced per unit
/// power fraction at rf detuning omega from the cavity, for a tone of unit
/// peak lineshape. At critical coupling without loss or squeezing this equals
/// G_a (n_T + 1/2) on resonance.
double signal_response(const NetworkParams& p, double omega);

/// Per-bin noise mean of the folded spectrum (both rf images plus receiver
/// noise), optionally with a tone at rf detuning `faxion_hz`.
std::vector<double> mean_power_profile(const NetworkParams& p, const SynthConfig& cfg,
                                       std::optional<double> faxion_hz = std::nullopt);

/// Each bin drawn as mean * Gamma(shape = M, scale = 1 / M).
std::vector<double> synthesize_raw(std::span<const double> means, int subspectra,
                                   std::mt19937_64& rng);

struct TruthRecord {
  double start_hz = 0.0;         // tone rf detuning at the reference index
  std::vector<double> tone_hz;   // tone rf detuning for each spectrum
  double power_fraction = 0.0;
  std::uint64_t run_seed = 0;
};

struct RawSpectrumSet {
  SynthConfig config;
  NetworkParams params;
  std::vector<double> frequencies_hz;  // folded IF frequencies
  std::vector<double> expected_mean;   // noise-only mean per bin
  std::vector<double> spectra;         // row-major [spectrum][bin]
  TruthRecord truth;

  std::size_t n_spectra() const { return frequencies_hz.empty() ? 0 : spectra.size() / frequencies_hz.size(); }
  std::size_t n_bins() const { return frequencies_hz.size(); }
  std::span<const double> spectrum(std::size_t i) const {
    return {spectra.data() + i * n_bins(), n_bins()};
  }
};

/// Simulates one acquisition run. The tone sits at rf detuning
/// start + (i - i_ref) * step in spectrum i, with start uniform in the start
/// window. Spectrum i uses the RNG stream derive_seed(seed, run_index, i + 1).
RawSpectrumSet synthesize_run(const NetworkParams& p, const SynthConfig& cfg,
                              std::uint64_t run_index = 0);

/// Per-bin fractional tone response over the two-sided spectrum: the excess
/// density per unit power fraction divided by the noise mean of the folded bin.
struct VisibilityProfile {
  std::size_t half_bins = 0;    // folded bin count N; two-sided length 2N - 1
  double bin_width_hz = 0.0;
  double lo_offset_hz = 0.0;
  std::vector<double> values;   // index j <-> IF offset (j - (N - 1)) * bin_width

  double offset_hz(std::size_t j) const {
    return lo_offset_hz + (static_cast<double>(j) - static_cast<double>(half_bins - 1)) * bin_width_hz;
  }
};

VisibilityProfile make_visibility_profile(const NetworkParams& p, const SynthConfig& cfg);

}  // namespace ssr
