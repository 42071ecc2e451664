#include "ssr/synth.hpp"

#include <cmath>
#include <sstream>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"

namespace ssr {

namespace {

bool is_integer_multiple(double x, double unit) {
  const double q = x / unit;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, std::abs(q));
}

// The tone is dropped once it is this many linewidths outside the IF band.
constexpr double kToneCutoffLinewidths = 10.0;

double lorentzian(double offset_hz, double fwhm_hz) {
  const double x = 2.0 * offset_hz / fwhm_hz;
  return 1.0 / (1.0 + x * x);
}

// Adds the excess of a tone at rf detuning tone_hz to both image sides.
void add_tone(std::vector<double>& mean, const NetworkParams& p, const SynthConfig& cfg,
              double tone_hz) {
  if (!std::isfinite(tone_hz)) throw ConfigError("mean_power_profile: tone frequency not finite");
  const double pf = cfg.faxion.power_fraction;
  const double lw = cfg.faxion.linewidth_hz;
  if (pf == 0.0) return;
  if (std::abs(tone_hz - cfg.lo_offset_hz) > cfg.if_band_hz + kToneCutoffLinewidths * lw) return;
  for (std::size_t k = 0; k < mean.size(); ++k) {
    const double f = static_cast<double>(k) * cfg.bin_width_hz;
    for (double rf : {cfg.lo_offset_hz + f, cfg.lo_offset_hz - f}) {
      mean[k] += pf * lorentzian(rf - tone_hz, lw) * signal_response(p, hz_to_rad(rf));
    }
  }
}

}  // namespace

std::size_t SynthConfig::n_bins() const {
  return static_cast<std::size_t>(std::llround(if_band_hz / bin_width_hz));
}

void SynthConfig::validate() const {
  if (!(bin_width_hz > 0.0) || !std::isfinite(bin_width_hz)) {
    throw ConfigError("synth: bin_width_hz must be > 0");
  }
  if (!(if_band_hz > bin_width_hz) || !is_integer_multiple(if_band_hz, bin_width_hz)) {
    throw ConfigError("synth: if_band_hz must be a multiple of bin_width_hz above one bin");
  }
  if (subspectra < 1) throw ConfigError("synth: subspectra must be >= 1");
  if (n_spectra < 1) throw ConfigError("synth: n_spectra must be >= 1");
  if (!(hemt_noise >= 0.0) || !std::isfinite(hemt_noise)) {
    throw ConfigError("synth: hemt_noise must be >= 0");
  }
  if (!std::isfinite(lo_offset_hz)) throw ConfigError("synth: lo_offset_hz must be finite");
  const auto& f = faxion;
  if (!(f.power_fraction >= 0.0) || !std::isfinite(f.power_fraction)) {
    throw ConfigError("synth: faxion.power_fraction must be >= 0");
  }
  if (!(f.linewidth_hz > 0.0) || !std::isfinite(f.linewidth_hz)) {
    throw ConfigError("synth: faxion.linewidth_hz must be > 0");
  }
  if (!(f.linewidth_hz >= 10.0 * bin_width_hz)) {
    throw ConfigError("synth: faxion.linewidth_hz must be at least 10 bins wide");
  }
  if (!(f.start_window_hz >= 0.0) || !std::isfinite(f.start_window_hz)) {
    throw ConfigError("synth: faxion.start_window_hz must be >= 0");
  }
  if (!std::isfinite(f.step_hz)) throw ConfigError("synth: faxion.step_hz must be finite");
  // With a tone, the truth frequency must be observable in the reference spectrum.
  if (f.power_fraction > 0.0 && std::abs(lo_offset_hz) + 0.5 * f.start_window_hz > if_band_hz) {
    std::ostringstream os;
    os << "synth: start window +-" << 0.5 * f.start_window_hz << " Hz around the cavity"
       << " falls outside the IF band of the reference spectrum (" << if_band_hz << " Hz)";
    throw ConfigError(os.str());
  }
}

double lorentzian_peak(double offset_hz, double fwhm_hz) { return lorentzian(offset_hz, fwhm_hz); }

std::vector<double> if_frequencies(const SynthConfig& cfg) {
  std::vector<double> f(cfg.n_bins());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * cfg.bin_width_hz;
  return f;
}

double signal_response(const NetworkParams& p, double omega) {
  // |chi_ma|^2 n_A with n_A chosen so that the critically coupled, lossless,
  // unsqueezed resonant excess equals one vacuum: n_A kappa_a = vac kappa_l.
  const double half = 0.5 * p.kappa_total();
  const double denom = half * half + omega * omega;
  return p.G_a * p.lambda_t * p.vacuum() * p.kappa_l * p.kappa_m / denom;
}

std::vector<double> mean_power_profile(const NetworkParams& p, const SynthConfig& cfg,
                                       std::optional<double> faxion_hz) {
  p.validate();
  cfg.validate();
  NetworkParams noise = p;
  noise.n_A = 0.0;
  const double lo = hz_to_rad(cfg.lo_offset_hz);
  const double receiver = 2.0 * cfg.hemt_noise * p.G_a * p.vacuum();
  const auto n = cfg.n_bins();
  std::vector<double> mean(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = hz_to_rad(static_cast<double>(k) * cfg.bin_width_hz);
    mean[k] = measurement_density(noise, lo + w) + measurement_density(noise, lo - w) + receiver;
  }
  if (faxion_hz) add_tone(mean, p, cfg, *faxion_hz);
  return mean;
}

std::vector<double> synthesize_raw(std::span<const double> means, int subspectra,
                                   std::mt19937_64& rng) {
  if (subspectra < 1) throw ConfigError("synthesize_raw: subspectra must be >= 1");
  const double m = static_cast<double>(subspectra);
  std::gamma_distribution<double> gamma(m, 1.0 / m);
  std::vector<double> out(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (!(means[k] > 0.0)) throw ConfigError("synthesize_raw: means must be > 0");
    out[k] = means[k] * gamma(rng);
  }
  return out;
}

RawSpectrumSet synthesize_run(const NetworkParams& p, const SynthConfig& cfg,
                              std::uint64_t run_index) {
  p.validate();
  cfg.validate();
  RawSpectrumSet set;
  set.config = cfg;
  set.params = p;
  set.frequencies_hz = if_frequencies(cfg);
  set.expected_mean = mean_power_profile(p, cfg);
  const std::size_t nb = set.n_bins();
  const auto ns = static_cast<std::size_t>(cfg.n_spectra);

  const std::uint64_t run_seed = derive_seed(cfg.seed, run_index, 0);
  std::mt19937_64 truth_rng(run_seed);
  const double half_window = 0.5 * cfg.faxion.start_window_hz;
  std::uniform_real_distribution<double> start(-half_window, half_window);
  set.truth.start_hz = half_window > 0.0 ? start(truth_rng) : 0.0;
  set.truth.power_fraction = cfg.faxion.power_fraction;
  set.truth.run_seed = run_seed;
  set.truth.tone_hz.resize(ns);
  const int ref = cfg.reference_index();
  for (std::size_t i = 0; i < ns; ++i) {
    set.truth.tone_hz[i] =
        set.truth.start_hz + static_cast<double>(static_cast<int>(i) - ref) * cfg.faxion.step_hz;
  }

  set.spectra.resize(ns * nb);
  parallel_for(ns, cfg.threads, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, run_index, i + 1));
    auto means = set.expected_mean;
    add_tone(means, p, cfg, set.truth.tone_hz[i]);
    const auto row = synthesize_raw(means, cfg.subspectra, rng);
    std::copy(row.begin(), row.end(), set.spectra.begin() + static_cast<std::ptrdiff_t>(i * nb));
  });
  return set;
}

VisibilityProfile make_visibility_profile(const NetworkParams& p, const SynthConfig& cfg) {
  const auto mean = mean_power_profile(p, cfg);
  VisibilityProfile v;
  v.half_bins = mean.size();
  v.bin_width_hz = cfg.bin_width_hz;
  v.lo_offset_hz = cfg.lo_offset_hz;
  v.values.resize(2 * v.half_bins - 1);
  for (std::size_t j = 0; j < v.values.size(); ++j) {
    const auto k = static_cast<std::size_t>(
        std::abs(static_cast<long>(j) - static_cast<long>(v.half_bins - 1)));
    v.values[j] = signal_response(p, hz_to_rad(v.offset_hz(j))) / mean[k];
  }
  return v;
}

}  // namespace ssr
