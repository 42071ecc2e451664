#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssr/axion.hpp"
#include "ssr/network.hpp"
#include "ssr/pipeline.hpp"
#include "ssr/scan_rate.hpp"
#include "ssr/synth.hpp"

namespace ssr {

enum class Scale { kDesk, kFull };

/// Thresholds applied by --check mode.
struct ChecksConfig {
  double consistency_sigma = 2.0;  // |E_m - E_t| <= this many standard errors
  std::optional<double> em_min;
  std::optional<double> em_max;
  std::optional<double> max_em_standard_error;
  double min_retained_fraction = 0.99;
};

struct ExperimentConfig {
  Scale scale = Scale::kDesk;
  NetworkParams squeezed;
  NetworkParams unsqueezed;
  SynthConfig synth;
  PipelineConfig pipeline;
  ScanConfig scan;
  std::optional<HaloscopePhysical> axion_physical;
  int repetitions = 20;
  std::uint64_t seed = 1;
  std::string output_dir = "runs";
  unsigned threads = 1;
  bool persist_repetitions = false;  // write per-repetition stage stats
  double max_failed_fraction = 0.05;
  ChecksConfig checks;

  void validate() const;
  /// Non-fatal notes, e.g. the two configurations differing in more than
  /// (G_s, kappa_m).
  std::vector<std::string> warnings() const;
};

/// Built-in defaults for the two scales.
ExperimentConfig default_config(Scale scale);

struct RepetitionRecord {
  int index = 0;
  std::uint64_t seed_squeezed = 0;
  std::uint64_t seed_unsqueezed = 0;
  double power_squeezed = 0.0;    // grand-spectrum excess at the truth bin, sigma_g
  double power_unsqueezed = 0.0;
  double truth_squeezed_hz = 0.0;
  double truth_unsqueezed_hz = 0.0;
  StageStats stats_squeezed;
  StageStats stats_unsqueezed;
  bool ok = true;
  std::string error;
};

struct MeanEstimate {
  double mean = 0.0;
  double sd = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

MeanEstimate estimate_mean(const std::vector<double>& values);

struct RatioEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// E_m = (mu_s / mu_u)^2 with first-order error propagation of two
/// independent means.
RatioEstimate scan_rate_ratio(const MeanEstimate& squeezed, const MeanEstimate& unsqueezed);

struct CampaignResult {
  std::vector<RepetitionRecord> repetitions;
  MeanEstimate mu_s;
  MeanEstimate mu_u;
  RatioEstimate E_m;
  double E_t = 0.0;
  double sigma_g_squeezed = 0.0;    // mean raw grand-spectrum spread
  double sigma_g_unsqueezed = 0.0;
  std::size_t failed = 0;
  bool failed_campaign = false;
  std::string failure_reason;
  double wall_seconds = 0.0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
};

/// Synthesizes and analyses `repetitions` runs of each configuration and
/// aggregates the faxion powers. Repetitions run on cfg.threads workers with
/// sub-seeds derived from (seed, repetition); the result does not depend on
/// the worker count. Failing repetitions are recorded and excluded; more than
/// max_failed_fraction failures mark the campaign failed.
CampaignResult run_campaign(const ExperimentConfig& cfg);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckOutcome> evaluate_checks(const ExperimentConfig& cfg, const CampaignResult& r);

/// Writes manifest.json, results.json, faxion_powers.csv, timing.json and
/// faxion_powers.svg into `dir`.
void write_campaign(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    const CampaignResult& r);

/// Version string of the library.
std::string version_string();

}  // namespace ssr
