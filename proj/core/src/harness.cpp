#include "ssr/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ssr/config_io.hpp"
#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"
#include "ssr/run_io.hpp"
#include "ssr/svg_plot.hpp"

#ifndef SSR_VERSION_STRING
#define SSR_VERSION_STRING "0.0.0"
#endif

namespace ssr {

namespace fs = std::filesystem;

std::string version_string() { return SSR_VERSION_STRING; }

ExperimentConfig default_config(Scale scale) {
  ExperimentConfig c;
  c.scale = scale;

  NetworkParams base;
  base.kappa_l = hz_to_rad(100e3);
  base.kappa_m = base.kappa_l;
  base.kappa_a = hz_to_rad(100.0);
  base.omega_c = hz_to_rad(7.146e9);
  base.n_T = 0.0;
  base.n_A = 1.0;
  base.G_a = db_to_linear(25.0);
  base = base.with_eta(0.69);
  c.squeezed = base.with_coupling(10.0 * base.kappa_l).with_gain(db_to_linear(13.0));
  c.unsqueezed = base.with_coupling(1.5 * base.kappa_l).with_gain(1.0);

  c.scan.delta_a_hz = 9e3;
  c.seed = 20190813;
  if (scale == Scale::kDesk) {
    c.repetitions = 20;
    c.synth.n_spectra = 101;
    c.synth.faxion.step_hz = -40e3;
    c.synth.faxion.power_fraction = 0.8;
    c.output_dir = "runs/desk";
  } else {
    c.repetitions = 200;
    c.synth.n_spectra = 401;
    c.synth.faxion.step_hz = -10e3;
    c.synth.faxion.power_fraction = 0.01;
    c.output_dir = "runs/full";
    c.checks.em_min = 1.9;
    c.checks.em_max = 2.35;
  }
  c.pipeline.tuning_shift_hz = -c.synth.faxion.step_hz;
  return c;
}

void ExperimentConfig::validate() const {
  if (repetitions < 2) throw ConfigError("config.repetitions must be >= 2");
  squeezed.validate();
  unsqueezed.validate();
  synth.validate();
  pipeline.validate();
  scan.validate();
  if (axion_physical) axion_physical->validate();
  const double step = synth.faxion.step_hz;
  if (std::abs(pipeline.tuning_shift_hz + step) > 1e-9 * std::max(1.0, std::abs(step))) {
    throw ConfigError("pipeline.tuning_shift_hz must equal -synth.faxion.step_hz");
  }
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0)) {
    throw ConfigError("config.max_failed_fraction must lie in [0, 1]");
  }
  if (!(checks.consistency_sigma > 0.0)) throw ConfigError("checks.consistency_sigma must be > 0");
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> out;
  const auto& a = squeezed;
  const auto& b = unsqueezed;
  if (a.kappa_l != b.kappa_l || a.kappa_a != b.kappa_a || a.n_T != b.n_T ||
      a.lambda_t != b.lambda_t || a.G_a != b.G_a) {
    out.push_back("squeezed and unsqueezed configurations differ in more than (G_s, kappa_m)");
  }
  for (const auto& w : a.warnings()) out.push_back("squeezed: " + w);
  for (const auto& w : b.warnings()) out.push_back("unsqueezed: " + w);
  return out;
}

MeanEstimate estimate_mean(const std::vector<double>& values) {
  MeanEstimate m;
  m.count = values.size();
  if (values.empty()) return m;
  const auto s = sample_moments(values);
  m.mean = s.mean;
  m.sd = s.stddev;
  m.standard_error = values.size() > 1 ? s.stddev / std::sqrt(static_cast<double>(values.size())) : 0.0;
  return m;
}

RatioEstimate scan_rate_ratio(const MeanEstimate& squeezed, const MeanEstimate& unsqueezed) {
  RatioEstimate r;
  if (unsqueezed.mean == 0.0) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.standard_error = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double q = squeezed.mean / unsqueezed.mean;
  r.value = q * q;
  const double rs = squeezed.mean != 0.0 ? squeezed.standard_error / squeezed.mean : 0.0;
  const double ru = unsqueezed.standard_error / unsqueezed.mean;
  r.standard_error = 2.0 * r.value * std::sqrt(rs * rs + ru * ru);
  return r;
}

namespace {

struct SingleRun {
  double power = 0.0;
  double truth_hz = 0.0;
  StageStats stats;
  PipelineResult result;
};

SingleRun analyse(const NetworkParams& p, const ExperimentConfig& cfg, std::uint64_t seed) {
  SynthConfig sc = cfg.synth;
  sc.seed = seed;
  sc.threads = 1;
  PipelineConfig pc = cfg.pipeline;
  pc.threads = 1;
  const auto raw = synthesize_run(p, sc, 0);
  SingleRun out;
  out.result = run_pipeline(raw, pc);
  out.truth_hz = raw.truth.start_hz;
  out.power = measure_faxion(out.result.grand, raw.truth.start_hz);
  out.stats = out.result.stats;
  return out;
}

NetworkParams with_signal(NetworkParams p) {
  if (!(p.n_A > 0.0)) p.n_A = 1.0;
  return p;
}

Json stats_to_json(const StageStats& s) {
  Json j{{"retained_fraction", s.retained_fraction}, {"sigma_p", s.sigma_p},
         {"sigma_g", s.sigma_g}, {"grand_bins", s.grand_bins}};
  return j;
}

}  // namespace

CampaignResult run_campaign(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  CampaignResult r;
  r.seed = cfg.seed;
  r.config_hash = config_hash(cfg);
  r.version = version_string();
  r.E_t = compare_configs(with_signal(cfg.squeezed), with_signal(cfg.unsqueezed), cfg.scan);

  const auto n = static_cast<std::size_t>(cfg.repetitions);
  r.repetitions.resize(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    auto& rec = r.repetitions[i];
    rec.index = static_cast<int>(i);
    rec.seed_squeezed = derive_seed(cfg.seed, i, 1);
    rec.seed_unsqueezed = derive_seed(cfg.seed, i, 2);
    try {
      const auto s = analyse(cfg.squeezed, cfg, rec.seed_squeezed);
      const auto u = analyse(cfg.unsqueezed, cfg, rec.seed_unsqueezed);
      rec.power_squeezed = s.power;
      rec.power_unsqueezed = u.power;
      rec.truth_squeezed_hz = s.truth_hz;
      rec.truth_unsqueezed_hz = u.truth_hz;
      rec.stats_squeezed = s.stats;
      rec.stats_unsqueezed = u.stats;
      if (cfg.persist_repetitions) {
        std::ostringstream name;
        name << "rep_" << std::setw(4) << std::setfill('0') << i;
        const fs::path dir = fs::path(cfg.output_dir) / name.str();
        write_pipeline_result(dir / "squeezed", s.result);
        write_pipeline_result(dir / "unsqueezed", u.result);
      }
    } catch (const Error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });

  std::vector<double> ps, pu;
  double gs = 0.0, gu = 0.0;
  for (const auto& rec : r.repetitions) {
    if (!rec.ok) {
      ++r.failed;
      continue;
    }
    ps.push_back(rec.power_squeezed);
    pu.push_back(rec.power_unsqueezed);
    gs += rec.stats_squeezed.sigma_g;
    gu += rec.stats_unsqueezed.sigma_g;
  }
  r.mu_s = estimate_mean(ps);
  r.mu_u = estimate_mean(pu);
  if (!ps.empty()) {
    r.sigma_g_squeezed = gs / static_cast<double>(ps.size());
    r.sigma_g_unsqueezed = gu / static_cast<double>(pu.size());
  }
  r.E_m = scan_rate_ratio(r.mu_s, r.mu_u);
  const double failed_fraction = static_cast<double>(r.failed) / static_cast<double>(n);
  if (failed_fraction > cfg.max_failed_fraction || ps.size() < 2) {
    r.failed_campaign = true;
    std::ostringstream os;
    os << r.failed << " of " << n << " repetitions failed (limit "
       << cfg.max_failed_fraction * 100.0 << "%)";
    r.failure_reason = os.str();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CheckOutcome> evaluate_checks(const ExperimentConfig& cfg, const CampaignResult& r) {
  std::vector<CheckOutcome> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  std::ostringstream os;
  add("campaign completed", !r.failed_campaign,
      r.failed_campaign ? r.failure_reason : std::to_string(r.failed) + " failed repetitions");

  const double diff = std::abs(r.E_m.value - r.E_t);
  const double allowed = cfg.checks.consistency_sigma * r.E_m.standard_error;
  os << "E_m " << r.E_m.value << " +- " << r.E_m.standard_error << " vs E_t " << r.E_t
     << " (|diff| " << diff << ", allowed " << allowed << ")";
  add("E_m consistent with E_t", std::isfinite(diff) && diff <= allowed, os.str());

  if (cfg.checks.em_min || cfg.checks.em_max) {
    const double lo = cfg.checks.em_min.value_or(-INFINITY);
    const double hi = cfg.checks.em_max.value_or(INFINITY);
    std::ostringstream d;
    d << "E_m " << r.E_m.value << " in [" << lo << ", " << hi << "]";
    add("E_m within range", r.E_m.value >= lo && r.E_m.value <= hi, d.str());
  }
  if (cfg.checks.max_em_standard_error) {
    std::ostringstream d;
    d << "standard error " << r.E_m.standard_error << " <= " << *cfg.checks.max_em_standard_error;
    add("E_m precision", r.E_m.standard_error <= *cfg.checks.max_em_standard_error, d.str());
  }
  double worst = 1.0;
  for (const auto& rec : r.repetitions) {
    if (!rec.ok) continue;
    worst = std::min({worst, rec.stats_squeezed.retained_fraction, rec.stats_unsqueezed.retained_fraction});
  }
  std::ostringstream d;
  d << "lowest retained fraction " << worst;
  add("bin retention", worst >= cfg.checks.min_retained_fraction, d.str());
  return out;
}

void write_campaign(const fs::path& dir, const ExperimentConfig& cfg, const CampaignResult& r) {
  fs::create_directories(dir);
  Json reps = Json::array();
  for (const auto& rec : r.repetitions) {
    reps.push_back({{"index", rec.index},
                    {"seed_squeezed", rec.seed_squeezed},
                    {"seed_unsqueezed", rec.seed_unsqueezed}});
  }
  write_json_file(dir / "manifest.json",
                  Json{{"version", r.version},
                       {"config_hash", hex64(r.config_hash)},
                       {"seed", r.seed},
                       {"repetitions", reps},
                       {"config", to_json(cfg)}});

  auto mean_json = [](const MeanEstimate& m) {
    return Json{{"mean", m.mean}, {"sd", m.sd}, {"standard_error", m.standard_error}, {"count", m.count}};
  };
  Json per_rep = Json::array();
  for (const auto& rec : r.repetitions) {
    Json j{{"index", rec.index}, {"ok", rec.ok}};
    if (rec.ok) {
      j["power_squeezed"] = rec.power_squeezed;
      j["power_unsqueezed"] = rec.power_unsqueezed;
      j["truth_squeezed_hz"] = rec.truth_squeezed_hz;
      j["truth_unsqueezed_hz"] = rec.truth_unsqueezed_hz;
      j["stats_squeezed"] = stats_to_json(rec.stats_squeezed);
      j["stats_unsqueezed"] = stats_to_json(rec.stats_unsqueezed);
    } else {
      j["error"] = rec.error;
    }
    per_rep.push_back(j);
  }
  write_json_file(dir / "results.json",
                  Json{{"mu_s", mean_json(r.mu_s)},
                       {"mu_u", mean_json(r.mu_u)},
                       {"E_m", {{"value", r.E_m.value}, {"standard_error", r.E_m.standard_error}}},
                       {"E_t", r.E_t},
                       {"sigma_g_squeezed", r.sigma_g_squeezed},
                       {"sigma_g_unsqueezed", r.sigma_g_unsqueezed},
                       {"failed_repetitions", r.failed},
                       {"failed_campaign", r.failed_campaign},
                       {"failure_reason", r.failure_reason},
                       {"repetitions", per_rep}});
  write_json_file(dir / "timing.json", Json{{"wall_seconds", r.wall_seconds}, {"threads", cfg.threads}});

  std::ofstream csv(dir / "faxion_powers.csv");
  csv.precision(17);
  csv << "repetition,seed_squeezed,seed_unsqueezed,power_squeezed,power_unsqueezed,status\n";
  std::vector<double> ps, pu;
  for (const auto& rec : r.repetitions) {
    csv << rec.index << ',' << rec.seed_squeezed << ',' << rec.seed_unsqueezed << ',';
    if (rec.ok) {
      csv << rec.power_squeezed << ',' << rec.power_unsqueezed << ",ok\n";
      ps.push_back(rec.power_squeezed);
      pu.push_back(rec.power_unsqueezed);
    } else {
      csv << ",,failed\n";
    }
  }
  if (!ps.empty()) {
    double lo = -4.0, hi = 4.0;
    for (double v : ps) { lo = std::min(lo, std::floor(v)); hi = std::max(hi, std::ceil(v) + 1.0); }
    for (double v : pu) { lo = std::min(lo, std::floor(v)); hi = std::max(hi, std::ceil(v) + 1.0); }
    const int bins = std::max(10, static_cast<int>(2 * (hi - lo)));
    PlotSpec spec{"Faxion power distributions", "grand-spectrum excess (sigma_g)", "repetitions"};
    write_text_file(dir / "faxion_powers.svg",
                    svg_line_plot(spec, {histogram_series(ps, bins, lo, hi, "squeezed"),
                                         histogram_series(pu, bins, lo, hi, "unsqueezed")}));
  }
}

}  // namespace ssr
