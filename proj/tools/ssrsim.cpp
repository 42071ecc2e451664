// ssrsim: command-line front end for the squeezed-state receiver simulator.
//
// Exit status: 0 success, 2 configuration error, 3 numerical error,
// 4 threshold failure in --check mode.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ssr/axion.hpp"
#include "ssr/config_io.hpp"
#include "ssr/errors.hpp"
#include "ssr/harness.hpp"
#include "ssr/pipeline.hpp"
#include "ssr/run_io.hpp"
#include "ssr/scan_rate.hpp"
#include "ssr/svg_plot.hpp"
#include "ssr/synth.hpp"
#include "ssr/theory_report.hpp"

namespace fs = std::filesystem;
using namespace ssr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool dump_stages = false;
  bool check = false;
  std::optional<unsigned> threads;
  // subcommand specific
  double eta = 0.69;
  std::string which = "squeezed";
  std::string in;
  double span_hz = 4e6;
  int points = 801;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? default_config(Scale::kDesk) : load_experiment_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << '\n';
  return cfg;
}

fs::path out_dir(const Options& o, const ExperimentConfig& cfg) {
  return o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
}

const NetworkParams& pick(const ExperimentConfig& cfg, const std::string& which) {
  if (which == "squeezed") return cfg.squeezed;
  if (which == "unsqueezed") return cfg.unsqueezed;
  throw ConfigError("--which must be squeezed or unsqueezed");
}

NetworkParams with_signal(NetworkParams p) {
  if (!(p.n_A > 0.0)) p.n_A = 1.0;
  return p;
}

int report(const std::vector<CheckOutcome>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? 0 : kExitCheck;
}

int cmd_visibility(const Options& o) {
  const auto cfg = load(o);
  const auto sq = with_signal(cfg.squeezed);
  const auto un = with_signal(cfg.unsqueezed);
  const double peak_s = visibility_peak_reference(sq);
  const double peak_u = visibility_peak_reference(un);
  std::ostringstream csv;
  csv.precision(12);
  csv << "detuning_hz,alpha_squeezed,alpha_unsqueezed,alpha_squeezed_norm,alpha_unsqueezed_norm\n";
  for (int i = 0; i < o.points; ++i) {
    const double f = -0.5 * o.span_hz + o.span_hz * i / std::max(1, o.points - 1);
    const double as = visibility(sq, hz_to_rad(f));
    const double au = visibility(un, hz_to_rad(f));
    csv << f << ',' << as << ',' << au << ',' << as / peak_s << ',' << au / peak_u << '\n';
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(fs::path(o.out) / "visibility.csv", csv.str());
  }
  std::cerr << "E_t (squeezed / unsqueezed) = " << compare_configs(sq, un, cfg.scan) << '\n';
  return 0;
}

int cmd_grid(const Options& o) {
  const auto cfg = load(o);
  if (!(o.eta >= 0.0 && o.eta <= 1.0)) throw ConfigError("--eta must lie in [0, 1]");
  const auto gains = default_gain_axis();
  const auto ratios = default_coupling_axis();
  const auto grid = enhancement_grid(o.eta, gains, ratios, with_signal(cfg.squeezed), cfg.scan, cfg.threads);
  if (o.out.empty()) {
    std::cout << grid.to_csv();
  } else {
    std::ostringstream name;
    name << "grid_eta_" << o.eta << ".csv";
    write_text_file(fs::path(o.out) / name.str(), grid.to_csv());
  }
  if (!o.check) return 0;
  std::vector<CheckOutcome> checks;
  for (std::size_t i = 0; i < grid.gains.size(); ++i) {
    for (std::size_t j = 0; j < grid.coupling_ratios.size(); ++j) {
      if (!grid.valid(i, j)) checks.push_back({"grid cell valid", false, grid.cell_errors[i * grid.coupling_ratios.size() + j]});
    }
  }
  checks.push_back({"grid complete", checks.empty(), std::to_string(grid.values.size()) + " cells"});
  return report(checks);
}

int cmd_axion(const Options& o) {
  const auto cfg = load(o);
  const HaloscopePhysical phys = cfg.axion_physical.value_or(HaloscopePhysical{});
  const auto m = model_params(phys);
  NetworkParams p = cfg.unsqueezed;
  p.kappa_m = p.kappa_l;
  p.kappa_a = m.kappa_a;
  p.n_A = m.n_A;
  const auto limit = validate_classical_limit(p, phys.delta_a_hz);
  Json checks = Json::array();
  for (const auto& c : limit.checks) {
    checks.push_back({{"name", c.name}, {"ratio", c.ratio}, {"status", to_string(c.status)}});
  }
  Json j{{"axion_physical", to_json(phys)},
         {"model", {{"n_A", m.n_A}, {"kappa_a_rad_s", m.kappa_a}, {"kappa_a_hz", rad_to_hz(m.kappa_a)}, {"N_A", m.N_A}}},
         {"signal_power_w_critical", signal_power(p, phys.delta_a_hz, phys.omega_a)},
         {"classical_limit", checks},
         {"classical_limit_ok", limit.ok()}};
  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(fs::path(o.out) / "axion_params.json", j);
  }
  if (o.check && !limit.ok()) return kExitCheck;
  return 0;
}

int cmd_synth(const Options& o) {
  const auto cfg = load(o);
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  const auto raw = synthesize_run(pick(cfg, o.which), sc, 0);
  const fs::path dir = out_dir(o, cfg);
  write_run(dir, raw);
  std::cerr << "wrote " << raw.n_spectra() << " spectra x " << raw.n_bins() << " bins to " << dir
            << " (truth " << raw.truth.start_hz << " Hz)\n";
  return 0;
}

int cmd_pipeline(const Options& o) {
  if (o.in.empty()) throw ConfigError("pipeline: --in RUN_DIR is required");
  const auto cfg = load(o);
  const auto raw = read_run(o.in);
  PipelineConfig pc = cfg.pipeline;
  pc.threads = cfg.threads;
  pc.tuning_shift_hz = -raw.config.faxion.step_hz;
  PipelineDump dump;
  dump.keep_processed = true;
  const auto result = run_pipeline(raw, pc, &dump);
  const fs::path dir = o.out.empty() ? fs::path(o.in) : fs::path(o.out);
  write_pipeline_result(dir, result);
  if (o.dump_stages) {
    write_pipeline_dump(dir, dump, raw.n_spectra());
  } else {
    PipelineDump processed_only;
    processed_only.processed = std::move(dump.processed);
    processed_only.mean_spectrum = std::move(dump.mean_spectrum);
    processed_only.profile = std::move(dump.profile);
    processed_only.keep = std::move(dump.keep);
    processed_only.baseline = std::move(dump.baseline);
    write_pipeline_dump(dir, processed_only, raw.n_spectra());
    for (const char* f : {"stage_mean.csv", "stage_combined.csv", "stage_rebinned.csv"}) fs::remove(dir / f);
  }
  const auto& st = result.stats;
  std::cerr << "retained " << st.retained_fraction << ", sigma_p " << st.sigma_p << ", sigma_g "
            << st.sigma_g;
  if (st.faxion_excess) std::cerr << ", faxion excess " << *st.faxion_excess << " sigma";
  std::cerr << '\n';
  if (!o.check) return 0;
  return report({{"bin retention", st.retained_fraction >= cfg.checks.min_retained_fraction,
                  std::to_string(st.retained_fraction)}});
}

int cmd_campaign(const Options& o) {
  const auto cfg = load(o);
  const auto r = run_campaign(cfg);
  const fs::path dir = out_dir(o, cfg);
  write_campaign(dir, cfg, r);
  std::cout.precision(4);
  std::cout << "mu_s = " << r.mu_s.mean << " +- " << r.mu_s.standard_error << ", mu_u = " << r.mu_u.mean
            << " +- " << r.mu_u.standard_error << ", E_m = " << r.E_m.value << " +- "
            << r.E_m.standard_error << ", E_t = " << r.E_t << " (" << r.failed << " failed, "
            << r.wall_seconds << " s)\n";
  if (r.failed_campaign) {
    std::cerr << "campaign failed: " << r.failure_reason << '\n';
    for (const auto& rec : r.repetitions) {
      if (!rec.ok) std::cerr << "  repetition " << rec.index << ": " << rec.error << '\n';
    }
    return kExitNumerical;
  }
  if (!o.check) return 0;
  return report(evaluate_checks(cfg, r));
}

int cmd_theory(const Options& o) {
  const auto cfg = load(o);
  const auto r = theory_report(cfg, cfg.threads);
  const fs::path dir = o.out.empty() ? fs::path(cfg.output_dir) / "theory" : fs::path(o.out);
  write_theory_report(dir, r);
  std::cout.precision(4);
  std::cout << "E_t = " << r.E_t << ", near-critical squeezed = " << r.E_near_critical
            << ", overcoupled unsqueezed = " << r.E_overcoupled << ", best at eta "
            << r.high_efficiency_eta << " = " << r.high_efficiency_max << " (G_s "
            << r.high_efficiency_gain << "), expected squeezing " << r.expected_squeezing_db
            << " dB\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-state receiver haloscope simulator"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--seed", o.seed, "Override the configuration seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
    sub->add_flag("--dump-stages", o.dump_stages, "Write every intermediate stage");
    sub->add_flag("--check", o.check, "Compare results against configured thresholds");
  };
  auto* vis = app.add_subcommand("visibility", "Tabulate alpha(w) for both configurations");
  common(vis);
  vis->add_option("--span-hz", o.span_hz, "Total detuning span");
  vis->add_option("--points", o.points, "Number of detuning points");
  auto* grid = app.add_subcommand("scanrate-grid", "Scan-rate enhancement landscape");
  common(grid);
  grid->add_option("--eta", o.eta, "Transmission efficiency");
  auto* ax = app.add_subcommand("axion-params", "Model parameters from physical axion inputs");
  common(ax);
  auto* syn = app.add_subcommand("synth", "Synthesize one acquisition run");
  common(syn);
  syn->add_option("--which", o.which, "squeezed or unsqueezed");
  auto* pipe = app.add_subcommand("pipeline", "Process a run directory into a grand spectrum");
  common(pipe);
  pipe->add_option("--in", o.in, "Run directory written by synth");
  auto* camp = app.add_subcommand("campaign", "Monte Carlo campaign over both configurations");
  common(camp);
  auto* theory = app.add_subcommand("theory-report", "Analytic curves, grids and enhancements");
  common(theory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*vis) return cmd_visibility(o);
    if (*grid) return cmd_grid(o);
    if (*ax) return cmd_axion(o);
    if (*syn) return cmd_synth(o);
    if (*pipe) return cmd_pipeline(o);
    if (*camp) return cmd_campaign(o);
    if (*theory) return cmd_theory(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
