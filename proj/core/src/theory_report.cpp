#include "ssr/theory_report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssr/config_io.hpp"
#include "ssr/run_io.hpp"
#include "ssr/svg_plot.hpp"

namespace ssr {

namespace {

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return v;
}

std::vector<double> with_anchors(std::vector<double> axis, std::initializer_list<double> anchors) {
  for (double a : anchors) {
    const bool present = std::any_of(axis.begin(), axis.end(),
                                     [&](double x) { return std::abs(x - a) <= 1e-12 * a; });
    if (!present) axis.push_back(a);
  }
  std::sort(axis.begin(), axis.end());
  return axis;
}

NetworkParams with_signal(NetworkParams p) {
  if (!(p.n_A > 0.0)) p.n_A = 1.0;
  return p;
}

}  // namespace

std::vector<double> default_gain_axis() { return with_anchors(logspace(0.0, 2.0, 50), {25.0}); }

std::vector<double> default_coupling_axis() {
  return with_anchors(logspace(-0.5, 3.0, 50), {2.0, 5.0, 200.0});
}

TheoryReport theory_report(const ExperimentConfig& cfg, unsigned threads) {
  TheoryReport r;
  const auto sq = with_signal(cfg.squeezed);
  const auto un = with_signal(cfg.unsqueezed);

  VisibilityCase a{"squeezed, kappa_m/kappa_l = " + std::to_string(sq.kappa_m / sq.kappa_l), sq, {}};
  VisibilityCase b{"unsqueezed, kappa_m/kappa_l = " + std::to_string(un.kappa_m / un.kappa_l), un, {}};
  VisibilityCase c{"squeezed, kappa_m/kappa_l = " + std::to_string(un.kappa_m / un.kappa_l),
                   un.with_gain(sq.G_s), {}};
  VisibilityCase d{"unsqueezed, kappa_m/kappa_l = " + std::to_string(sq.kappa_m / sq.kappa_l),
                   sq.with_gain(1.0), {}};
  r.cases = {a, b, c, d};
  const int points = 401;
  const double span = 4.0 * rad_to_hz(sq.kappa_l) * 10.0;
  for (int i = 0; i < points; ++i) r.detuning_hz.push_back(-span / 2 + span * i / (points - 1));
  for (auto& vc : r.cases) {
    const double peak = visibility_peak_reference(vc.params);
    for (double f : r.detuning_hz) vc.normalized.push_back(visibility(vc.params, hz_to_rad(f)) / peak);
  }

  r.E_t = compare_configs(sq, un, cfg.scan);
  r.E_near_critical = compare_configs(r.cases[2].params, un, cfg.scan);
  r.E_overcoupled = compare_configs(r.cases[3].params, un, cfg.scan);

  const auto gains = default_gain_axis();
  const auto ratios = default_coupling_axis();
  r.grid_lossless = enhancement_grid(1.0, gains, ratios, sq, cfg.scan, threads);
  r.grid_lossy = enhancement_grid(sq.eta(), gains, ratios, sq, cfg.scan, threads);

  for (double eta : {1.0, sq.eta()}) {
    for (double gs : {1.0, sq.G_s, 100.0}) {
      const auto p = sq.with_eta(eta).with_gain(gs);
      r.optimal.push_back({eta, gs, optimal_coupling(p, cfg.scan) / p.kappa_l});
    }
  }

  const auto hp = sq.with_eta(r.high_efficiency_eta);
  const double reference = scan_rate(hp.with_gain(1.0).with_coupling(optimal_coupling(hp.with_gain(1.0), cfg.scan)),
                                     cfg.scan);
  for (double gs : logspace(0.0, 4.0, 41)) {
    const auto p = hp.with_gain(gs);
    const double e = scan_rate(p.with_coupling(optimal_coupling(p, cfg.scan)), cfg.scan) / reference;
    if (e > r.high_efficiency_max) {
      r.high_efficiency_max = e;
      r.high_efficiency_gain = gs;
    }
  }
  r.expected_squeezing_db = expected_squeezing_db(sq.eta(), sq.G_s);
  return r;
}

void write_theory_report(const std::filesystem::path& dir, const TheoryReport& r) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> header{"detuning_hz"};
  std::vector<std::span<const double>> cols{r.detuning_hz};
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    header.push_back("case_" + std::to_string(i + 1));
    cols.emplace_back(r.cases[i].normalized);
  }
  write_csv(dir / "visibility_cases.csv", header, cols);

  auto grid_name = [](const EnhancementGrid& g) {
    std::ostringstream os;
    os << "grid_eta_" << g.eta << ".csv";
    return os.str();
  };
  write_text_file(dir / grid_name(r.grid_lossless), r.grid_lossless.to_csv());
  write_text_file(dir / grid_name(r.grid_lossy), r.grid_lossy.to_csv());

  std::ostringstream opt;
  opt.precision(10);
  opt << "eta,G_s,optimal_coupling_ratio\n";
  for (const auto& row : r.optimal) opt << row.eta << ',' << row.G_s << ',' << row.ratio << '\n';
  write_text_file(dir / "optimal_couplings.csv", opt.str());

  Json cases = Json::array();
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    cases.push_back({{"column", "case_" + std::to_string(i + 1)},
                     {"label", r.cases[i].label},
                     {"network", to_json(r.cases[i].params)}});
  }
  write_json_file(dir / "theory_summary.json",
                  Json{{"E_t", r.E_t},
                       {"E_near_critical_squeezed", r.E_near_critical},
                       {"E_overcoupled_unsqueezed", r.E_overcoupled},
                       {"high_efficiency", {{"eta", r.high_efficiency_eta},
                                            {"max_enhancement", r.high_efficiency_max},
                                            {"at_G_s", r.high_efficiency_gain}}},
                       {"expected_squeezing_db", r.expected_squeezing_db},
                       {"cases", cases}});

  std::vector<PlotSeries> series;
  for (const auto& vc : r.cases) {
    PlotSeries s{vc.label, {}, vc.normalized};
    for (double f : r.detuning_hz) s.x.push_back(f / 1e6);
    series.push_back(std::move(s));
  }
  write_text_file(dir / "visibility_cases.svg",
                  svg_line_plot({"Normalized visibility", "detuning (MHz)", "alpha / alpha_max"}, series));
}

}  // namespace ssr
