#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ssr/harness.hpp"

namespace ssr {

struct VisibilityCase {
  std::string label;
  NetworkParams params;
  std::vector<double> normalized;  // alpha / alpha_max on the report detuning grid
};

struct OptimalCouplingRow {
  double eta = 1.0;
  double G_s = 1.0;
  double ratio = 0.0;  // kappa_m / kappa_l at the scan-rate optimum
};

struct TheoryReport {
  std::vector<double> detuning_hz;
  std::vector<VisibilityCase> cases;  // configured pair plus the two swapped pairings
  EnhancementGrid grid_lossless;
  EnhancementGrid grid_lossy;
  std::vector<OptimalCouplingRow> optimal;
  double E_t = 0.0;              // configured squeezed over unsqueezed
  double E_near_critical = 0.0;  // squeezing at the unsqueezed coupling
  double E_overcoupled = 0.0;    // no squeezing at the squeezed coupling
  double high_efficiency_eta = 0.91;
  double high_efficiency_max = 0.0;  // best enhancement over G_s at optimal coupling
  double high_efficiency_gain = 0.0;
  double expected_squeezing_db = 0.0;
};

/// Default enhancement-grid axes: 50 log-spaced points on each axis plus a
/// few anchor values (G_s = 25; kappa_m / kappa_l = 2, 5, 200).
std::vector<double> default_gain_axis();
std::vector<double> default_coupling_axis();

TheoryReport theory_report(const ExperimentConfig& cfg, unsigned threads = 1);

/// visibility_cases.csv, grid_eta_<eta>.csv, optimal_couplings.csv,
/// theory_summary.json and visibility_cases.svg.
void write_theory_report(const std::filesystem::path& dir, const TheoryReport& r);

}  // namespace ssr
