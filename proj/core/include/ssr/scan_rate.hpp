#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssr/network.hpp"

namespace ssr {

/// Parameters of the tuning protocol that turn visibilities into scan rates.
struct ScanConfig {
  double delta_a_hz = 9e3;  // signal linewidth
  double target_snr = 5.0;  // integrated SNR target
  /// Symmetric integration half-width in rad/s. Unset integrates over the
  /// whole real line through a tangent map scaled to the visibility width.
  std::optional<double> half_width;
  double rel_tol = 1e-8;

  void validate() const;
};

enum class VisibilityModel {
  kClosedForm,  // weak-signal-coupling closed form
  kExact,       // signal/noise split of the full matrix product
};

/// Single-step SNR sqrt(tau * delta_a) * alpha / 2 of a single-quadrature
/// measurement.
double snr_single_step(double alpha, double tau_s, double delta_a_hz);

struct IntegralResult {
  double value = 0.0;           // Hz
  double error_estimate = 0.0;  // absolute
};

/// Integral of alpha^2(w) dw / 2pi, in Hz, by adaptive Gauss-Kronrod
/// quadrature. Throws NumericalError when the requested tolerance is not met.
IntegralResult visibility_integral(const NetworkParams& p, const ScanConfig& cfg,
                                   VisibilityModel model = VisibilityModel::kClosedForm);

/// Spectral scan rate R = delta_a / (4 snr^2) * integral, in Hz/s.
double scan_rate(const NetworkParams& p, const ScanConfig& cfg,
                 VisibilityModel model = VisibilityModel::kClosedForm);

/// Closed-form lossless scan rate; only defined for lambda = 1.
double scan_rate_lossless_closed_form(const NetworkParams& p, const ScanConfig& cfg);

/// Scan-rate enhancement landscape, normalized by the unsqueezed
/// (G_s = 1, kappa_m = 2 kappa_l) integral at the same eta.
struct EnhancementGrid {
  std::vector<double> gains;            // G_s, linear
  std::vector<double> coupling_ratios;  // kappa_m / kappa_l
  std::vector<double> values;           // row-major [gain][coupling]; NaN if invalid
  std::vector<std::string> cell_errors; // empty string for valid cells
  double eta = 1.0;

  double at(std::size_t gain_index, std::size_t coupling_index) const {
    return values[gain_index * coupling_ratios.size() + coupling_index];
  }
  bool valid(std::size_t gain_index, std::size_t coupling_index) const {
    return cell_errors[gain_index * coupling_ratios.size() + coupling_index].empty();
  }
  /// CSV with header G_s,coupling_ratio,E_t; one row per cell.
  std::string to_csv() const;
};

EnhancementGrid enhancement_grid(double eta, std::span<const double> gains,
                                 std::span<const double> coupling_ratios,
                                 const NetworkParams& base, const ScanConfig& cfg,
                                 unsigned threads = 1);

/// kappa_m (rad/s) maximizing the scan rate, by golden-section search in
/// log kappa_m over [kappa_l / 10, 1e4 kappa_l].
double optimal_coupling(const NetworkParams& p, const ScanConfig& cfg);

struct QuadratureSnr {
  double single_quadrature = 0.0;
  double double_quadrature = 0.0;
};

/// SNR of ideal single- and double-quadrature measurements of the same
/// signal, given the double-quadrature visibility.
QuadratureSnr quadrature_equivalence(double tau_s, double delta_a_hz, double alpha_2q);

/// Ratio of visibility integrals (scan-rate enhancement of `squeezed` over
/// `reference`).
double compare_configs(const NetworkParams& squeezed, const NetworkParams& reference,
                       const ScanConfig& cfg,
                       VisibilityModel model = VisibilityModel::kClosedForm);

}  // namespace ssr
