#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

namespace ssr {

/// Port index convention used by every matrix in the library.
enum Port : int { kMeasurement = 0, kLoss = 1, kSignal = 2 };

using ComplexMatrix3 = Eigen::Matrix3cd;
using RealMatrix3 = Eigen::Matrix3d;

/// Single-quadrature spectral densities in photons (quanta / s / Hz). The
/// matrix is Hermitian; its diagonal is real and non-negative.
using SpectralDensityMatrix = Eigen::Matrix3cd;

/// Rates, gains, occupancies and efficiencies of the squeezer -> loss ->
/// cavity -> loss -> amplifier chain. Rates are angular (rad/s); all spectra
/// are evaluated at a detuning from the cavity resonance in the rotating frame.
struct NetworkParams {
  double kappa_m = 0.0;   // measurement-port coupling, rad/s
  double kappa_l = 0.0;   // internal loss rate, rad/s
  double kappa_a = 0.0;   // signal-port coupling, rad/s
  double omega_c = 0.0;   // cavity resonance, rad/s (bookkeeping only)
  double n_T = 0.0;       // thermal occupancy at the measurement and loss ports
  double n_A = 0.0;       // fictitious generator occupancy
  double G_s = 1.0;       // squeezer single-quadrature power gain (linear)
  double G_a = 1.0;       // amplifier single-quadrature power gain (linear)
  double lambda_t = 1.0;  // single-sided power transmission efficiency

  double kappa_total() const { return kappa_m + kappa_l + kappa_a; }
  double eta() const { return lambda_t * lambda_t; }
  double vacuum() const { return n_T + 0.5; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Non-fatal diagnostics, e.g. kappa_a not small compared to the other
  /// rates (the closed forms assume kappa_a << min(kappa_m, kappa_l)).
  std::vector<std::string> warnings() const;

  NetworkParams with_gain(double gs) const {
    auto p = *this;
    p.G_s = gs;
    return p;
  }
  NetworkParams with_coupling(double km) const {
    auto p = *this;
    p.kappa_m = km;
    return p;
  }
  NetworkParams with_eta(double eta_value) const;
};

/// Ratio above which kappa_a is reported as violating the weak-coupling regime.
inline constexpr double kWeakCouplingRatio = 1e-2;

/// Cavity susceptibility chi_jk(w) = [-sqrt(k_j k_k) + (k_T/2 + i w) d_jk] /
/// (k_T/2 + i w), exact in kappa_a. Throws ConfigError for non-finite omega.
ComplexMatrix3 susceptibility(const NetworkParams& p, double omega);

struct StageMatrices {
  RealMatrix3 squeezer;     // S_X
  RealMatrix3 loss;         // L_X
  RealMatrix3 amplifier;    // A_X
  RealMatrix3 added_noise;  // N_X, vacuum admitted by each lossy segment
};

StageMatrices build_stage_matrices(const NetworkParams& p);

/// Input spectral density diag(n_T + 1/2, n_T + 1/2, n_A + 1/2).
RealMatrix3 input_density(const NetworkParams& p);

/// Spectral density at the squeezer -> cavity interface (after the first
/// lossy segment).
RealMatrix3 cavity_input_density(const NetworkParams& p);

/// Full output spectral density matrix from the cascaded stage matrices.
SpectralDensityMatrix output_density(const NetworkParams& p, double omega);

/// (m, m) entry of output_density, evaluated directly from the susceptibility
/// magnitudes. Same value as output_density(p, w)(0, 0) without the matrix
/// products.
double measurement_density(const NetworkParams& p, double omega);

/// Closed-form (m, m) density in the weak-signal-coupling approximation
/// (kappa_a dropped from B and beta).
double measurement_density_approx(const NetworkParams& p, double omega);

/// B(w) = (k_m + k_l)^2 / 4 + w^2.
inline double bandwidth_term(const NetworkParams& p, double omega) {
  const double s = p.kappa_m + p.kappa_l;
  return 0.25 * s * s + omega * omega;
}

/// beta(w) = (k_m - k_l)^2 / 4 + w^2.
inline double mismatch_term(const NetworkParams& p, double omega) {
  const double d = p.kappa_m - p.kappa_l;
  return 0.25 * d * d + omega * omega;
}

/// Signal visibility alpha(w) with symmetric transmission loss, in the
/// weak-signal-coupling approximation. Throws ConfigError if n_A <= 0.
double visibility(const NetworkParams& p, double omega);

/// Signal-to-noise density ratio from the exact matrix product: the n_A
/// dependent part of the (m, m) density over the density at n_A = 0.
double visibility_exact(const NetworkParams& p, double omega);

/// alpha(0) evaluated at kappa_m = kappa_l with the same loss and gains.
double visibility_peak_reference(const NetworkParams& p);

/// Noise spectral density ratio (squeezer on / off) in dB far from the
/// cavity: 10 log10(eta / G_s + 1 - eta).
double expected_squeezing_db(double eta, double G_s);

}  // namespace ssr
