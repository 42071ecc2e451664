#include "ssr/network.hpp"

#include <cmath>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void NetworkParams::validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("network parameters: " + what);
  };
  if (!(std::isfinite(kappa_m) && kappa_m > 0.0)) fail("kappa_m must be > 0");
  if (!(std::isfinite(kappa_l) && kappa_l > 0.0)) fail("kappa_l must be > 0");
  if (!finite_nonneg(kappa_a)) fail("kappa_a must be >= 0");
  if (!std::isfinite(omega_c)) fail("omega_c must be finite");
  if (!finite_nonneg(n_T)) fail("n_T must be >= 0");
  if (!finite_nonneg(n_A)) fail("n_A must be >= 0");
  if (!(std::isfinite(G_s) && G_s >= 1.0)) fail("G_s must be >= 1");
  if (!(std::isfinite(G_a) && G_a >= 1.0)) fail("G_a must be >= 1");
  if (!(std::isfinite(lambda_t) && lambda_t >= 0.0 && lambda_t <= 1.0)) {
    fail("lambda must lie in [0, 1]");
  }
}

std::vector<std::string> NetworkParams::warnings() const {
  std::vector<std::string> out;
  const double ratio = kappa_a / std::min(kappa_m, kappa_l);
  if (ratio > kWeakCouplingRatio) {
    std::ostringstream os;
    os << "kappa_a / min(kappa_m, kappa_l) = " << ratio
       << " exceeds " << kWeakCouplingRatio
       << "; closed-form visibility is outside its approximation regime";
    out.push_back(os.str());
  }
  return out;
}

NetworkParams NetworkParams::with_eta(double eta_value) const {
  auto p = *this;
  p.lambda_t = std::sqrt(eta_value);
  return p;
}

ComplexMatrix3 susceptibility(const NetworkParams& p, double omega) {
  if (!std::isfinite(omega)) throw ConfigError("susceptibility: non-finite detuning");
  const std::complex<double> denom(0.5 * p.kappa_total(), omega);
  const Eigen::Vector3d root(std::sqrt(p.kappa_m), std::sqrt(p.kappa_l),
                             std::sqrt(p.kappa_a));
  ComplexMatrix3 chi = ComplexMatrix3::Identity();
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      chi(j, k) -= root(j) * root(k) / denom;
    }
  }
  return chi;
}

StageMatrices build_stage_matrices(const NetworkParams& p) {
  StageMatrices s;
  s.squeezer = RealMatrix3::Identity();
  s.squeezer(kMeasurement, kMeasurement) = 1.0 / std::sqrt(p.G_s);
  s.loss = RealMatrix3::Identity();
  s.loss(kMeasurement, kMeasurement) = std::sqrt(p.lambda_t);
  s.amplifier = RealMatrix3::Identity();
  s.amplifier(kMeasurement, kMeasurement) = std::sqrt(p.G_a);
  s.added_noise = RealMatrix3::Zero();
  s.added_noise(kMeasurement, kMeasurement) = p.vacuum() * (1.0 - p.lambda_t);
  return s;
}

RealMatrix3 input_density(const NetworkParams& p) {
  RealMatrix3 in = RealMatrix3::Zero();
  in(kMeasurement, kMeasurement) = p.vacuum();
  in(kLoss, kLoss) = p.vacuum();
  in(kSignal, kSignal) = p.n_A + 0.5;
  return in;
}

RealMatrix3 cavity_input_density(const NetworkParams& p) {
  const auto st = build_stage_matrices(p);
  const RealMatrix3 ls = st.loss * st.squeezer;
  return ls * input_density(p) * ls.transpose() + st.added_noise;
}

SpectralDensityMatrix output_density(const NetworkParams& p, double omega) {
  const auto st = build_stage_matrices(p);
  const ComplexMatrix3 chi = susceptibility(p, omega);
  const ComplexMatrix3 sigma_i = cavity_input_density(p).cast<std::complex<double>>();
  const ComplexMatrix3 loss = st.loss.cast<std::complex<double>>();
  const ComplexMatrix3 amp = st.amplifier.cast<std::complex<double>>();
  const ComplexMatrix3 noise = st.added_noise.cast<std::complex<double>>();
  const ComplexMatrix3 after_cavity =
      loss.conjugate() * chi.conjugate() * sigma_i * chi.transpose() * loss.transpose() +
      noise;
  return amp.conjugate() * after_cavity * amp.transpose();
}

double measurement_density(const NetworkParams& p, double omega) {
  const double half = 0.5 * p.kappa_total();
  const double denom = half * half + omega * omega;
  const double reflect_re = half - p.kappa_m;
  const double chi_mm2 = (reflect_re * reflect_re + omega * omega) / denom;
  const double chi_ml2 = p.kappa_m * p.kappa_l / denom;
  const double chi_ma2 = p.kappa_m * p.kappa_a / denom;
  const double squeezed = p.vacuum() * (p.lambda_t / p.G_s + 1.0 - p.lambda_t);
  const double at_cavity = chi_mm2 * squeezed + chi_ml2 * p.vacuum() +
                           chi_ma2 * (p.n_A + 0.5);
  return p.G_a * (p.lambda_t * at_cavity + p.vacuum() * (1.0 - p.lambda_t));
}

double measurement_density_approx(const NetworkParams& p, double omega) {
  const double lam = p.lambda_t;
  const double b = bandwidth_term(p, omega);
  const double beta = mismatch_term(p, omega);
  const double cavity_term =
      (p.n_A + 0.5) * p.kappa_a * p.kappa_m +
      p.vacuum() * (p.kappa_l * p.kappa_m + (1.0 - lam + lam / p.G_s) * beta);
  return p.vacuum() * p.G_a * (1.0 - lam) + p.G_a * lam / b * cavity_term;
}

double visibility(const NetworkParams& p, double omega) {
  if (!(p.n_A > 0.0)) throw ConfigError("visibility: n_A must be > 0");
  const double lam = p.lambda_t;
  const double b = bandwidth_term(p, omega);
  const double beta = mismatch_term(p, omega);
  const double noise =
      b * (1.0 - lam) + lam * (p.kappa_l * p.kappa_m + (1.0 - lam + lam / p.G_s) * beta);
  return lam * p.n_A * p.kappa_a * p.kappa_m / (p.vacuum() * noise);
}

double visibility_exact(const NetworkParams& p, double omega) {
  if (!(p.n_A > 0.0)) throw ConfigError("visibility: n_A must be > 0");
  auto quiet = p;
  quiet.n_A = 0.0;
  const double noise = measurement_density(quiet, omega);
  return (measurement_density(p, omega) - noise) / noise;
}

double visibility_peak_reference(const NetworkParams& p) {
  return visibility(p.with_coupling(p.kappa_l), 0.0);
}

double expected_squeezing_db(double eta, double G_s) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("expected_squeezing: eta must lie in [0, 1]");
  if (!(G_s >= 1.0) || !std::isfinite(G_s)) throw ConfigError("expected_squeezing: G_s must be >= 1");
  return 10.0 * std::log10(eta / G_s + 1.0 - eta);
}

}  // namespace ssr
