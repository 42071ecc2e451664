#include "ssr/scan_rate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"

namespace ssr {

namespace {

// alpha(w) = K / (c0 + c2 w^2) for the closed-form visibility; the width
// sqrt(c0 / c2) sets the scale of the tangent map.
double visibility_width(const NetworkParams& p) {
  const double lam = p.lambda_t;
  const double squeeze = 1.0 - lam + lam / p.G_s;
  const double c0 = bandwidth_term(p, 0.0) * (1.0 - lam) +
                    lam * (p.kappa_l * p.kappa_m + squeeze * mismatch_term(p, 0.0));
  const double c2 = (1.0 - lam) + lam * squeeze;
  return std::sqrt(c0 / c2);
}

}  // namespace

void ScanConfig::validate() const {
  if (!(delta_a_hz > 0.0) || !std::isfinite(delta_a_hz)) {
    throw ConfigError("scan config: delta_a must be > 0");
  }
  if (!(target_snr > 0.0) || !std::isfinite(target_snr)) {
    throw ConfigError("scan config: target_snr must be > 0");
  }
  if (half_width && !(*half_width > 0.0)) {
    throw ConfigError("scan config: integration half-width must be > 0");
  }
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw ConfigError("scan config: rel_tol must lie in (0, 1)");
  }
}

double snr_single_step(double alpha, double tau_s, double delta_a_hz) {
  if (!(alpha > 0.0 && tau_s > 0.0 && delta_a_hz > 0.0)) {
    throw ConfigError("snr_single_step: inputs must be positive");
  }
  return std::sqrt(tau_s * delta_a_hz) * alpha / 2.0;
}

IntegralResult visibility_integral(const NetworkParams& p, const ScanConfig& cfg,
                                   VisibilityModel model) {
  p.validate();
  cfg.validate();
  if (!(p.n_A > 0.0)) throw ConfigError("visibility_integral: n_A must be > 0");
  const double width = visibility_width(p);
  const double theta_max =
      cfg.half_width ? std::atan(*cfg.half_width / width) : 0.5 * kPi;
  auto alpha = [&](double w) {
    return model == VisibilityModel::kExact ? visibility_exact(p, w) : visibility(p, w);
  };
  // w = width * tan(theta); alpha is even so integrate theta in [0, theta_max].
  auto integrand = [&](double theta) {
    if (theta >= 0.5 * kPi) return 0.0;
    const double c = std::cos(theta);
    const double a = alpha(width * std::tan(theta));
    return a * a * width / (c * c);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, theta_max, 20, cfg.rel_tol * 0.1, &error, &l1);
  if (!std::isfinite(half) || error > cfg.rel_tol * std::abs(half)) {
    std::ostringstream os;
    os << "visibility_integral: quadrature did not converge (value " << half
       << ", error estimate " << error << ", requested rel tol " << cfg.rel_tol
       << ", kappa_m " << p.kappa_m << ", G_s " << p.G_s << ")";
    throw NumericalError(os.str());
  }
  // Both halves of the line, then d(omega) / 2pi.
  return {2.0 * half / kTwoPi, 2.0 * error / kTwoPi};
}

double scan_rate(const NetworkParams& p, const ScanConfig& cfg, VisibilityModel model) {
  const auto integral = visibility_integral(p, cfg, model);
  return cfg.delta_a_hz / (4.0 * cfg.target_snr * cfg.target_snr) * integral.value;
}

double scan_rate_lossless_closed_form(const NetworkParams& p, const ScanConfig& cfg) {
  p.validate();
  cfg.validate();
  if (p.lambda_t != 1.0) {
    throw ConfigError("scan_rate_lossless_closed_form: requires lambda = 1");
  }
  const double half_diff = 0.5 * (p.kappa_l - p.kappa_m);
  const double core = p.kappa_l * p.kappa_m + half_diff * half_diff / p.G_s;
  const double num = cfg.delta_a_hz * std::sqrt(p.G_s) * p.n_A * p.n_A * p.kappa_a *
                     p.kappa_a * p.kappa_m * p.kappa_m;
  const double den = 16.0 * cfg.target_snr * cfg.target_snr * p.vacuum() * p.vacuum() *
                     std::pow(core, 1.5);
  return num / den;
}

std::string EnhancementGrid::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "G_s,coupling_ratio,E_t\n";
  for (std::size_t i = 0; i < gains.size(); ++i) {
    for (std::size_t j = 0; j < coupling_ratios.size(); ++j) {
      os << gains[i] << ',' << coupling_ratios[j] << ',';
      if (valid(i, j)) {
        os << at(i, j);
      } else {
        os << "nan";
      }
      os << '\n';
    }
  }
  return os.str();
}

EnhancementGrid enhancement_grid(double eta, std::span<const double> gains,
                                 std::span<const double> coupling_ratios,
                                 const NetworkParams& base, const ScanConfig& cfg,
                                 unsigned threads) {
  if (gains.empty() || coupling_ratios.empty()) {
    throw ConfigError("enhancement_grid: axes must be nonempty");
  }
  auto ascending = [](std::span<const double> axis) {
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) return false;
    }
    return true;
  };
  if (!ascending(gains) || !ascending(coupling_ratios)) {
    throw ConfigError("enhancement_grid: axes must be strictly ascending");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("enhancement_grid: eta must lie in [0, 1]");

  const NetworkParams lossy = base.with_eta(eta);
  auto reference = lossy.with_gain(1.0).with_coupling(2.0 * lossy.kappa_l);
  const double norm = visibility_integral(reference, cfg).value;

  EnhancementGrid grid;
  grid.eta = eta;
  grid.gains.assign(gains.begin(), gains.end());
  grid.coupling_ratios.assign(coupling_ratios.begin(), coupling_ratios.end());
  const std::size_t cells = gains.size() * coupling_ratios.size();
  grid.values.assign(cells, std::numeric_limits<double>::quiet_NaN());
  grid.cell_errors.assign(cells, std::string());

  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t i = cell / coupling_ratios.size();
    const std::size_t j = cell % coupling_ratios.size();
    try {
      const auto p = lossy.with_gain(gains[i]).with_coupling(coupling_ratios[j] * lossy.kappa_l);
      grid.values[cell] = visibility_integral(p, cfg).value / norm;
    } catch (const Error& e) {
      grid.cell_errors[cell] = e.what();
    }
  });
  return grid;
}

double optimal_coupling(const NetworkParams& p, const ScanConfig& cfg) {
  p.validate();
  const double lo = std::log(p.kappa_l / 10.0);
  const double hi = std::log(1e4 * p.kappa_l);
  auto rate = [&](double log_km) {
    return scan_rate(p.with_coupling(std::exp(log_km)), cfg);
  };

  // Flatness probe on a coarse log grid.
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (int k = 0; k <= 8; ++k) {
    const double v = rate(lo + (hi - lo) * k / 8.0);
    fmin = std::min(fmin, v);
    fmax = std::max(fmax, v);
  }
  if (!(fmax > 0.0) || (fmax - fmin) <= 1e-10 * std::abs(fmax)) {
    throw NumericalError("optimal_coupling: scan rate is flat in kappa_m (degenerate objective)");
  }

  const auto best = golden_section_maximize(rate, lo, hi, 0.0, 1e-5);
  const double km = std::exp(best.x);

  const double h = 1e-3;
  const double slope = (scan_rate(p.with_coupling(km * (1.0 + h)), cfg) -
                        scan_rate(p.with_coupling(km * (1.0 - h)), cfg)) /
                       (2.0 * h * km);
  if (std::abs(slope) >= 1e-3 * best.fx / km) {
    std::ostringstream os;
    os << "optimal_coupling: maximum at kappa_m = " << km
       << " is not stationary (boundary of the search interval?)";
    throw NumericalError(os.str());
  }
  return km;
}

QuadratureSnr quadrature_equivalence(double tau_s, double delta_a_hz, double alpha_2q) {
  if (tau_s < 0.0 || !(delta_a_hz > 0.0) || alpha_2q < 0.0) {
    throw ConfigError("quadrature_equivalence: inputs must be non-negative");
  }
  const double bw_2q = delta_a_hz;
  const double bw_1q = 2.0 * delta_a_hz;
  const double alpha_1q = 2.0 * alpha_2q;
  QuadratureSnr out;
  out.double_quadrature =
      std::sqrt(2.0 * tau_s * bw_2q / 2.0) * (delta_a_hz / bw_2q) * alpha_2q;
  out.single_quadrature =
      std::sqrt(tau_s * bw_1q / 2.0) * (delta_a_hz / bw_1q) * alpha_1q;
  return out;
}

double compare_configs(const NetworkParams& squeezed, const NetworkParams& reference,
                       const ScanConfig& cfg, VisibilityModel model) {
  return visibility_integral(squeezed, cfg, model).value /
         visibility_integral(reference, cfg, model).value;
}

}  // namespace ssr
