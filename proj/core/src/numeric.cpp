#include "ssr/numeric.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssr {

GoldenResult golden_section_maximize(const std::function<double(double)>& f,
                                     double lo, double hi, double rel_tol,
                                     double abs_tol, int max_iterations) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= std::max(rel_tol * std::abs(mid), abs_tol)) break;
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  GoldenResult r;
  r.x = fc > fd ? c : d;
  r.fx = std::max(fc, fd);
  r.evaluations = evals;
  return r;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

SampleMoments sample_moments(std::span<const double> x) {
  SampleMoments m;
  m.count = x.size();
  if (x.empty()) return m;
  CompensatedSum s;
  for (double v : x) s.add(v);
  m.mean = s.value() / static_cast<double>(x.size());
  CompensatedSum s2;
  CompensatedSum s3;
  for (double v : x) {
    const double d = v - m.mean;
    s2.add(d * d);
    s3.add(d * d * d);
  }
  const double n = static_cast<double>(x.size());
  if (x.size() > 1) m.stddev = std::sqrt(s2.value() / (n - 1.0));
  const double pop_var = s2.value() / n;
  if (pop_var > 0.0) m.skewness = (s3.value() / n) / std::pow(pop_var, 1.5);
  return m;
}

std::pair<double, double> ks_test_standard_normal(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = normal_cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_pvalue(d, s.size())};
}

std::pair<double, double> ks_test_two_sample(std::span<const double> a,
                                             std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const auto ne = static_cast<std::size_t>(nx * ny / (nx + ny));
  return {d, kolmogorov_pvalue(d, ne)};
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty sequence");
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (x.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace ssr
