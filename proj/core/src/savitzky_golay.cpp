#include "ssr/savitzky_golay.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

void legendre(double x, Eigen::VectorXd& out) {
  const auto n = out.size();
  out[0] = 1.0;
  if (n > 1) out[1] = x;
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const double kd = static_cast<double>(k);
    out[k + 1] = ((2.0 * kd + 1.0) * x * out[k] - kd * out[k - 1]) / (kd + 1.0);
  }
}

}  // namespace

std::vector<double> sg_filter(std::span<const double> series, int degree, int half_width,
                              std::span<const std::uint8_t> keep) {
  if (degree < 0) throw ConfigError("sg_filter: degree must be >= 0");
  if (half_width <= degree) throw ConfigError("sg_filter: half_width must exceed degree");
  if (!keep.empty() && keep.size() != series.size()) {
    throw ConfigError("sg_filter: mask length does not match series");
  }
  const auto n = static_cast<long>(series.size());
  const long terms = degree + 1;
  if (n <= terms) {
    std::ostringstream os;
    os << "sg_filter: insufficient data (" << n << " points for degree " << degree << ")";
    throw NumericalError(os.str());
  }
  auto kept = [&](long j) { return keep.empty() || keep[static_cast<std::size_t>(j)] != 0; };

  std::vector<double> out(series.size());
  Eigen::MatrixXd gram(terms, terms);
  Eigen::VectorXd rhs(terms), phi(terms), coef(terms);
  Eigen::LDLT<Eigen::MatrixXd> solver(terms);

  // Short blocks share one polynomial origin and scale: the union of their
  // windows maps onto [-1, 1] and each window covers most of it, which keeps
  // the Gram matrix well conditioned. The Gram sums are rebuilt per block.
  const long block = std::max(1L, static_cast<long>(half_width) / (degree > 6 ? 8 : 2));
  for (long b0 = 0; b0 < n; b0 += block) {
    const long b1 = std::min(n, b0 + block);
    const long lo = std::max(0L, b0 - half_width);
    const long hi = std::min(n - 1, b1 - 1 + half_width);
    const double center = 0.5 * static_cast<double>(lo + hi);
    const double scale = 0.5 * static_cast<double>(hi - lo) + 0.5;
    auto accumulate = [&](long j, double sign) {
      if (j < 0 || j >= n || !kept(j)) return 0;
      legendre((static_cast<double>(j) - center) / scale, phi);
      gram.noalias() += sign * phi * phi.transpose();
      rhs.noalias() += sign * series[static_cast<std::size_t>(j)] * phi;
      return 1;
    };

    gram.setZero();
    rhs.setZero();
    long count = 0;
    for (long j = b0 - half_width; j <= b0 + half_width; ++j) count += accumulate(j, 1.0);
    for (long t = b0; t < b1; ++t) {
      if (t > b0) {
        count -= accumulate(t - half_width - 1, -1.0);
        count += accumulate(t + half_width, 1.0);
      }
      if (count < terms) {
        std::ostringstream os;
        os << "sg_filter: only " << count << " usable points in the window around index " << t;
        throw NumericalError(os.str());
      }
      solver.compute(gram);
      coef = solver.solve(rhs);
      legendre((static_cast<double>(t) - center) / scale, phi);
      out[static_cast<std::size_t>(t)] = phi.dot(coef);
    }
  }
  return out;
}

}  // namespace ssr
