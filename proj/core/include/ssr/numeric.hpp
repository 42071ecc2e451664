#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace ssr {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double hz_to_rad(double hz) { return kTwoPi * hz; }
inline double rad_to_hz(double rad_s) { return rad_s / kTwoPi; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Neumaier-compensated running sum. Results do not depend on how the
/// addends were partitioned to within a few ulps of the exact sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Mixes a 64-bit word (splitmix64 finalizer). Used to derive independent
/// RNG sub-seeds from (seed, run, spectrum) tuples.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

/// Runs body(i) for i in [0, n) on up to `threads` workers using a static
/// interleaved partition. Callers must write only to index-owned storage,
/// which keeps results independent of the worker count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto workers = static_cast<std::size_t>(threads) < n ? threads : n;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section maximization of a unimodal f on [lo, hi], stopping when the
/// bracket is narrower than rel_tol * |x| (or abs_tol, whichever is larger).
GoldenResult golden_section_maximize(const std::function<double(double)>& f,
                                     double lo, double hi, double rel_tol,
                                     double abs_tol = 0.0,
                                     int max_iterations = 500);

/// Two-sided p-value of the one-sample Kolmogorov-Smirnov statistic d on n
/// samples (asymptotic Kolmogorov distribution with Stephens' correction).
double kolmogorov_pvalue(double d, std::size_t n);

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  std::size_t count = 0;
};

SampleMoments sample_moments(std::span<const double> x);

/// KS statistic of x against the standard normal; returns {D, p-value}.
std::pair<double, double> ks_test_standard_normal(std::span<const double> x);

/// Two-sample KS test; returns {D, p-value}.
std::pair<double, double> ks_test_two_sample(std::span<const double> a,
                                             std::span<const double> b);

double median(std::vector<double> x);

}  // namespace ssr
