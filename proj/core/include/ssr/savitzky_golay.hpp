#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ssr {

/// Savitzky-Golay baseline: at every point, the value of the least-squares
/// polynomial of the given degree fitted to the kept points within
/// +-half_width. Windows are truncated at the series edges (no padding).
/// `keep` (optional, same length as the series) excludes points with value 0
/// from every fit; excluded points still receive a baseline value.
///
/// Throws ConfigError if half_width <= degree or the mask length mismatches,
/// and NumericalError if the series has at most degree + 1 points or a window
/// holds fewer than degree + 1 kept points.
std::vector<double> sg_filter(std::span<const double> series, int degree, int half_width,
                              std::span<const std::uint8_t> keep = {});

}  // namespace ssr
