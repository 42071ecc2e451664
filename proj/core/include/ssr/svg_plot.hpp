#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ssr {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 720;
  int height = 440;
};

/// Self-contained SVG line plot. Non-finite points are skipped.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Histogram of `values` on [lo, hi) as a step series.
PlotSeries histogram_series(std::span<const double> values, int bins, double lo, double hi,
                            std::string label);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ssr
