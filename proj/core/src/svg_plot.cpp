#include "ssr/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

const char* kPalette[] = {"#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e", "#566573"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double left = 70, right = 20, top = 36, bottom = 50;
  const double w = spec.width - left - right;
  const double h = spec.height - top - bottom;
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = tx(s.x[i]);
      if (!std::isfinite(x) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
  if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * h; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4.0;
    const double fy = y0 + (y1 - y0) * t / 4.0;
    const double sx = left + w * t / 4.0;
    const double sy = top + h * (1.0 - t / 4.0);
    os << "<text x=\"" << sx << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">"
       << tick_label(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
       << tick_label(fy) << "</text>\n";
  }
  os << "<text x=\"" << left + w / 2 << "\" y=\"" << spec.height - 10
     << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << top + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(spec.y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const auto& ser = series[s];
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(tx(ser.x[i])) || !std::isfinite(ser.y[i])) continue;
      os << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 + 16 * static_cast<double>(s)
       << "\" fill=\"" << color << "\">" << escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotSeries histogram_series(std::span<const double> values, int bins, double lo, double hi,
                            std::string label) {
  if (bins < 1 || !(hi > lo)) throw ConfigError("histogram_series: invalid binning");
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (!(v >= lo && v < hi)) continue;
    counts[static_cast<std::size_t>((v - lo) / width)] += 1.0;
  }
  PlotSeries s;
  s.label = std::move(label);
  for (int b = 0; b < bins; ++b) {
    const double c = counts[static_cast<std::size_t>(b)];
    s.x.push_back(lo + b * width);
    s.y.push_back(c);
    s.x.push_back(lo + (b + 1) * width);
    s.y.push_back(c);
  }
  return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace ssr
