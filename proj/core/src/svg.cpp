#include "feedersim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace feedersim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c; break;
    }
  }
  return out;
}

struct Ticks {
  double start = 0.0;
  double step = 1.0;
  int count = 0;
};

// Tick spacing snapped to a 1/2/5 decade so labels come out round.
Ticks nice_ticks(double lo, double hi, int target) {
  Ticks t;
  const double span = hi - lo;
  if (!(span > 0.0) || !std::isfinite(span)) return t;
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  if (norm < 1.5) t.step = mag;
  else if (norm < 3.5) t.step = 2.0 * mag;
  else if (norm < 7.5) t.step = 5.0 * mag;
  else t.step = 10.0 * mag;
  t.start = std::ceil(lo / t.step) * t.step;
  for (double v = t.start; v <= hi + 1e-9 * span; v += t.step) ++t.count;
  return t;
}

}  // namespace

std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const ChartOptions& opts) {
  for (const ChartSeries& s : series)
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("series '" + s.label +
                                  "' has mismatched x/y lengths");

  const int w = opts.width;
  const int h = opts.height;
  const double ml = 66, mr = 18, mt = 40, mb = 50;
  const double pw = w - ml - mr;
  const double ph = h - mt - mb;

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min, y_min = x_min, y_max = -x_min;
  std::size_t total_points = 0;
  for (const ChartSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
      ++total_points;
    }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  if (!opts.title.empty())
    svg << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-size=\"15\" fill=\"#1a1a1a\">" << xml_escape(opts.title)
        << "</text>\n";

  if (total_points == 0) {
    svg << "<text x=\"" << w / 2 << "\" y=\"" << h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#777\">"
        << "no data</text>\n</svg>\n";
    return svg.str();
  }

  if (x_max <= x_min) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (y_max <= y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  } else {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }

  const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  const auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

  const Ticks xt = nice_ticks(x_min, x_max, 7);
  const Ticks yt = nice_ticks(y_min, y_max, 6);
  for (int i = 0; i < yt.count; ++i) {
    const double v = yt.start + i * yt.step;
    const double y = py(v);
    svg << "<line x1=\"" << num(ml) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(ml + pw) << "\" y2=\"" << num(y)
        << "\" stroke=\"#e3e3e3\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << num(ml - 7) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#555\">" << num(v)
        << "</text>\n";
  }
  for (int i = 0; i < xt.count; ++i) {
    const double v = xt.start + i * xt.step;
    const double x = px(v);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt) << "\" x2=\""
        << num(x) << "\" y2=\"" << num(mt + ph)
        << "\" stroke=\"#efefef\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 17)
        << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#555\">" << num(v)
        << "</text>\n";
  }
  svg << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\""
      << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  if (!opts.x_label.empty())
    svg << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(h - 12)
        << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#333\">"
        << xml_escape(opts.x_label) << "</text>\n";
  if (!opts.y_label.empty())
    svg << "<text x=\"16\" y=\"" << num(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#333\" "
        << "transform=\"rotate(-90 16 " << num(mt + ph / 2) << ")\">"
        << xml_escape(opts.y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const ChartSeries& s = series[si];
    if (s.x.empty()) continue;
    const std::size_t n = s.x.size();
    const std::size_t cap =
        static_cast<std::size_t>(std::max(2, opts.max_points_per_series));
    const std::size_t stride = n <= cap ? 1 : (n + cap - 1) / cap;
    svg << "<polyline fill=\"none\" stroke=\""
        << kPalette[si % kPaletteSize] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      svg << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    // The final sample is kept so trailing transients stay visible.
    if ((n - 1) % stride != 0 && std::isfinite(s.x[n - 1]) &&
        std::isfinite(s.y[n - 1]))
      svg << num(px(s.x[n - 1])) << ',' << num(py(s.y[n - 1]));
    svg << "\"/>\n";
  }

  double ly = mt + 10;
  for (std::size_t si = 0; si < series.size(); ++si) {
    if (series[si].label.empty()) continue;
    const double lx = ml + pw - 150;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(lx + 22) << "\" y2=\"" << num(ly - 4) << "\" stroke=\""
        << kPalette[si % kPaletteSize] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly)
        << "\" font-size=\"11\" fill=\"#333\">" << xml_escape(series[si].label)
        << "</text>\n";
    ly += 17;
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_line_chart(const std::string& path,
                      const std::vector<ChartSeries>& series,
                      const ChartOptions& opts) {
  std::ofstream out(path);
  if (!out.is_open()) throw std::runtime_error("cannot write " + path);
  out << render_line_chart(series, opts);
}

}  // namespace feedersim
