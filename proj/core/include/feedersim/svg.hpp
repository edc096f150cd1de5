#pragma once

#include <string>
#include <vector>

namespace feedersim {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 960;
  int height = 440;
  // Series longer than this are strided down before drawing.
  int max_points_per_series = 4000;
};

// Renders a self-contained SVG line chart: axes with rounded tick steps,
// one polyline per series, and a legend. Output contains no timestamps, so
// identical inputs render byte-identical files.
std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const ChartOptions& opts);

void write_line_chart(const std::string& path,
                      const std::vector<ChartSeries>& series,
                      const ChartOptions& opts);

}  // namespace feedersim
