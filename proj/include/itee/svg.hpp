#pragma once

// Minimal static SVG line charts.

#include <string>
#include <vector>

namespace itee {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct ChartOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

/// Non-positive values are dropped on log axes; an empty chart still renders
/// its frame and title.
std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt);

}  // namespace itee
