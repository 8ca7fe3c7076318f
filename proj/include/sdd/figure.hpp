#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sdd {

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

struct Panel {
  std::string title;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  std::vector<Series> series;
};

/// Side-by-side panels with axes, ticks and a legend, emitted as plain SVG
/// text with no plotting dependency.
std::string render_svg(const std::vector<Panel>& panels, int panel_width = 440,
                       int panel_height = 380);

}  // namespace sdd
