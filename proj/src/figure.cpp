#include "sdd/figure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sdd {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
    out.push_back(t);
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int panel_width, int panel_height) {
  if (panels.empty()) throw std::invalid_argument("render_svg: no panels");
  const int margin_left = 56;
  const int margin_right = 16;
  const int margin_top = 28;
  const int margin_bottom = 64;
  const int total_width = panel_width * static_cast<int>(panels.size());
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(total_width) +
         "\" height=\"" + std::to_string(panel_height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    if (!(panel.x_hi > panel.x_lo) || !(panel.y_hi > panel.y_lo))
      throw std::invalid_argument("render_svg: degenerate panel range");
    const double x0 = static_cast<double>(panel_width) * p + margin_left;
    const double y0 = margin_top;
    const double plot_w = panel_width - margin_left - margin_right;
    const double plot_h = panel_height - margin_top - margin_bottom;
    const auto sx = [&](double x) {
      return x0 + plot_w * (x - panel.x_lo) / (panel.x_hi - panel.x_lo);
    };
    const auto sy = [&](double y) {
      return y0 + plot_h * (1.0 - (y - panel.y_lo) / (panel.y_hi - panel.y_lo));
    };

    const std::string clip_id = "clip" + std::to_string(p);
    svg += "<clipPath id=\"" + clip_id + "\"><rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) +
           "\" width=\"" + fmt(plot_w) + "\" height=\"" + fmt(plot_h) + "\"/></clipPath>\n";
    svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(plot_w) +
           "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x0 + plot_w / 2) + "\" y=\"" + fmt(y0 - 10.0) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + panel.title + "</text>\n";

    for (double t : ticks(panel.x_lo, panel.x_hi)) {
      svg += "<line x1=\"" + fmt(sx(t)) + "\" y1=\"" + fmt(y0 + plot_h) + "\" x2=\"" +
             fmt(sx(t)) + "\" y2=\"" + fmt(y0 + plot_h + 5) + "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + fmt(sx(t)) + "\" y=\"" + fmt(y0 + plot_h + 18) +
             "\" text-anchor=\"middle\" font-size=\"11\">" + fmt(t) + "</text>\n";
    }
    for (double t : ticks(panel.y_lo, panel.y_hi)) {
      svg += "<line x1=\"" + fmt(x0 - 5.0) + "\" y1=\"" + fmt(sy(t)) + "\" x2=\"" + fmt(x0) +
             "\" y2=\"" + fmt(sy(t)) + "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + fmt(x0 - 8.0) + "\" y=\"" + fmt(sy(t) + 4.0) +
             "\" text-anchor=\"end\" font-size=\"11\">" + fmt(t) + "</text>\n";
    }

    for (const Series& s : panel.series) {
      std::string path;
      bool first = true;
      for (const auto& [x, y] : s.points) {
        if (x < panel.x_lo || x > panel.x_hi) continue;
        path += (first ? "M" : " L");
        path += fmt(sx(x)) + "," + fmt(sy(std::clamp(y, panel.y_lo, panel.y_hi)));
        first = false;
      }
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.4\" clip-path=\"url(#" + clip_id + ")\"/>\n";
    }

    // Legend row under the x axis.
    double lx = x0;
    const double ly = y0 + plot_h + 40.0;
    for (const Series& s : panel.series) {
      svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4.0) + "\" x2=\"" + fmt(lx + 18.0) +
             "\" y2=\"" + fmt(ly - 4.0) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + fmt(lx + 22.0) + "\" y=\"" + fmt(ly) + "\" font-size=\"11\">" +
             s.name + "</text>\n";
      lx += 24.0 + 7.0 * static_cast<double>(s.name.size()) + 12.0;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace sdd
