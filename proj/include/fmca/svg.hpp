#pragma once

#include <string>
#include <vector>

namespace fmca {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool points = false; // markers instead of polylines
  int width = 640;
  int height = 420;
};

/// Self-contained SVG document with axes, ticks and a legend.
std::string render_svg(const Plot& plot);

} // namespace fmca
