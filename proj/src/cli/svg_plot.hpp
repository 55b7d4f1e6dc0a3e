#pragma once

// Minimal SVG line/marker plots with optional log axes.

#include <optional>
#include <string>
#include <vector>

namespace arsm::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f4e9c";
  double width = 1.2;
  bool markers = false;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::optional<double> ymin, ymax;
  std::vector<Series> series;
  std::vector<double> vlines;  // dotted verticals
  std::vector<double> hlines;  // dotted horizontals
};

/// Non-finite points and points outside the y range break the polyline.
std::string render_svg(const Plot& plot, int width = 720, int height = 480);

}  // namespace arsm::cli
