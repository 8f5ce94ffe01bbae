#pragma once

// Minimal static SVG line and scatter plots.

#include <string>
#include <vector>

namespace gpduo::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // points instead of a polyline
  std::string color = "#1f77b4";
};

struct Plot {
  std::string title;
  std::string xlabel, ylabel;
  bool log_x = false, log_y = false;
  std::vector<Series> series;
};

std::string render(const Plot& plot);

}  // namespace gpduo::svg
