#pragma once

#include <string>
#include <vector>

namespace edgelab::tools {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Dashed stroke, used for fitted lines.
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "n";
  std::string y_label = "value";
  bool log_x = true;
  bool log_y = true;
  std::vector<Series> series;
};

/// Line chart built from rect, line, path and text elements only.
/// Non-positive values on a log axis are dropped.
std::string render_svg(const PlotSpec& plot);

}  // namespace edgelab::tools
