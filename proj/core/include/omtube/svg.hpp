#pragma once

#include <string>
#include <vector>

namespace omtube {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  ///< scatter instead of polyline
};

/// Minimal line/scatter plot with a frame, axis ranges and a legend.
/// Returns the number of plotted points. Non-finite points are dropped.
std::size_t write_svg_plot(const std::string& filename, const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace omtube
