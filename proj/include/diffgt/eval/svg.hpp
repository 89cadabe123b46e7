#pragma once

#include <span>
#include <string>
#include <vector>

#include "diffgt/numerics/matrix.hpp"

namespace diffgt {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart with axes, tick labels and a legend.
std::string svg_line_chart(std::span<const Series> series, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

/// Standalone SVG scatter plot of 2-D points coloured by label.
std::string svg_scatter(const Matrix& points, std::span<const int> labels, const std::string& title);

}  // namespace diffgt
