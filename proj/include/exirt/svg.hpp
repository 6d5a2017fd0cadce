#pragma once

#include <string>
#include <vector>

// Minimal deterministic SVG plots for reports. Coordinates are printed with
// fixed precision so output is byte-stable across runs.
namespace exirt::svg {

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label);

struct Box {
  std::string label;
  double whisker_low = 0, q1 = 0, median = 0, q3 = 0, whisker_high = 0;
  std::vector<double> outliers;
};

std::string box_chart(const std::string& title, const std::vector<Box>& boxes, const std::string& y_label);

struct Series {
  std::string name;
  std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::vector<double>& x, const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label);

struct Point {
  std::string label;
  double x = 0, y = 0;
  int group = 0;
};

std::string scatter_chart(const std::string& title, const std::vector<Point>& points, const std::string& x_label,
                          const std::string& y_label);

}  // namespace exirt::svg
