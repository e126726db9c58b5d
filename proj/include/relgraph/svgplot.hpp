#pragma once

#include <string>
#include <vector>

namespace relgraph {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal hand-emitted line chart (CSV stays the canonical output).
void write_svg_line_chart(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<SvgSeries>& series);

struct SvgBox {
  std::string name;  // category label under the box
  double lo = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, hi = 0.0;
};

void write_svg_box_chart(const std::string& path, const std::string& title,
                         const std::string& y_label, const std::vector<SvgBox>& boxes);

}  // namespace relgraph
