#pragma once

// Minimal static SVG charts for result bundles.

#include <string>
#include <vector>

namespace platopt {

struct PlotSeries {
    std::string label;
    std::vector<double> values;
};

/// Line chart over x = 0..n-1 scaled by `x_scale`; stacked fills when
/// `stacked` is set.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<PlotSeries>& series,
                           double x_scale = 1.0, bool stacked = false);

/// Grouped bar chart: one group per category, one bar per series.
std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<PlotSeries>& series);

}  // namespace platopt
