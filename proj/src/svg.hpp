#pragma once

#include <string>
#include <vector>

namespace tsg::detail {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Plain SVG line chart with axes, ticks and a legend. Non-finite points are
/// skipped.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace tsg::detail
