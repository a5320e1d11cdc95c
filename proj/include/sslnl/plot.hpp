#pragma once

#include <string>
#include <vector>

namespace sslnl {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr; // empty => no shading / error bars
};

// Writes <path_base>.svg and <path_base>.png. Series with yerr get a shaded
// band (lines) or error whiskers (bars). The caller is responsible for the
// data sidecar.
void render_line_chart(const std::string& path_base, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

// One group per `group_labels` entry on the x axis; every series contributes
// one bar per group (series.y aligned with groups).
void render_bar_chart(const std::string& path_base, const std::string& title,
                      const std::vector<std::string>& group_labels, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

} // namespace sslnl
