#pragma once

#include "nf/fuzzy.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nf {

// Self-contained SVG 1.1 line/scatter plots; no rendering dependency. The
// root element carries data-* attributes with the axis ranges and plot-area
// pixel box so emitted geometry is machine-checkable.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

// Predicted-vs-observed scatter with the identity diagonal and an
// `R = ...` annotation (class "r-annotation").
void write_scatter_plot(const std::string& path, const std::string& title,
                        const std::vector<std::pair<double, double>>& points,
                        std::optional<double> r);

// Membership degree curves of one partition, class "mf-curve", sampled over
// [lo, hi] plus each curve's own center so the peak is on the polyline.
void write_mf_curves(const std::string& path, const InputPartition& partition);

} // namespace nf
