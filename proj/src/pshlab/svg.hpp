#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pshlab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<PlotSeries> series;
    // Optional fitted line (slope, intercept) drawn across the x-range and
    // recorded in the metadata block.
    std::optional<std::pair<double, double>> fit;
};

// Deterministic standalone SVG: same spec, same bytes (no timestamps). A
// single data point renders as a marker.
std::string render_svg(const PlotSpec& spec);

}  // namespace pshlab
