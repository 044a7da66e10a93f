#pragma once

#include <string>

#include "trackfind/bench.hpp"

namespace trackfind {

enum class PlotAxis { gap, time };

/// Renders one polyline per method over the bench rows: x is the hit count,
/// y either total time (log scale) or gap percent (linear). Output is plain
/// SVG 1.1 and is byte-identical for identical input.
std::string render_plot_svg(const BenchResult& bench, PlotAxis axis);

/// CSV-file-to-SVG-file convenience wrapper around render_plot_svg.
void plot_csv(const std::string& csv_path, PlotAxis axis, const std::string& svg_path);

}  // namespace trackfind
