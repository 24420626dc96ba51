// Deterministic SVG phase plots: trajectories as polylines, cell sets and
// measures as shaded cells. One-dimensional tori are drawn as rings.
#ifndef YDYN_CLI_SVG_HPP
#define YDYN_CLI_SVG_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "ydyn/phase_space.hpp"
#include "ydyn/trajectory.hpp"

namespace ydyn::cli {

struct PlotOptions {
  /// Coordinates to draw; required (one or two entries) above two dimensions.
  std::vector<std::size_t> project;
  std::string title;
};

/// One-dimensional spaces plot value against time; otherwise the projected
/// phase portrait. Throws PlotError for unusable projections.
std::string bundle_svg(const SolutionBundle& bundle, const PlotOptions& options);

/// Cells shaded by intensity (scaled so the largest value is darkest);
/// projected cells accumulate by summation.
std::string cells_svg(const GridPtr& grid, const std::vector<double>& intensity, const PlotOptions& options);

/// Plots a bundle directory or a CSV artifact written by the tool.
std::string plot_artifact(const std::string& path, const PlotOptions& options);

}  // namespace ydyn::cli

#endif  // YDYN_CLI_SVG_HPP
