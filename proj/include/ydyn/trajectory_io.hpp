// CSV files for single trajectories and directory layout for bundles.
//
// Trajectory CSV: header "t,x1,...,xn", one row per grid time, ascending.
// Bundle directory: manifest.txt (key=value) plus member_NNNNN.csv files.
// Window flags and provenance live in the manifest.
#ifndef YDYN_TRAJECTORY_IO_HPP
#define YDYN_TRAJECTORY_IO_HPP

#include <string>
#include <string_view>

#include "ydyn/trajectory.hpp"

namespace ydyn {

std::string trajectory_to_csv(const Trajectory& phi);
/// Rows must sit on the grid of `step` at consecutive indices.
Trajectory trajectory_from_csv(std::string_view text, const Space& space, double step,
                               WindowFlags flags = {});

std::string flags_to_string(const WindowFlags& flags);
WindowFlags flags_from_string(std::string_view s);

/// Creates the directory if needed and overwrites existing member files.
void write_bundle(const std::string& directory, const SolutionBundle& bundle);
SolutionBundle read_bundle(const std::string& directory);

}  // namespace ydyn

#endif
