// Self-describing CSV artifacts written by the tool. Each starts with a
// grid line such as
//   #@ grid kind=torus lower=0 upper=1 resolution=100
// followed by one of the headers "cell", "step,cell" or "cell,weight".
#ifndef YDYN_CLI_ARTIFACTS_HPP
#define YDYN_CLI_ARTIFACTS_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ydyn/measure.hpp"
#include "ydyn/phase_space.hpp"

namespace ydyn::cli {

std::string grid_line(const Grid& grid);
/// Parses the first line of an artifact; FormatError without one.
GridPtr grid_from_artifact(std::string_view text);

enum class ArtifactKind { cells, reach_tube, measure };

/// Kind from the header following the grid line.
ArtifactKind artifact_kind(std::string_view text);

std::string cells_to_csv(const CellSet& cells);
CellSet cells_from_csv(std::string_view text);

using ReachTube = std::vector<std::pair<long, CellSet>>;

std::string reach_to_csv(const ReachTube& tube);
ReachTube reach_from_csv(std::string_view text);

std::string measure_artifact_csv(const Grid& grid, const DiscreteMeasure& mu);

std::string cells_to_json(const CellSet& cells);
std::string reach_to_json(const ReachTube& tube);
std::string measure_to_json(const Grid& grid, const DiscreteMeasure& mu);

}  // namespace ydyn::cli

#endif  // YDYN_CLI_ARTIFACTS_HPP
