#include "ydyn/cli/artifacts.hpp"

#include <map>

#include <fmt/format.h>

#include "json.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/text.hpp"

namespace ydyn::cli {

namespace {

constexpr std::string_view grid_tag = "#@ grid";

// Non-empty, non-grid lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> body_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t n = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++n;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(n, line);
  }
  return out;
}

nlohmann::ordered_json grid_json(const Grid& grid) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : text::space_fields(grid.space())) j[k] = v;
  j["resolution"] = grid.resolution();
  return j;
}

}  // namespace

std::string grid_line(const Grid& grid) {
  std::string out(grid_tag);
  for (const auto& [k, v] : text::space_fields(grid.space())) out += fmt::format(" {}={}", k, v);
  if (grid.space().kind() != SpaceKind::finite) {
    std::string res;
    for (std::size_t d = 0; d < grid.dimension(); ++d) res += (d ? "," : "") + std::to_string(grid.resolution()[d]);
    out += " resolution=" + res;
  }
  return out + "\n";
}

GridPtr grid_from_artifact(std::string_view text) {
  const auto first = text::trim(text.substr(0, text.find('\n')));
  if (first.substr(0, grid_tag.size()) != grid_tag) throw FormatError("line 1: missing '#@ grid' line");
  std::map<std::string, std::string> fields;
  for (const auto& token : text::split(text::trim(first.substr(grid_tag.size())), ' ')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError(fmt::format("line 1: malformed grid field '{}'", token));
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  const Space space = text::space_from_fields(fields);
  std::vector<std::size_t> resolution;
  if (space.kind() != SpaceKind::finite) {
    auto it = fields.find("resolution");
    if (it == fields.end()) throw FormatError("line 1: grid line lacks 'resolution'");
    for (const auto& part : text::split(it->second, ',')) resolution.push_back(text::parse_u64(part, "resolution"));
  }
  return Grid::make(space, resolution);
}

ArtifactKind artifact_kind(std::string_view text) {
  const auto lines = body_lines(text);
  if (lines.empty()) throw FormatError("artifact has no header");
  const auto h = lines.front().second;
  if (h == "cell") return ArtifactKind::cells;
  if (h == "step,cell") return ArtifactKind::reach_tube;
  if (h == "cell,weight") return ArtifactKind::measure;
  throw FormatError(fmt::format("line {}: unknown artifact header '{}'", lines.front().first, h));
}

std::string cells_to_csv(const CellSet& cells) {
  std::string out = grid_line(*cells.grid()) + "cell\n";
  for (auto c : cells.cells()) out += fmt::format("{}\n", c);
  return out;
}

CellSet cells_from_csv(std::string_view text) {
  auto grid = grid_from_artifact(text);
  const auto lines = body_lines(text);
  if (lines.empty() || lines.front().second != "cell") throw FormatError("cell set CSV needs a 'cell' header");
  CellSet out(grid);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = text::parse_u64(lines[i].second, fmt::format("line {}", lines[i].first));
    if (c >= grid->cell_count()) throw FormatError(fmt::format("line {}: cell {} outside the grid", lines[i].first, c));
    out.insert(c);
  }
  return out;
}

std::string reach_to_csv(const ReachTube& tube) {
  if (tube.empty()) throw FormatError("empty reach tube");
  std::string out = grid_line(*tube.front().second.grid()) + "step,cell\n";
  for (const auto& [k, set] : tube)
    for (auto c : set.cells()) out += fmt::format("{},{}\n", k, c);
  return out;
}

ReachTube reach_from_csv(std::string_view text) {
  auto grid = grid_from_artifact(text);
  const auto lines = body_lines(text);
  if (lines.empty() || lines.front().second != "step,cell") throw FormatError("reach CSV needs a 'step,cell' header");
  std::map<long, CellSet> steps;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto parts = text::split(lines[i].second, ',');
    const auto where = fmt::format("line {}", lines[i].first);
    if (parts.size() != 2) throw FormatError(where + ": expected 'step,cell'");
    const long k = text::parse_long(parts[0], where);
    const auto c = text::parse_u64(parts[1], where);
    if (c >= grid->cell_count()) throw FormatError(fmt::format("{}: cell {} outside the grid", where, c));
    steps.try_emplace(k, grid).first->second.insert(c);
  }
  return {steps.begin(), steps.end()};
}

std::string measure_artifact_csv(const Grid& grid, const DiscreteMeasure& mu) {
  return grid_line(grid) + measure_to_csv(mu);
}

std::string cells_to_json(const CellSet& cells) {
  nlohmann::ordered_json j;
  j["grid"] = grid_json(*cells.grid());
  j["cells"] = cells.cells();
  return j.dump(2) + "\n";
}

std::string reach_to_json(const ReachTube& tube) {
  if (tube.empty()) throw FormatError("empty reach tube");
  nlohmann::ordered_json j;
  j["grid"] = grid_json(*tube.front().second.grid());
  auto steps = nlohmann::ordered_json::array();
  for (const auto& [k, set] : tube) steps.push_back({{"step", k}, {"cells", set.cells()}});
  j["tube"] = steps;
  return j.dump(2) + "\n";
}

std::string measure_to_json(const Grid& grid, const DiscreteMeasure& mu) {
  nlohmann::ordered_json j;
  j["grid"] = grid_json(grid);
  j["weights"] = mu.weights();
  return j.dump(2) + "\n";
}

}  // namespace ydyn::cli
