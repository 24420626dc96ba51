/**
 * @file config.hpp
 * @brief Run configuration for the command-line tool.
 *
 * INI-style text read with boost property_tree. Sections and keys are
 * listed in docs/config.md; unknown sections or keys are rejected. A
 * builtin system fills in defaults for every section, and explicit keys
 * override them.
 */
#ifndef YDYN_CLI_CONFIG_HPP
#define YDYN_CLI_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ydyn/phase_space.hpp"
#include "ydyn/solvers.hpp"

namespace ydyn::cli {

enum class SystemKind { builtin, field_table, relation, bundle };

struct SystemSpec {
  SystemKind kind = SystemKind::builtin;
  std::string name;  ///< builtin name or resolved file path
  std::optional<double> speed_bound;
};

struct SolverSpec {
  std::optional<double> step;
  double t_minus = 0.0;
  double t_plus = 1.0;
  bool seeds_at_centers = false;
  std::vector<Point> seeds;
  std::size_t per_seed = 1;
  SelectionLaw law = SelectionLaw::uniform_box;
  std::size_t dwell = 5;
  std::uint64_t seed = 0;
};

enum class RelationSource { field, bundle };
enum class FamilyKind { standard, dyadic, singles, arcs, random };
enum class MeasureKind { uniform, uniform_on_recurrent, krylov, markov, file };

struct AnalysisSpec {
  std::optional<double> relation_step;
  std::optional<std::size_t> inflation;
  RelationSource relation_source = RelationSource::field;
  std::optional<double> tolerance;
  std::optional<std::size_t> limit_inflation;
  std::optional<std::size_t> n_max;
  std::size_t horizon = 1000;
  std::vector<double> times;
  FamilyKind family = FamilyKind::standard;
  std::size_t family_size = 100;
  MeasureKind measure = MeasureKind::uniform;
  std::string measure_file;
  std::vector<Point> base_points;
  std::optional<std::pair<Point, Point>> region;
  std::vector<std::string> region_labels;
  std::optional<std::pair<Point, Point>> strict_region;
  std::vector<Point> reach_from;
  long reach_steps = 10;
};

enum class OutputFormat { csv, json, svg };

struct OutputSpec {
  std::string dir = "ydyn-out";
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  std::string text;  ///< the configuration text exactly as read
  std::string base_dir;  ///< directory relative paths resolve against
  std::optional<Space> space;
  std::vector<std::size_t> resolution;
  SystemSpec system;
  SolverSpec solver;
  AnalysisSpec analysis;
  OutputSpec output;
};

/// Parses configuration text. Relative file paths resolve against base_dir.
/// Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Reads a config file, or the config embedded in a run manifest (a JSON
/// file with a "config" entry, whose "seed" then becomes solver.seed).
RunConfig load_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

OutputFormat output_format_from_string(std::string_view s);
std::string_view to_string(OutputFormat f);

}  // namespace ydyn::cli

#endif  // YDYN_CLI_CONFIG_HPP
