/**
 * @file commands.hpp
 * @brief Subcommands of the `ydyn` tool.
 *
 * Every run writes its artifacts, a `<command>_report.json` and a
 * `manifest.json` (config text and hash, seed, version, artifact hashes)
 * into the output directory. Exit codes: 0 when every verdict passes,
 * 1 when some verdict fails, 2 on usage, configuration or input errors.
 */
#ifndef YDYN_CLI_COMMANDS_HPP
#define YDYN_CLI_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ydyn/cli/config.hpp"

namespace ydyn::cli {

inline constexpr std::string_view tool_version = "0.1.0";

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

struct RunOptions {
  std::string out_dir;  ///< empty: [output] dir
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  ///< 0: YDYN_THREADS, then hardware concurrency
  std::optional<OutputFormat> format;
  std::vector<std::size_t> project;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one analysis subcommand; returns exit_pass or exit_fail. Errors
/// propagate as exceptions.
int run_command(const std::string& command, const RunConfig& config, const RunOptions& options, std::ostream& out);

/// Writes <out_dir>/<artifact stem>.svg; out_dir defaults to the artifact's directory.
int run_plot(const std::string& artifact, const RunOptions& options, std::ostream& out);

/// Full command line handling, including the exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ydyn::cli

#endif  // YDYN_CLI_COMMANDS_HPP
