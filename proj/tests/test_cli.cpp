#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "ydyn/cli/artifacts.hpp"
#include "ydyn/cli/commands.hpp"
#include "ydyn/cli/config.hpp"
#include "ydyn/cli/svg.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/text.hpp"
#include "ydyn/trajectory_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ydyn;
using namespace ydyn::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ydyn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ydyn_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& body, const std::string& name = "run.ini") {
  const auto path = dir / name;
  text::write_file(path.string(), body);
  return path.string();
}

json read_json(const fs::path& path) { return json::parse(text::read_file(path.string())); }

// All regular files below dir, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = text::read_file(e.path().string());
  return out;
}

const std::string rotation = "[system]\nbuiltin = interval_rotation\n";
const std::string filippov = "[system]\nbuiltin = filippov_absorb\n";
const fs::path fixtures = YDYN_FIXTURE_DIR;

}  // namespace

TEST_CASE("config: unknown sections and keys are rejected") {
  CHECK_THROWS_AS(parse_config("[sytem]\nbuiltin = interval_rotation\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[solver]\nstpe = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\nbuiltin = interval_rotation\nrelation = r.txt\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\nbuiltin = pendulum\n"), ConfigError);
}

TEST_CASE("config: invariants on files and horizons") {
  CHECK_THROWS_AS(parse_config("[system]\nfield_table = missing.txt\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[solver]\nstep = 0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[solver]\nstep = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[solver]\nt_minus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[analysis]\nbase_points = 0.1, 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(rotation + "[analysis]\nmeasure = file\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("config: builtin defaults and user overrides") {
  const auto cfg = parse_config(rotation + "; overrides\n[grid]\nresolution = 50\n[solver]\nseed = 9\n");
  REQUIRE(cfg.space);
  CHECK(cfg.space->kind() == SpaceKind::torus);
  CHECK(cfg.resolution == std::vector<std::size_t>{50});
  CHECK(cfg.solver.seed == 9);
  CHECK(cfg.solver.step == doctest::Approx(0.05));
  CHECK(cfg.analysis.base_points.size() == 10);
  const auto fil = parse_config(filippov);
  CHECK(fil.resolution == std::vector<std::size_t>{8, 21});
  CHECK(fil.analysis.strict_region.has_value());
}

TEST_CASE("config: relation systems take their space from the file") {
  const auto dir = scratch("relation_config");
  text::write_file((dir / "r.txt").string(), to_text(testing::r3()));
  CHECK_NOTHROW(parse_config("[system]\nrelation = r.txt\n[analysis]\nbase_points = 0; 2\n", dir.string()));
  CHECK_THROWS_AS(parse_config("[system]\nrelation = r.txt\n[grid]\nresolution = 3\n", dir.string()), ConfigError);
}

TEST_CASE("exit codes: usage and configuration errors give 2") {
  const auto missing = run({"check", "--config", "/nonexistent/run.ini"});
  CHECK(missing.code == exit_usage);
  CHECK(missing.err.find("not found") != std::string::npos);

  const auto unknown = run({"frobnicate"});
  CHECK(unknown.code == exit_usage);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  const auto dir = scratch("usage");
  const auto cfg = write_config(dir, rotation);
  const auto flag = run({"check", "--config", cfg, "--bogus"});
  CHECK(flag.code == exit_usage);
  CHECK(flag.err.find("Usage") != std::string::npos);

  CHECK(run({"check"}).code == exit_usage);
  CHECK(run({"check", "--config", cfg, "--format", "pdf"}).code == exit_usage);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("check on interval_rotation passes with a compactness witness") {
  const auto dir = scratch("check_rotation");
  const auto r = run({"check", "--config", write_config(dir, rotation), "--out", (dir / "out").string()});
  CHECK(r.code == exit_pass);
  CHECK(r.out.find("PASS axiom compactness") != std::string::npos);
  const auto report = read_json(dir / "out" / "check_report.json");
  CHECK(report["passed"].get<bool>());
  CHECK(report["axioms"]["existence_coverage"].get<double>() == 1.0);
  CHECK(report["axioms"]["lipschitz_witness"].get<double>() <= 2.0 + 1e-9);
  bool compactness = false;
  for (const auto& c : report["axioms"]["checks"])
    if (c["name"] == "compactness") compactness = c["passed"].get<bool>();
  CHECK(compactness);

  const auto manifest = read_json(dir / "out" / "manifest.json");
  CHECK(manifest["version"] == std::string(tool_version));
  CHECK(manifest["seed"] == 0);
  CHECK(manifest["config_hash"] == fmt::format("fnv1a64:{:016x}", fnv1a64(rotation)));
}

TEST_CASE("check on the unbounded-slope bundle fails on compactness") {
  const auto dir = scratch("check_unbounded");
  const auto r = run({"check", "--config", (fixtures / "unbounded_slope" / "check.ini").string(), "--out",
                      dir.string()});
  CHECK(r.code == exit_fail);
  CHECK(r.out.find("FAIL axiom compactness") != std::string::npos);
  const auto report = read_json(dir / "check_report.json");
  CHECK(report["axioms"]["lipschitz_witness"].get<double>() > 2.0);
}

TEST_CASE("recurrence on filippov_absorb passes and lists strict violations") {
  const auto dir = scratch("recurrence_filippov");
  const auto r = run({"recurrence", "--config", write_config(dir, filippov), "--out", (dir / "out").string()});
  CHECK(r.code == exit_pass);
  const auto report = read_json(dir / "out" / "recurrence_report.json");
  CHECK(report["measure"] == "uniform on recurrent cells");
  CHECK(report["theorem_D"]["passed"].get<bool>());
  CHECK(report["strict"]["max_violation"].get<double>() > 0.0);
  const auto& violations = report["measure_report"]["strict_violations"];
  REQUIRE(violations.size() >= 1);
  CHECK(violations[0]["value"].get<double>() > 0.0);
  CHECK(fs::exists(dir / "out" / "measure.csv"));
}

TEST_CASE("every command runs on both builtins") {
  for (const auto& [name, body] : {std::pair{"rotation", rotation}, std::pair{"filippov", filippov}}) {
    const auto dir = scratch(std::string("all_") + name);
    const auto cfg = write_config(dir, body);
    for (const auto& command : command_names()) {
      CAPTURE(name);
      CAPTURE(command);
      const auto r = run({command, "--config", cfg, "--out", (dir / command).string(), "--threads", "2"});
      CHECK(r.code == exit_pass);
      CHECK(r.err.empty());
      CHECK(fs::exists(dir / command / "manifest.json"));
      CHECK(fs::exists(dir / command / (command + "_report.json")));
    }
  }
}

TEST_CASE("limits on an imported relation") {
  const auto dir = scratch("limits_relation");
  text::write_file((dir / "r.txt").string(), to_text(testing::r3()));
  const auto cfg = write_config(dir, "[system]\nrelation = r.txt\n[analysis]\nbase_points = 0; 1; 2\n");
  const auto r = run({"limits", "--config", cfg, "--out", (dir / "out").string()});
  CHECK(r.code == exit_pass);
  const auto limits = read_json(dir / "out" / "limits.json");
  CHECK(limits.size() == 3);
}

TEST_CASE("a failing verdict gives exit 1") {
  // 0 -> 1 -> 2 with no loop: nothing is viable, so limits from 0 have no solution
  const auto dir = scratch("limits_fail");
  text::write_file((dir / "r.txt").string(), to_text(Relation(3, {{0, 1}, {1, 2}})));
  const auto cfg = write_config(dir, "[system]\nrelation = r.txt\n[analysis]\nbase_points = 0\n");
  const auto r = run({"limits", "--config", cfg, "--out", (dir / "out").string()});
  CHECK(r.code == exit_fail);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("artifacts are identical across thread counts and seeds replay") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, rotation);
  for (const auto& command : {"simulate", "measure", "check"}) {
    CAPTURE(command);
    const auto a = dir / (std::string(command) + "_1");
    const auto b = dir / (std::string(command) + "_8");
    REQUIRE(run({command, "--config", cfg, "--out", a.string(), "--threads", "1", "--seed", "17"}).code == 0);
    REQUIRE(run({command, "--config", cfg, "--out", b.string(), "--threads", "8", "--seed", "17"}).code == 0);
    CHECK(tree(a) == tree(b));
  }
  const auto other = dir / "simulate_seed";
  REQUIRE(run({"simulate", "--config", cfg, "--out", other.string(), "--seed", "18"}).code == 0);
  CHECK(tree(other) != tree(dir / "simulate_1"));
}

TEST_CASE("re-running from a manifest reproduces the artifacts") {
  const auto dir = scratch("replay");
  const auto cfg = write_config(dir, filippov);
  const auto first = dir / "first";
  REQUIRE(run({"simulate", "--config", cfg, "--out", first.string(), "--seed", "3", "--format", "svg"}).code == 0);
  const auto second = dir / "second";
  REQUIRE(run({"simulate", "--config", (first / "manifest.json").string(), "--out", second.string(), "--threads",
               "3"})
              .code == 0);
  CHECK(tree(first) == tree(second));

  const auto manifest = read_json(first / "manifest.json");
  for (const auto& a : manifest["artifacts"])
    CHECK(a["fnv1a64"] == fmt::format("{:016x}", fnv1a64(text::read_file((first / a["path"].get<std::string>()).string()))));
}

TEST_CASE("cell set, reach tube and measure artifacts round-trip") {
  const auto grid = Grid::make(Space::box({0.0, -1.0}, {1.0, 1.0}), {4, 5});
  CellSet cells(grid);
  for (std::size_t c : {0u, 3u, 7u, 19u}) cells.insert(c);
  const auto csv = cells_to_csv(cells);
  CHECK(artifact_kind(csv) == ArtifactKind::cells);
  CHECK(cells_from_csv(csv) == cells);
  CHECK(*grid_from_artifact(csv) == *grid);

  ReachTube tube{{0, cells}, {1, inflate(cells, 1)}, {2, CellSet::full(grid)}};
  const auto rcsv = reach_to_csv(tube);
  CHECK(artifact_kind(rcsv) == ArtifactKind::reach_tube);
  const auto back = reach_from_csv(rcsv);
  REQUIRE(back.size() == tube.size());
  for (std::size_t i = 0; i < tube.size(); ++i) {
    CHECK(back[i].first == tube[i].first);
    CHECK(back[i].second == tube[i].second);
  }

  const auto mu = DiscreteMeasure::uniform(grid->cell_count());
  const auto mcsv = measure_artifact_csv(*grid, mu);
  CHECK(artifact_kind(mcsv) == ArtifactKind::measure);
  CHECK(measure_from_csv(mcsv).weights() == mu.weights());

  CHECK_THROWS_AS(cells_from_csv("cell\n1\n"), FormatError);
  CHECK_THROWS_AS(cells_from_csv(grid_line(*grid) + "cell\n99\n"), FormatError);
  CHECK_THROWS_AS(artifact_kind(grid_line(*grid) + "what\n"), FormatError);
}

TEST_CASE("plot: Filippov trajectories descend to y = 0 and stay there") {
  const auto dir = scratch("plot_filippov");
  const auto cfg = write_config(dir, filippov + "[solver]\nseeds = 0.5, 0.5 ; 0.2, 0.9\nstep = 0.01\n");
  REQUIRE(run({"simulate", "--config", cfg, "--out", (dir / "out").string()}).code == 0);
  const auto bundle = read_bundle((dir / "out" / "bundle").string());
  const auto svg = bundle_svg(bundle, {{1}, "y"});
  // value axis: y in [-1.05, 1.05] onto pixels 432 (bottom) to 48 (top); y = 0 sits at 240
  const std::regex polyline("points=\"([^\"]*)\"");
  std::size_t lines = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), polyline); it != std::sregex_iterator(); ++it) {
    ++lines;
    std::vector<double> ys;
    std::istringstream in((*it)[1].str());
    std::string pt;
    while (in >> pt) ys.push_back(std::stod(pt.substr(pt.find(',') + 1)));
    REQUIRE(ys.size() > 2);
    for (std::size_t k = 1; k < ys.size(); ++k) CHECK(ys[k] >= ys[k - 1] - 1e-9);
    CHECK(ys.back() == doctest::Approx(240.0));
    CHECK(ys.front() < 240.0);
  }
  CHECK(lines == 2);

  const auto r = run({"plot", (dir / "out" / "bundle").string(), "--project", "1"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "out" / "bundle.svg"));
}

TEST_CASE("plot: uniform measure on the circle is a constant-intensity ring") {
  const auto grid = Grid::make(Space::torus({0.0}, {1.0}), {100});
  const auto svg = cells_svg(grid, DiscreteMeasure::uniform(100).weights(), {{}, "uniform"});
  const std::regex fill("<path[^>]*fill=\"(#[0-9a-f]{6})\"");
  std::set<std::string> fills;
  std::size_t sectors = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it) {
    fills.insert((*it)[1].str());
    ++sectors;
  }
  CHECK(sectors == 100);
  CHECK(fills.size() == 1);
  CHECK(cells_svg(grid, DiscreteMeasure::uniform(100).weights(), {{}, "uniform"}) == svg);
}

TEST_CASE("plot: three-dimensional artifacts need a projection") {
  const auto dir = scratch("plot_3d");
  const auto grid = Grid::make(Space::box({0, 0, 0}, {1, 1, 1}), {2, 2, 2});
  CellSet cells(grid);
  cells.insert(3);
  const auto path = dir / "cells.csv";
  text::write_file(path.string(), cells_to_csv(cells));
  CHECK_THROWS_AS(plot_artifact(path.string(), {}), PlotError);
  const auto r = run({"plot", path.string()});
  CHECK(r.code == exit_usage);
  CHECK(r.err.find("--project") != std::string::npos);
  CHECK(run({"plot", path.string(), "--project", "0,2"}).code == 0);
  CHECK(fs::exists(dir / "cells.svg"));
  CHECK_THROWS_AS(plot_artifact(path.string(), {{0, 3}, ""}), PlotError);
}
