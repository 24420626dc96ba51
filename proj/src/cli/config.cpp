#include "ydyn/cli/config.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "json.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/text.hpp"

namespace ydyn::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> known_keys = {
    {"space", {"kind", "lower", "upper", "labels"}},
    {"grid", {"resolution"}},
    {"system", {"builtin", "field_table", "relation", "bundle", "speed_bound"}},
    {"solver", {"step", "t_minus", "t_plus", "seeds", "per_seed", "policy", "dwell", "seed"}},
    {"analysis",
     {"relation_step", "inflation", "relation_source", "tolerance", "limit_inflation", "n_max", "horizon", "times",
      "family", "family_size", "measure", "measure_file", "base_points", "region", "strict_region", "reach_from",
      "reach_steps"}},
    {"output", {"dir", "format"}},
};

const std::map<std::string, std::map<std::string, std::string>> builtin_defaults = {
    {"interval_rotation",
     {{"space.kind", "torus"},
      {"space.lower", "0"},
      {"space.upper", "1"},
      {"grid.resolution", "100"},
      {"system.speed_bound", "2"},
      {"solver.step", "0.05"},
      {"solver.t_minus", "-1"},
      {"solver.t_plus", "1"},
      {"solver.seeds", "centers"},
      {"solver.per_seed", "2"},
      {"solver.policy", "uniform_corner"},
      {"analysis.relation_step", "0.05"},
      {"analysis.inflation", "1"},
      {"analysis.times", "0.05, 0.5, 1.0"},
      {"analysis.base_points", "0.05; 0.15; 0.25; 0.35; 0.45; 0.55; 0.65; 0.75; 0.85; 0.95"},
      {"analysis.reach_from", "0.005"},
      {"analysis.reach_steps", "20"}}},
    {"filippov_absorb",
     {{"space.kind", "box"},
      {"space.lower", "0, -1.05"},
      {"space.upper", "1, 1.05"},
      {"grid.resolution", "8, 21"},
      {"system.speed_bound", "1"},
      {"solver.step", "0.01"},
      {"solver.t_minus", "0"},
      {"solver.t_plus", "2"},
      {"solver.seeds", "centers"},
      {"analysis.relation_step", "0.1"},
      {"analysis.inflation", "0"},
      {"analysis.times", "0.1, 1.0"},
      {"analysis.base_points", "0.3, 1.0"},
      {"analysis.measure", "uniform_on_recurrent"},
      {"analysis.region", "0, 0 ; 1, 0"},
      {"analysis.strict_region", "0, 0.2 ; 1, 0.4"},
      {"analysis.limit_inflation", "1"},
      {"analysis.reach_from", "0.3, 1.0"},
      {"analysis.reach_steps", "12"}}},
};

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  template <class F>
  auto parse(const std::string& key, F f) const -> std::optional<decltype(f(std::string_view{}))> {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
      return f(text::trim(*v));
    } catch (const Error& e) {
      fail(fmt::format("[{}] {}: {}", section_of(key), name_of(key), e.what()));
    }
  }

  std::optional<double> number(const std::string& key) const {
    return parse(key, [&](std::string_view s) { return text::parse_double(s, key); });
  }
  std::optional<std::size_t> count(const std::string& key) const {
    return parse(key, [&](std::string_view s) { return static_cast<std::size_t>(text::parse_u64(s, key)); });
  }
  std::optional<std::vector<double>> numbers(const std::string& key) const {
    return parse(key, [&](std::string_view s) {
      std::vector<double> out;
      for (const auto& part : text::split(s, ',')) out.push_back(text::parse_double(text::trim(part), key));
      return out;
    });
  }

  static std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }
  static std::string name_of(const std::string& key) { return key.substr(key.find('.') + 1); }

 private:
  std::map<std::string, std::string> values_;
};

Point parse_point(std::string_view s, const std::optional<Space>& space, const std::string& key) {
  s = text::trim(s);
  if (space && space->kind() == SpaceKind::finite) {
    try {
      return {static_cast<double>(space->label_index(s))};
    } catch (const Error&) {
      fail(fmt::format("{}: unknown label '{}'", key, s));
    }
  }
  std::vector<double> out;
  for (const auto& part : text::split(s, ',')) out.push_back(text::parse_double(text::trim(part), key));
  if (space && out.size() != space->dimension())
    fail(fmt::format("{}: point '{}' has {} coordinates, the space has {}", key, s, out.size(), space->dimension()));
  return out;
}

std::vector<Point> parse_points(std::string_view s, const std::optional<Space>& space, const std::string& key) {
  std::vector<Point> out;
  for (const auto& part : text::split(s, ';'))
    if (!text::trim(part).empty()) out.push_back(parse_point(part, space, key));
  return out;
}

std::pair<Point, Point> parse_box(std::string_view s, const std::optional<Space>& space, const std::string& key) {
  auto pts = parse_points(s, space, key);
  if (pts.size() != 2) fail(fmt::format("{}: expected 'lower ; upper'", key));
  return {pts[0], pts[1]};
}

template <class E>
E pick(const std::string& key, std::string_view value, std::initializer_list<std::pair<std::string_view, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (name == value) return e;
    names += (names.empty() ? "" : ", ") + std::string(name);
  }
  fail(fmt::format("{}: '{}' is not one of {}", key, value, names));
}

std::string resolve_path(const std::string& base_dir, std::string_view p) {
  std::filesystem::path path(std::string(text::trim(p)));
  if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
  return path.lexically_normal().string();
}

std::map<std::string, std::string> flatten(const pt::ptree& tree) {
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    auto known = known_keys.find(section);
    if (known == known_keys.end()) fail(fmt::format("unknown section [{}]", section));
    if (!body.data().empty()) fail(fmt::format("'{}' must be a section", section));
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) fail(fmt::format("unknown key '{}' in [{}]", key, section));
      out[section + "." + key] = value.data();
    }
  }
  return out;
}

}  // namespace

OutputFormat output_format_from_string(std::string_view s) {
  return pick<OutputFormat>("format", s,
                            {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}, {"svg", OutputFormat::svg}});
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "?";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& body, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(body);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(fmt::format("line {}: {}", e.line(), e.message()));
  }
  auto user = flatten(tree);

  std::size_t system_keys = 0;
  for (auto key : {"system.builtin", "system.field_table", "system.relation", "system.bundle"})
    system_keys += user.count(key);
  if (system_keys != 1) fail("[system] needs exactly one of builtin, field_table, relation, bundle");

  auto merged = user;
  if (auto it = user.find("system.builtin"); it != user.end()) {
    const auto name = std::string(text::trim(it->second));
    auto defaults = builtin_defaults.find(name);
    if (defaults == builtin_defaults.end())
      fail(fmt::format("system.builtin: unknown builtin '{}' (interval_rotation, filippov_absorb)", name));
    for (const auto& [k, v] : defaults->second) merged.emplace(k, v);
  }
  const Reader r(merged);

  RunConfig cfg;
  cfg.text = body;
  cfg.base_dir = std::filesystem::absolute(base_dir).lexically_normal().string();

  // system
  if (auto v = r.get("system.builtin")) {
    cfg.system = {SystemKind::builtin, std::string(text::trim(*v)), {}};
  } else if (auto v = r.get("system.field_table")) {
    cfg.system = {SystemKind::field_table, resolve_path(base_dir, *v), {}};
  } else if (auto v = r.get("system.relation")) {
    cfg.system = {SystemKind::relation, resolve_path(base_dir, *v), {}};
  } else if (auto v = r.get("system.bundle")) {
    cfg.system = {SystemKind::bundle, resolve_path(base_dir, *v), {}};
  }
  cfg.system.speed_bound = r.number("system.speed_bound");
  if (cfg.system.kind != SystemKind::builtin && !std::filesystem::exists(cfg.system.name))
    fail(fmt::format("[system] file '{}' does not exist", cfg.system.name));

  // space and grid
  const bool relation_system = cfg.system.kind == SystemKind::relation;
  if (relation_system) {
    if (r.has("space.kind") || r.has("grid.resolution"))
      fail("[space] and [grid] come from the relation file when system.relation is used");
  } else {
    auto kind = r.get("space.kind");
    if (!kind) fail("[space] kind is required");
    const auto k = pick<SpaceKind>("space.kind", text::trim(*kind),
                                   {{"box", SpaceKind::box}, {"torus", SpaceKind::torus}, {"finite", SpaceKind::finite}});
    try {
      if (k == SpaceKind::finite) {
        auto labels = r.get("space.labels");
        if (!labels) fail("[space] labels is required for a finite space");
        std::vector<std::string> names;
        for (const auto& part : text::split(*labels, ',')) names.emplace_back(text::trim(part));
        cfg.space = Space::finite(std::move(names));
      } else {
        auto lower = r.numbers("space.lower");
        auto upper = r.numbers("space.upper");
        if (!lower || !upper) fail("[space] lower and upper are required");
        cfg.space = k == SpaceKind::box ? Space::box(*lower, *upper) : Space::torus(*lower, *upper);
        auto res = r.get("grid.resolution");
        if (!res) fail("[grid] resolution is required");
        for (const auto& part : text::split(*res, ','))
          cfg.resolution.push_back(text::parse_u64(text::trim(part), "grid.resolution"));
        Grid(*cfg.space, cfg.resolution);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(fmt::format("[space]/[grid]: {}", e.what()));
    }
  }

  // solver
  cfg.solver.step = r.number("solver.step");
  if (cfg.solver.step && !(*cfg.solver.step > 0.0)) fail("solver.step must be positive");
  cfg.solver.t_minus = r.number("solver.t_minus").value_or(0.0);
  cfg.solver.t_plus = r.number("solver.t_plus").value_or(1.0);
  if (cfg.solver.t_minus > 0.0 || cfg.solver.t_plus < 0.0) fail("solver horizons must satisfy t_minus <= 0 <= t_plus");
  if (cfg.solver.step) {
    for (double h : {cfg.solver.t_minus, cfg.solver.t_plus}) {
      const double k = h / *cfg.solver.step;
      if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k)))
        fail(fmt::format("solver.step {} does not divide the horizon {}", *cfg.solver.step, h));
    }
  }
  if (auto v = r.get("solver.seeds")) {
    if (text::trim(*v) == "centers")
      cfg.solver.seeds_at_centers = true;
    else
      cfg.solver.seeds = parse_points(*v, cfg.space, "solver.seeds");
  }
  cfg.solver.per_seed = r.count("solver.per_seed").value_or(1);
  if (auto v = r.get("solver.policy"))
    cfg.solver.law = pick<SelectionLaw>("solver.policy", text::trim(*v),
                                        {{"uniform_corner", SelectionLaw::uniform_corner},
                                         {"uniform_box", SelectionLaw::uniform_box},
                                         {"extreme", SelectionLaw::extreme}});
  cfg.solver.dwell = r.count("solver.dwell").value_or(5);
  if (cfg.solver.dwell == 0) fail("solver.dwell must be positive");
  cfg.solver.seed = r.parse("solver.seed", [](std::string_view s) { return text::parse_u64(s, "seed"); }).value_or(0);

  // analysis
  auto& a = cfg.analysis;
  a.relation_step = r.number("analysis.relation_step");
  a.inflation = r.count("analysis.inflation");
  if (auto v = r.get("analysis.relation_source"))
    a.relation_source = pick<RelationSource>("analysis.relation_source", text::trim(*v),
                                             {{"field", RelationSource::field}, {"bundle", RelationSource::bundle}});
  a.tolerance = r.number("analysis.tolerance");
  a.limit_inflation = r.count("analysis.limit_inflation");
  a.n_max = r.count("analysis.n_max");
  a.horizon = r.count("analysis.horizon").value_or(1000);
  a.times = r.numbers("analysis.times").value_or(std::vector<double>{});
  if (auto v = r.get("analysis.family"))
    a.family = pick<FamilyKind>("analysis.family", text::trim(*v),
                                {{"standard", FamilyKind::standard},
                                 {"dyadic", FamilyKind::dyadic},
                                 {"singles", FamilyKind::singles},
                                 {"arcs", FamilyKind::arcs},
                                 {"random", FamilyKind::random}});
  a.family_size = r.count("analysis.family_size").value_or(100);
  if (auto v = r.get("analysis.measure"))
    a.measure = pick<MeasureKind>("analysis.measure", text::trim(*v),
                                  {{"uniform", MeasureKind::uniform},
                                   {"uniform_on_recurrent", MeasureKind::uniform_on_recurrent},
                                   {"krylov", MeasureKind::krylov},
                                   {"markov", MeasureKind::markov},
                                   {"file", MeasureKind::file}});
  if (auto v = r.get("analysis.measure_file")) a.measure_file = resolve_path(base_dir, *v);
  if (a.measure == MeasureKind::file) {
    if (a.measure_file.empty()) fail("analysis.measure = file needs analysis.measure_file");
    if (!std::filesystem::exists(a.measure_file))
      fail(fmt::format("analysis.measure_file '{}' does not exist", a.measure_file));
  }

  // points on relation systems are labels, checked once the relation is loaded
  const bool labels_only = relation_system || (cfg.space && cfg.space->kind() == SpaceKind::finite);
  if (labels_only) {
    auto label_points = [&](const std::string& key) {
      std::vector<Point> out;
      if (auto v = r.get(key))
        for (const auto& part : text::split(*v, ';'))
          if (!text::trim(part).empty()) {
            if (cfg.space) {
              out.push_back(parse_point(part, cfg.space, key));
            } else {
              out.push_back({static_cast<double>(text::parse_u64(text::trim(part), key))});
            }
          }
      return out;
    };
    a.base_points = label_points("analysis.base_points");
    a.reach_from = label_points("analysis.reach_from");
    if (auto v = r.get("analysis.region"))
      for (const auto& part : text::split(*v, ','))
        if (!text::trim(part).empty()) a.region_labels.emplace_back(text::trim(part));
    if (r.has("analysis.strict_region"))
      fail("analysis.strict_region is a coordinate box; use it on box or torus spaces");
  } else {
    if (auto v = r.get("analysis.base_points")) a.base_points = parse_points(*v, cfg.space, "analysis.base_points");
    if (auto v = r.get("analysis.reach_from")) a.reach_from = parse_points(*v, cfg.space, "analysis.reach_from");
    if (auto v = r.get("analysis.region")) a.region = parse_box(*v, cfg.space, "analysis.region");
    if (auto v = r.get("analysis.strict_region"))
      a.strict_region = parse_box(*v, cfg.space, "analysis.strict_region");
  }
  if (auto v = r.get("analysis.reach_steps")) {
    try {
      a.reach_steps = text::parse_long(text::trim(*v), "reach_steps");
    } catch (const Error& e) {
      fail(fmt::format("[analysis] reach_steps: {}", e.what()));
    }
  }

  // output
  if (auto v = r.get("output.dir")) cfg.output.dir = resolve_path(base_dir, *v);
  if (auto v = r.get("output.format")) {
    try {
      cfg.output.format = output_format_from_string(text::trim(*v));
    } catch (const ConfigError& e) {
      fail(fmt::format("[output] {}", e.what()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) fail(fmt::format("config file '{}' not found", path));
  const std::string body = text::read_file(path);
  const auto dir = std::filesystem::absolute(path).parent_path().string();
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '{') {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      fail(fmt::format("manifest '{}': {}", path, e.what()));
    }
    if (!manifest.contains("config") || !manifest["config"].is_string())
      fail(fmt::format("manifest '{}' has no embedded config", path));
    const std::string base = manifest.value("base_dir", dir);
    auto cfg = parse_config(manifest["config"].get<std::string>(), base);
    if (manifest.contains("seed")) cfg.solver.seed = manifest["seed"].get<std::uint64_t>();
    if (manifest.contains("format")) cfg.output.format = output_format_from_string(manifest["format"].get<std::string>());
    return cfg;
  }
  return parse_config(body, dir);
}

}  // namespace ydyn::cli
