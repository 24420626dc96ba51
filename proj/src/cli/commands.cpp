#include "ydyn/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ydyn/cli/artifacts.hpp"
#include "ydyn/cli/svg.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/invariance_limits.hpp"
#include "ydyn/measures.hpp"
#include "ydyn/parallel.hpp"
#include "ydyn/relation_kernel.hpp"
#include "ydyn/semigroup.hpp"
#include "ydyn/solvers.hpp"
#include "ydyn/text.hpp"
#include "ydyn/trajectory_io.hpp"

namespace ydyn::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Verdict {
  std::string name;
  bool passed = false;
  bool required = true;
  std::string detail;
};

json cells_json(const CellSet& s) { return s.cells(); }

class Run {
 public:
  Run(std::string command, const RunConfig& cfg, const RunOptions& opt)
      : command_(std::move(command)),
        cfg_(cfg),
        opt_(opt),
        threads_(resolve_threads(opt.threads)),
        seed_(opt.seed.value_or(cfg.solver.seed)),
        format_(opt.format.value_or(cfg.output.format)),
        out_(opt.out_dir.empty() ? cfg.output.dir : opt.out_dir) {
    load_system();
  }

  int execute(std::ostream& os) {
    fs::create_directories(out_);
    json report;
    report["command"] = command_;
    if (command_ == "simulate") simulate(report);
    else if (command_ == "reach") reach(report);
    else if (command_ == "invariance") invariance(report);
    else if (command_ == "limits") limits(report);
    else if (command_ == "measure") measure(report);
    else if (command_ == "recurrence") recurrence(report);
    else if (command_ == "check") check(report);
    else throw ConfigError(fmt::format("unknown command '{}'", command_));

    bool ok = true;
    auto list = json::array();
    for (const auto& v : verdicts_) {
      if (v.required && !v.passed) ok = false;
      list.push_back({{"name", v.name}, {"passed", v.passed}, {"required", v.required}, {"detail", v.detail}});
      os << fmt::format("{} {}{}{}\n", v.passed ? "PASS" : (v.required ? "FAIL" : "INFO"), v.name,
                        v.detail.empty() ? "" : ": ", v.detail);
    }
    report["verdicts"] = list;
    report["passed"] = ok;
    write(command_ + "_report.json", report.dump(2) + "\n");
    write_manifest();
    os << fmt::format("result: {} ({})\n", ok ? "pass" : "fail", out_.string());
    return ok ? exit_pass : exit_fail;
  }

 private:
  // ---- system ----

  void load_system() {
    const auto& sys = cfg_.system;
    switch (sys.kind) {
      case SystemKind::relation: {
        const auto body = text::read_file(sys.name);
        if (body.rfind("#@ cellrelation", 0) == 0)
          relation_ = cell_relation_from_text(body);
        else
          relation_ = import_relation(relation_from_text(body));
        grid_ = relation_->grid();
        return;
      }
      default: break;
    }
    grid_ = Grid::make(*cfg_.space, cfg_.resolution);
    if (sys.kind == SystemKind::builtin) {
      if (sys.name == "interval_rotation") {
        field_ = builtin::interval_rotation();
      } else {
        piecewise_ = builtin::filippov_absorb();
        field_ = filippov_set_valued(*piecewise_);
      }
      if (!(field_->space() == grid_->space()))
        throw ConfigError(fmt::format("builtin '{}' lives on a different space than [space]", sys.name));
    } else if (sys.kind == SystemKind::field_table) {
      field_ = field_from_cell_table(text::read_file(sys.name), grid_, sys.speed_bound);
    } else {
      bundle_ = read_bundle(sys.name);
      if (!(bundle_->space() == grid_->space())) throw ConfigError("bundle space differs from [space]");
    }
  }

  bool imported() const { return cfg_.system.kind == SystemKind::relation; }

  std::optional<double> speed_bound() const {
    if (cfg_.system.speed_bound) return cfg_.system.speed_bound;
    if (field_) return field_->speed_bound();
    return std::nullopt;
  }

  const SolutionBundle& bundle() {
    if (bundle_) return *bundle_;
    if (!field_) throw ConfigError("this command needs trajectories; the relation system has none");
    if (!cfg_.solver.step) throw ConfigError("solver.step is required to simulate");
    std::vector<Point> seeds = cfg_.solver.seeds;
    if (cfg_.solver.seeds_at_centers)
      for (std::size_t c = 0; c < grid_->cell_count(); ++c) seeds.push_back(grid_->cell_center(c));
    if (seeds.empty()) throw ConfigError("solver.seeds is empty");
    const auto& s = cfg_.solver;
    if (piecewise_)
      bundle_ = filippov_bundle(*piecewise_, seeds, s.t_minus, s.t_plus, *s.step, {}, threads_);
    else
      bundle_ = sample_inclusion(*field_, seeds, s.t_minus, s.t_plus, *s.step, s.per_seed, {seed_, s.dwell, s.law},
                                 threads_);
    return *bundle_;
  }

  const CellRelation& relation() {
    if (relation_) return *relation_;
    const auto& a = cfg_.analysis;
    const bool from_bundle = cfg_.system.kind == SystemKind::bundle || a.relation_source == RelationSource::bundle;
    const double step = a.relation_step ? *a.relation_step
                        : cfg_.solver.step ? *cfg_.solver.step
                        : bundle_ ? bundle_->step()
                                  : throw ConfigError("analysis.relation_step or solver.step is required");
    if (from_bundle)
      relation_ = build_cell_relation(bundle(), grid_, step, a.inflation.value_or(0));
    else
      relation_ = build_cell_relation(*field_, grid_, step, a.inflation.value_or(1), threads_);
    return *relation_;
  }

  double tolerance() const { return cfg_.analysis.tolerance.value_or(imported() ? 0.0 : 1e-9); }

  std::size_t limit_inflation() {
    return cfg_.analysis.limit_inflation.value_or(default_limit_inflation(relation()));
  }

  std::vector<long> steps() {
    if (cfg_.analysis.times.empty()) return {1};
    return steps_for_times(relation(), cfg_.analysis.times);
  }

  std::size_t cell_of(const Point& p) const {
    if (imported()) {
      const auto c = static_cast<std::size_t>(p[0]);
      if (c >= grid_->cell_count()) throw ConfigError(fmt::format("state {} outside the relation", c));
      return c;
    }
    return grid_->locate(p);
  }

  std::vector<std::size_t> base_cells() {
    std::vector<std::size_t> out;
    for (const auto& p : cfg_.analysis.base_points) out.push_back(cell_of(p));
    if (out.empty()) {
      const auto core = viability_kernel(relation(), CellSet::full(grid_)).cells();
      out.assign(core.begin(), core.begin() + static_cast<long>(std::min<std::size_t>(core.size(), 10)));
    }
    return out;
  }

  std::optional<CellSet> region() const {
    const auto& a = cfg_.analysis;
    if (a.region) return cells_in_box(grid_, a.region->first, a.region->second);
    if (!a.region_labels.empty()) {
      CellSet out(grid_);
      for (const auto& l : a.region_labels) out.insert(grid_->locate_label(l));
      return out;
    }
    return std::nullopt;
  }

  std::pair<std::string, std::vector<CellSet>> family() {
    const auto& a = cfg_.analysis;
    switch (a.family) {
      case FamilyKind::dyadic: return {"dyadic", dyadic_family(grid_)};
      case FamilyKind::singles: return {"single cells", single_cells(grid_)};
      case FamilyKind::arcs: return {"random arcs", random_arcs(grid_, a.family_size, seed_)};
      case FamilyKind::random: return {"random sets", random_family(grid_, a.family_size, seed_)};
      case FamilyKind::standard: break;
    }
    return {"single cells + dyadic + random sets", default_family(grid_, seed_, a.family_size)};
  }

  DiscreteMeasure build_measure(json& report) {
    const auto& a = cfg_.analysis;
    const auto& v = relation();
    switch (a.measure) {
      case MeasureKind::uniform:
        report["measure"] = "uniform";
        return DiscreteMeasure::uniform(grid_->cell_count());
      case MeasureKind::uniform_on_recurrent: {
        const auto rec = recurrent_cells(v, a.n_max, threads_);
        if (rec.empty()) throw EmptySetError("no recurrent cells to carry a measure");
        report["measure"] = "uniform on recurrent cells";
        return DiscreteMeasure::uniform_on(rec.bits());
      }
      case MeasureKind::krylov: {
        const auto x = base_cells().front();
        report["measure"] = fmt::format("Krylov-Bogoliubov average from cell {} over {} steps", x, a.horizon);
        return krylov_bogoliubov(v, x, a.horizon);
      }
      case MeasureKind::markov: {
        const auto core = viability_kernel(v, CellSet::full(grid_));
        kernel::EdgeWeights w;
        for (const auto& [i, j] : v.relation().edges())
          if (core.contains(i) && core.contains(j)) w[{i, j}] = 1.0;
        report["measure"] = "stationary measure of the uniform walk on core edges";
        return kernel::markov_measure(v.relation(), w);
      }
      case MeasureKind::file: {
        auto mu = measure_from_csv(text::read_file(a.measure_file));
        if (mu.size() != grid_->cell_count()) throw ConfigError("measure_file size does not match the grid");
        report["measure"] = a.measure_file;
        return mu;
      }
    }
    throw ConfigError("unknown measure");
  }

  // ---- artifacts ----

  void write(const std::string& name, const std::string& body) {
    text::write_file((out_ / name).string(), body);
    artifacts_.push_back(name);
  }

  void write_cells(const std::string& stem, const CellSet& cells) {
    if (format_ == OutputFormat::json)
      write(stem + ".json", cells_to_json(cells));
    else
      write(stem + ".csv", cells_to_csv(cells));
    if (format_ == OutputFormat::svg) {
      std::vector<double> w(grid_->cell_count(), 0.0);
      for (auto c : cells.cells()) w[c] = 1.0;
      write(stem + ".svg", cells_svg(grid_, w, {opt_.project, stem}));
    }
  }

  void write_measure(const DiscreteMeasure& mu) {
    if (format_ == OutputFormat::json)
      write("measure.json", measure_to_json(*grid_, mu));
    else
      write("measure.csv", measure_artifact_csv(*grid_, mu));
    if (format_ == OutputFormat::svg) write("measure.svg", cells_svg(grid_, mu.weights(), {opt_.project, "measure"}));
  }

  void write_manifest() {
    json m;
    m["tool"] = "ydyn";
    m["version"] = tool_version;
    m["command"] = command_;
    m["seed"] = seed_;
    m["config_hash"] = fmt::format("fnv1a64:{:016x}", fnv1a64(cfg_.text));
    m["format"] = std::string(to_string(format_));
    m["base_dir"] = cfg_.base_dir;
    m["config"] = cfg_.text;
    auto list = json::array();
    for (const auto& name : artifacts_)
      list.push_back({{"path", name}, {"fnv1a64", fmt::format("{:016x}", fnv1a64(text::read_file((out_ / name).string())))}});
    m["artifacts"] = list;
    text::write_file((out_ / "manifest.json").string(), m.dump(2) + "\n");
  }

  void verdict(std::string name, bool passed, std::string detail = {}, bool required = true) {
    verdicts_.push_back({std::move(name), passed, required, std::move(detail)});
  }

  // ---- commands ----

  void simulate(json& report) {
    if (cfg_.system.kind != SystemKind::builtin && cfg_.system.kind != SystemKind::field_table)
      throw ConfigError("simulate needs a builtin system or a field table");
    const auto& s = bundle();
    write_bundle((out_ / "bundle").string(), s);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(out_ / "bundle")) files.push_back("bundle/" + e.path().filename().string());
    std::sort(files.begin(), files.end());
    artifacts_.insert(artifacts_.end(), files.begin(), files.end());
    if (format_ == OutputFormat::svg) write("bundle.svg", bundle_svg(s, {opt_.project, "bundle"}));
    std::size_t exited = 0;
    for (const auto& phi : s.members()) exited += phi.flags().left_exited || phi.flags().right_exited;
    report["members"] = s.size();
    report["step"] = s.step();
    report["exited_members"] = exited;
    verdict("members", s.size() > 0, fmt::format("{} members, {} left the space", s.size(), exited));
  }

  void reach(json& report) {
    const auto& v = relation();
    CellSet start(grid_);
    for (const auto& p : cfg_.analysis.reach_from) start.insert(cell_of(p));
    if (start.empty()) {
      auto r = region();
      if (!r) throw ConfigError("reach needs analysis.reach_from or analysis.region");
      start = *r;
    }
    const long n = cfg_.analysis.reach_steps;
    const long sign = n < 0 ? -1 : 1;
    ReachTube tube;
    for (long k = 0; k != n + sign; k += sign) tube.emplace_back(k, reach_set(v, start, k));
    if (format_ == OutputFormat::json)
      write("reach.json", reach_to_json(tube));
    else
      write("reach.csv", reach_to_csv(tube));
    if (format_ == OutputFormat::svg) {
      std::vector<double> w(grid_->cell_count(), 0.0);
      for (const auto& [k, set] : tube)
        for (auto c : set.cells()) w[c] += 1.0;
      write("reach.svg", cells_svg(grid_, w, {opt_.project, "reach tube"}));
    }
    report["start"] = cells_json(start);
    report["steps"] = n;
    report["final_size"] = tube.back().second.size();
    if (std::abs(n) >= 2) {
      const auto sg = check_semigroup(v, start, sign, n - sign);
      verdict("semigroup_law", sg.passed(),
              fmt::format("V({})V({})E vs V({})E: {} law cells, {} inclusion cells", n - sign, sign, n,
                          sg.law_violations.size(), sg.inclusion_violations.size()));
    }
  }

  void invariance(json& report) {
    const auto& v = relation();
    const auto all = CellSet::full(grid_);
    const auto core = viability_kernel(v, all);
    write_cells("kernel", core);
    report["viability_kernel"] = cells_json(core);
    report["forward_viable"] = cells_json(forward_viable(v, all));
    report["backward_viable"] = cells_json(backward_viable(v, all));
    const auto r = region().value_or(all);
    const auto kr = viability_kernel(v, r);
    report["region"] = {{"cells", cells_json(r)},
                        {"viability_kernel", cells_json(kr)},
                        {"weakly_invariant", kr == r},
                        {"strongly_invariant", strong_invariance_grid(v, r)}};
    verdict("region_weakly_invariant", kr == r, fmt::format("{} of {} region cells viable", kr.size(), r.size()), false);
    verdict("region_strongly_invariant", strong_invariance_grid(v, r), {}, false);
    verdict("kernel_fixed_point", viability_kernel(v, kr) == kr);
    verdict("kernel_weakly_invariant", kernel::is_weakly_invariant(v.relation(), kr.bits()));
    const auto sg = check_semigroup(v, r, 1, 2);
    verdict("semigroup_law", sg.passed(),
            fmt::format("{} law cells, {} inclusion cells", sg.law_violations.size(), sg.inclusion_violations.size()));
  }

  void limits(json& report) {
    const auto& v = relation();
    auto list = json::array();
    CellSet omega_union(grid_);
    for (auto x : base_cells()) {
      try {
        const auto rep = omega_limit_grid(v, x, cfg_.analysis.n_max, limit_inflation());
        list.push_back(json::parse(to_json(rep)));
        omega_union = omega_union | rep.omega;
        verdict(fmt::format("weakly_invariant_omega cell {}", x), rep.weak_invariant,
                fmt::format("|omega| = {}, period {}, inflation {}{}", rep.omega.size(), rep.period, rep.inflation,
                            rep.stabilized ? "" : ", not stabilized (tail union)"));
      } catch (const EmptySolutionError& e) {
        list.push_back({{"base_cell", x}, {"error", e.what()}});
        verdict(fmt::format("weakly_invariant_omega cell {}", x), false, e.what());
      }
    }
    report["limits"] = list;
    write("limits.json", list.dump(2) + "\n");
    if (format_ == OutputFormat::svg) {
      std::vector<double> w(grid_->cell_count(), 0.0);
      for (auto c : omega_union.cells()) w[c] = 1.0;
      write("limits.svg", cells_svg(grid_, w, {opt_.project, "omega limit sets"}));
    }
  }

  json strict_section(const DiscreteMeasure& mu, const std::vector<long>& ts, MeasureReport& into) {
    const auto& v = relation();
    std::vector<CellSet> sets;
    std::string name;
    if (cfg_.analysis.strict_region) {
      sets.push_back(cells_in_box(grid_, cfg_.analysis.strict_region->first, cfg_.analysis.strict_region->second));
      name = "strict region";
    } else {
      auto [n, f] = family();
      sets = std::move(f);
      name = n;
    }
    const auto strict = check_strict_invariance(mu, v, sets, ts, tolerance(), name, threads_);
    into.strict_violations = strict.strict_violations;
    verdict("strict_invariance", strict.passed(),
            fmt::format("max |mu(A) - mu(V(t)A)| = {} over {} pairs ({})", strict.max_violation(),
                        strict.pairs_tested, name),
            false);
    return {{"family", name}, {"max_violation", strict.max_violation()}, {"pairs_tested", strict.pairs_tested}};
  }

  void measure(json& report) {
    const auto& v = relation();
    const auto mu = build_measure(report);
    write_measure(mu);
    const auto [name, sets] = family();
    const auto ts = steps();
    auto sub = check_subinvariance(mu, v, sets, ts, tolerance(), name, threads_);
    report["strict"] = strict_section(mu, ts, sub);
    report["measure_report"] = json::parse(to_json(sub));
    verdict("subinvariance", sub.passed(),
            fmt::format("max mu(A) - mu(V(t)^-1 A) = {} over {} pairs ({})", sub.max_violation(), sub.pairs_tested,
                        name));
  }

  void recurrence(json& report) {
    const auto& v = relation();
    const auto mu = build_measure(report);
    write_measure(mu);
    const auto [name, sets] = family();
    const auto ts = steps();
    auto rep = check_subinvariance(mu, v, sets, ts, tolerance(), name, threads_);
    verdict("subinvariance", rep.passed(), fmt::format("max violation {}", rep.max_violation()), false);
    std::vector<PoincareResult> results(sets.size(),
                                        PoincareResult{RecurrenceVerdict::inconclusive, CellSet(grid_), 0, 0, 0});
    parallel_for(sets.size(), threads_,
                 [&](std::size_t i) { results[i] = poincare_check(mu, v, sets[i], cfg_.analysis.n_max, tolerance()); });
    std::size_t fails = 0, unknown = 0;
    for (const auto& r : results) {
      fails += r.verdict == RecurrenceVerdict::fail;
      unknown += r.verdict == RecurrenceVerdict::inconclusive;
    }
    rep.recurrence = std::move(results);
    verdict("poincare", fails == 0,
            fmt::format("{} sets: {} fail, {} inconclusive ({})", sets.size(), fails, unknown, name));
    const auto rec = recurrent_cells(v, cfg_.analysis.n_max, threads_);
    const auto inflation = imported() ? 0 : limit_inflation();
    const auto d = theorem_D_check(mu, rec, inflation, tolerance());
    verdict("recurrent_full_measure", d.passed,
            fmt::format("mu(recurrent, inflation {}) = {}, complement {}", inflation, d.mass, d.missing));
    report["recurrent_cells"] = cells_json(rec);
    report["theorem_D"] = {{"mass", d.mass}, {"missing", d.missing}, {"inflation", inflation}, {"passed", d.passed}};
    report["strict"] = strict_section(mu, ts, rep);
    report["measure_report"] = json::parse(to_json(rep));
  }

  void check(json& report) {
    if (field_ || bundle_) {
      const auto& s = bundle();
      AxiomOptions o;
      o.lipschitz_bound = speed_bound();
      o.tol = cfg_.analysis.tolerance.value_or(1e-9);
      o.seed = seed_;
      const auto ax = check_axioms(s, grid_, o);
      auto checks = json::array();
      for (const auto& c : ax.checks) {
        checks.push_back({{"name", c.name}, {"required", c.required}, {"passed", c.passed}, {"value", c.value},
                          {"detail", c.detail}});
        verdict("axiom " + c.name, c.passed, c.detail, c.required);
      }
      report["axioms"] = {{"existence_coverage", ax.existence_coverage},
                          {"uniqueness_spread", ax.uniqueness_spread},
                          {"lipschitz_witness", ax.lipschitz_witness},
                          {"lipschitz_limit", ax.lipschitz_limit},
                          {"uniform_bound", ax.uniform_bound},
                          {"checks", checks}};
      if (field_ && cfg_.analysis.relation_source == RelationSource::field) {
        const auto snd = check_soundness(relation(), s);
        auto missing = json::array();
        for (const auto& [i, j] : snd.missing) missing.push_back({i, j});
        report["missing_edges"] = missing;
        verdict("relation_contains_transitions", snd.passed(),
                fmt::format("{} transitions, {} missing edges", snd.transitions, snd.missing.size()));
      }
    } else {
      verdict("axioms", false, "skipped: an imported relation has no trajectories", false);
    }
    const auto& v = relation();
    const auto all = CellSet::full(grid_);
    const auto core = viability_kernel(v, all);
    verdict("viability_kernel_weakly_invariant",
            kernel::is_weakly_invariant(v.relation(), core.bits()) && viability_kernel(v, core) == core,
            fmt::format("{} of {} cells", core.size(), all.size()));
    const auto [name, sets] = family();
    std::size_t bad = 0;
    for (const auto& e : sets)
      for (long t : steps()) bad += !check_semigroup(v, e, 1, t).passed();
    verdict("semigroup_law", bad == 0, fmt::format("{} failing pairs over {} sets ({})", bad, sets.size(), name));
    const auto fwd = forward_viable(v, all);
    std::size_t checked = 0, weak = 0;
    for (auto x : base_cells()) {
      if (!fwd.contains(x)) continue;
      ++checked;
      weak += omega_limit_grid(v, x, cfg_.analysis.n_max, limit_inflation()).weak_invariant;
    }
    verdict("omega_weakly_invariant", weak == checked, fmt::format("{} of {} base cells", weak, checked));
    report["family"] = name;
  }

  std::string command_;
  const RunConfig& cfg_;
  RunOptions opt_;
  std::size_t threads_;
  std::uint64_t seed_;
  OutputFormat format_;
  fs::path out_;

  GridPtr grid_;
  std::optional<SetValuedField> field_;
  std::optional<PiecewiseField> piecewise_;
  std::optional<SolutionBundle> bundle_;
  std::optional<CellRelation> relation_;

  std::vector<std::string> artifacts_;
  std::vector<Verdict> verdicts_;
};

std::vector<std::size_t> parse_projection(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (const auto& part : text::split(s, ',')) out.push_back(text::parse_u64(text::trim(part), "--project"));
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "reach",      "invariance", "limits",
                                                 "measure",  "recurrence", "check"};
  return names;
}

int run_command(const std::string& command, const RunConfig& config, const RunOptions& options, std::ostream& out) {
  Run run(command, config, options);
  return run.execute(out);
}

int run_plot(const std::string& artifact, const RunOptions& options, std::ostream& out) {
  const fs::path src(artifact);
  const fs::path dir = options.out_dir.empty() ? (fs::is_directory(src) ? src.parent_path() : src.parent_path())
                                               : fs::path(options.out_dir);
  const auto stem = fs::is_directory(src) ? src.lexically_normal().filename().string() : src.stem().string();
  const auto svg = plot_artifact(artifact, {options.project, stem});
  fs::create_directories(dir.empty() ? fs::path(".") : dir);
  const auto target = (dir.empty() ? fs::path(".") : dir) / (stem.empty() ? "plot.svg" : stem + ".svg");
  text::write_file(target.string(), svg);
  out << fmt::format("wrote {}\n", target.string());
  return exit_pass;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solution-space dynamics: simulate inclusions, build cell relations, check invariance, "
               "limit sets and invariant measures.",
               "ydyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version));

  std::string config_path, out_dir, format, project;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string artifact;

  const std::map<std::string, std::string> about = {
      {"simulate", "sample the declared inclusion into a solution bundle"},
      {"reach", "reach tube V(k)E for k up to analysis.reach_steps"},
      {"invariance", "viability kernels and weak/strong invariance verdicts"},
      {"limits", "omega and alpha limit sets of the base cells"},
      {"measure", "construct a measure and test sub-invariance"},
      {"recurrence", "Poincare recurrence and full measure of the recurrent set"},
      {"check", "axiom diagnostics and the theorem suite"},
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "configuration file or run manifest")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "random seed (overrides [solver] seed)");
    sub->add_option("--threads", threads, "worker threads (0: YDYN_THREADS or all cores)");
    sub->add_option("--format", format, "artifact format")->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--project", project, "coordinates to plot, e.g. 0,2");
  }
  auto* plot = app.add_subcommand("plot", "render a bundle directory or CSV artifact as SVG");
  plot->add_option("artifact", artifact, "bundle directory or artifact file")->required();
  plot->add_option("--out", out_dir, "output directory");
  plot->add_option("--project", project, "coordinates to plot, e.g. 0,2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  try {
    RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.threads = threads;
    if (!format.empty()) options.format = output_format_from_string(format);
    options.project = parse_projection(project);
    if (plot->parsed()) return run_plot(artifact, options, out);
    for (const auto* sub : app.get_subcommands()) {
      const auto config = load_config(config_path);
      return run_command(sub->get_name(), config, options, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace ydyn::cli
