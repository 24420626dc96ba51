#include "ydyn/measures.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/invariance_limits.hpp"
#include "ydyn/parallel.hpp"

namespace ydyn {

std::vector<CellSet> single_cells(const GridPtr& grid) {
  std::vector<CellSet> out;
  out.reserve(grid->cell_count());
  for (std::size_t c = 0; c < grid->cell_count(); ++c) out.push_back(CellSet::of(grid, {c}));
  return out;
}

std::vector<CellSet> dyadic_family(const GridPtr& grid) {
  if (grid->space().kind() == SpaceKind::finite) return single_cells(grid);
  // aligned blocks per dimension as [first, last] index ranges
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> blocks(grid->dimension());
  for (std::size_t d = 0; d < grid->dimension(); ++d) {
    const auto n = grid->resolution()[d];
    for (std::size_t w = 1; w <= n; w *= 2)
      for (std::size_t j = 0; (j + 1) * w <= n; ++j) blocks[d].emplace_back(j * w, (j + 1) * w - 1);
  }
  std::vector<CellSet> out;
  std::vector<std::size_t> pick(grid->dimension(), 0);
  while (true) {
    CellSet set(grid);
    for (std::size_t c = 0; c < grid->cell_count(); ++c) {
      const auto idx = grid->multi_index(c);
      bool inside = true;
      for (std::size_t d = 0; d < idx.size() && inside; ++d)
        inside = idx[d] >= blocks[d][pick[d]].first && idx[d] <= blocks[d][pick[d]].second;
      if (inside) set.insert(c);
    }
    out.push_back(std::move(set));
    std::size_t d = 0;
    while (d < pick.size() && ++pick[d] == blocks[d].size()) pick[d++] = 0;
    if (d == pick.size()) break;
  }
  return out;
}

std::vector<CellSet> random_family(const GridPtr& grid, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CellSet> out;
  while (out.size() < count) {
    CellSet set(grid);
    for (std::size_t c = 0; c < grid->cell_count(); ++c)
      if (rng() >> 63) set.insert(c);
    if (!set.empty()) out.push_back(std::move(set));
  }
  return out;
}

std::vector<CellSet> random_arcs(const GridPtr& grid, std::size_t count, std::uint64_t seed) {
  if (grid->dimension() != 1) throw DomainError("random arcs need a one-dimensional grid");
  const std::size_t n = grid->cell_count();
  const bool wraps = grid->space().kind() == SpaceKind::torus;
  std::mt19937_64 rng(seed);
  std::vector<CellSet> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t first = rng() % n;
    const std::size_t length = 1 + rng() % (wraps ? n : n - first);
    CellSet set(grid);
    for (std::size_t i = 0; i < length; ++i) set.insert((first + i) % n);
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<CellSet> default_family(const GridPtr& grid, std::uint64_t seed, std::size_t count) {
  auto out = single_cells(grid);
  for (auto& s : dyadic_family(grid)) out.push_back(std::move(s));
  for (auto& s : random_family(grid, count, seed)) out.push_back(std::move(s));
  return out;
}

std::vector<long> steps_for_times(const CellRelation& v, const std::vector<double>& times) {
  std::vector<long> out;
  for (double t : times) out.push_back(grid_index(t, v.step()));
  return out;
}

DiscreteMeasure krylov_bogoliubov(const CellRelation& v, std::size_t x0, std::size_t horizon) {
  if (horizon < min_averaging_horizon)
    throw HorizonError(fmt::format("averaging horizon {} is below {} steps", horizon, min_averaging_horizon));
  const auto fwd = forward_viable(v, CellSet::full(v.grid()));
  if (x0 >= v.cell_count() || !fwd.contains(x0))
    throw EmptySolutionError(fmt::format("no forward solution through cell {}", x0));
  std::vector<CompensatedSum> acc(v.cell_count());
  Bits cur(v.cell_count());
  cur.set(x0);
  for (std::size_t n = 0; n < horizon; ++n) {
    const double w = 1.0 / static_cast<double>(cur.count());
    for (auto i = cur.find_first(); i != Bits::npos; i = cur.find_next(i)) acc[i].add(w);
    cur = v.relation().image(cur) & fwd.bits();
  }
  std::vector<double> weights;
  weights.reserve(acc.size());
  for (const auto& a : acc) weights.push_back(a.value());
  return DiscreteMeasure::normalized(std::move(weights));
}

DiscreteMeasure krylov_bogoliubov(const Trajectory& phi, const GridPtr& grid, std::size_t horizon) {
  if (horizon < min_averaging_horizon)
    throw HorizonError(fmt::format("averaging horizon {} is below {} steps", horizon, min_averaging_horizon));
  if (!(phi.space() == grid->space())) throw DomainError("trajectory and grid live in different spaces");
  const long last = static_cast<long>(horizon) - 1;
  if (phi.start_index() > 0 || phi.end_index() < last)
    throw HorizonError(fmt::format("trajectory covers steps [{}, {}], averaging needs [0, {}]", phi.start_index(),
                                   phi.end_index(), last));
  std::vector<double> counts(grid->cell_count(), 0.0);
  for (long k = 0; k <= last; ++k) counts[grid->locate(phi.at_index(k))] += 1.0;
  return DiscreteMeasure::normalized(std::move(counts));
}

std::string_view to_string(RecurrenceVerdict verdict) {
  switch (verdict) {
    case RecurrenceVerdict::pass: return "pass";
    case RecurrenceVerdict::fail: return "fail";
    case RecurrenceVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

void require_measure_on(const DiscreteMeasure& mu, const CellRelation& v) {
  if (mu.size() != v.cell_count())
    throw DomainError(fmt::format("measure has {} weights, relation has {} cells", mu.size(), v.cell_count()));
}

template <class Value>
MeasureReport scan_pairs(const DiscreteMeasure& mu, const CellRelation& v, const std::vector<CellSet>& family,
                         const std::vector<long>& steps, double tolerance, std::string name, std::size_t threads,
                         Value value, bool list_violations) {
  require_measure_on(mu, v);
  const std::size_t pairs = family.size() * steps.size();
  std::vector<double> values(pairs);
  parallel_for(pairs, threads, [&](std::size_t p) {
    values[p] = value(family[p / steps.size()], steps[p % steps.size()]);
  });
  MeasureReport report{.family = std::move(name),
                       .tolerance = tolerance,
                       .pairs_tested = pairs,
                       .worst_pair = std::nullopt,
                       .strict_violations = {},
                       .recurrence = {}};
  for (std::size_t p = 0; p < pairs; ++p) {
    const PairResult r{p / steps.size(), steps[p % steps.size()], values[p]};
    if (!report.worst_pair || r.value > report.worst_pair->value) report.worst_pair = r;
    if (list_violations && r.value > tolerance) report.strict_violations.push_back(r);
  }
  return report;
}

}  // namespace

MeasureReport check_subinvariance(const DiscreteMeasure& mu, const CellRelation& v, const std::vector<CellSet>& family,
                                  const std::vector<long>& steps, double tolerance, std::string family_name,
                                  std::size_t threads) {
  return scan_pairs(
      mu, v, family, steps, tolerance, std::move(family_name), threads,
      [&](const CellSet& a, long t) { return mu.mass(a) - mu.mass(reach_set(v, a, -t)); }, false);
}

MeasureReport check_strict_invariance(const DiscreteMeasure& mu, const CellRelation& v,
                                      const std::vector<CellSet>& family, const std::vector<long>& steps,
                                      double tolerance, std::string family_name, std::size_t threads) {
  return scan_pairs(
      mu, v, family, steps, tolerance, std::move(family_name), threads,
      [&](const CellSet& a, long t) { return std::abs(mu.mass(a) - mu.mass(reach_set(v, a, t))); }, true);
}

PoincareResult poincare_check(const DiscreteMeasure& mu, const CellRelation& v, const CellSet& b,
                              std::optional<std::size_t> n_max, double tolerance) {
  require_measure_on(mu, v);
  const auto& r = v.relation();
  const auto cycle =
      find_subset_cycle(b.bits(), [&](const Bits& s) { return r.preimage(s); }, n_max.value_or(default_limit_steps(v)));
  PoincareResult out{.verdict = RecurrenceVerdict::inconclusive,
                     .returning = CellSet(b.grid(), cycle.limit_union()),
                     .mass = mu.mass(b),
                     .returning_mass = 0.0,
                     .period = cycle.period};
  out.returning_mass = mu.mass(b & out.returning);
  if (cycle.found())
    out.verdict = std::abs(out.returning_mass - out.mass) <= tolerance ? RecurrenceVerdict::pass
                                                                        : RecurrenceVerdict::fail;
  return out;
}

TheoremDResult theorem_D_check(const DiscreteMeasure& mu, const CellSet& recurrent, std::size_t inflation,
                               double tolerance) {
  if (mu.size() != recurrent.cell_count()) throw DomainError("measure and recurrent set sizes differ");
  const auto covered = inflate(recurrent, inflation);
  const double missing = mu.mass(~covered);
  return {mu.mass(covered), missing, missing <= tolerance};
}

namespace {

nlohmann::ordered_json pair_json(const PairResult& p) {
  return {{"set", p.set}, {"steps", p.steps}, {"value", p.value}};
}

}  // namespace

std::string to_json(const MeasureReport& report) {
  nlohmann::ordered_json j;
  j["max_violation"] = report.max_violation();
  j["pairs_tested"] = report.pairs_tested;
  j["worst_pair"] = report.worst_pair ? pair_json(*report.worst_pair) : nlohmann::ordered_json(nullptr);
  auto rec = nlohmann::ordered_json::array();
  for (const auto& p : report.recurrence)
    rec.push_back({{"verdict", to_string(p.verdict)},
                   {"mass", p.mass},
                   {"returning_mass", p.returning_mass},
                   {"period", p.period},
                   {"returning", p.returning.cells()}});
  j["recurrence"] = rec;
  auto strict = nlohmann::ordered_json::array();
  for (const auto& p : report.strict_violations) strict.push_back(pair_json(p));
  j["strict_violations"] = strict;
  j["family"] = report.family;
  j["tolerance"] = report.tolerance;
  j["passed"] = report.passed();
  return j.dump(2);
}

}  // namespace ydyn
