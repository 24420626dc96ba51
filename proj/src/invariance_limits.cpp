#include "ydyn/invariance_limits.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "json.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/parallel.hpp"
#include "ydyn/relation_kernel.hpp"

namespace ydyn {

Bits SubsetCycle::limit_union() const {
  Bits out(sets.empty() ? 0 : sets.front().size());
  const std::size_t from = found() ? start : (sets.size() - 1) / 2;
  for (std::size_t n = from; n < sets.size(); ++n) out |= sets[n];
  return out;
}

SubsetCycle find_subset_cycle(Bits start, const std::function<Bits(const Bits&)>& step, std::size_t n_max) {
  SubsetCycle out;
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen;
  const std::hash<Bits> hasher;
  Bits cur = std::move(start);
  for (std::size_t n = 0;; ++n) {
    auto& bucket = seen[hasher(cur)];
    for (auto m : bucket) {
      if (out.sets[m] == cur) {
        out.start = m;
        out.period = n - m;
        return out;
      }
    }
    if (n > n_max) return out;
    bucket.push_back(n);
    out.sets.push_back(cur);
    cur = step(cur);
  }
}

std::size_t default_limit_steps(const CellRelation& v) { return 4 * v.cell_count(); }

std::size_t default_limit_inflation(const CellRelation& v) { return v.mode() == RelationMode::imported ? 0 : 1; }

namespace {

SubsetCycle directed_cycle(const Relation& r, std::size_t x, const Bits& viable, bool forward, std::size_t n_max) {
  Bits start(r.size());
  start.set(x);
  return find_subset_cycle(
      std::move(start), [&](const Bits& s) { return (forward ? r.image(s) : r.preimage(s)) & viable; }, n_max);
}

bool weakly_invariant_up_to(const CellRelation& v, const CellSet& omega, std::size_t inflation) {
  return omega.is_subset_of(viability_kernel(v, inflate(omega, inflation)));
}

}  // namespace

LimitSetReport omega_limit_grid(const CellRelation& v, std::size_t x, std::optional<std::size_t> n_max,
                                std::optional<std::size_t> inflation) {
  const auto& grid = v.grid();
  if (x >= v.cell_count()) throw DomainError(fmt::format("cell {} outside the grid", x));
  const std::size_t steps = n_max.value_or(default_limit_steps(v));
  const std::size_t radius = inflation.value_or(default_limit_inflation(v));
  const CellSet all = CellSet::full(grid);
  const CellSet fwd = forward_viable(v, all);
  if (!fwd.contains(x)) throw EmptySolutionError(fmt::format("no forward solution through cell {}", x));
  const CellSet bwd = backward_viable(v, all);

  const auto w = directed_cycle(v.relation(), x, fwd.bits(), true, steps);
  LimitSetReport report{.base_cell = x,
                        .omega = CellSet(grid, w.limit_union()),
                        .alpha = CellSet(grid),
                        .stabilization_step = w.start,
                        .period = w.period,
                        .alpha_period = 0,
                        .stabilized = w.found(),
                        .alpha_stabilized = false,
                        .weak_invariant = false,
                        .inflation = radius};
  if (bwd.contains(x)) {
    const auto a = directed_cycle(v.relation(), x, bwd.bits(), false, steps);
    report.alpha = CellSet(grid, a.limit_union());
    report.alpha_period = a.period;
    report.alpha_stabilized = a.found();
  }
  report.weak_invariant = weakly_invariant_up_to(v, report.omega, radius);
  return report;
}

CellSet recurrent_cells(const CellRelation& v, std::optional<std::size_t> n_max, std::size_t threads) {
  const auto& grid = v.grid();
  const std::size_t steps = n_max.value_or(default_limit_steps(v));
  const CellSet core = viability_kernel(v, CellSet::full(grid));
  const CellSet fwd = forward_viable(v, CellSet::full(grid));
  const auto cells = core.cells();
  std::vector<char> hit(cells.size(), 0);
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    const auto w = directed_cycle(v.relation(), cells[k], fwd.bits(), true, steps);
    hit[k] = w.limit_union().test(cells[k]);
  });
  CellSet out(grid);
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (hit[k]) out.insert(cells[k]);
  return out;
}

bool check_theorem_B(const CellRelation& v, std::size_t x, std::optional<std::size_t> n_max,
                     std::optional<std::size_t> inflation) {
  return omega_limit_grid(v, x, n_max, inflation).weak_invariant;
}

bool strong_invariance_grid(const CellRelation& v, const CellSet& a) {
  const CellSet core = viability_kernel(v, CellSet::full(v.grid()));
  const CellSet inside = a & core;
  return (reach_set(v, inside, 1) & core).is_subset_of(a) && (reach_set(v, inside, -1) & core).is_subset_of(a);
}

std::string to_json(const LimitSetReport& report) {
  nlohmann::ordered_json j;
  j["base_cell"] = report.base_cell;
  j["omega"] = report.omega.cells();
  j["alpha"] = report.alpha.cells();
  j["period"] = report.period;
  j["stabilized"] = report.stabilized;
  j["weak_invariant"] = report.weak_invariant;
  j["inflation"] = report.inflation;
  j["stabilization_step"] = report.stabilization_step;
  j["alpha_period"] = report.alpha_period;
  j["alpha_stabilized"] = report.alpha_stabilized;
  return j.dump(2);
}

}  // namespace ydyn
