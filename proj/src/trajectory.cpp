#include "ydyn/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn {

namespace {

constexpr double grid_tolerance = 1e-9;

double index_quotient(double t, double step) { return t / step; }

long ceil_index(double t, double step) {
  const double q = index_quotient(t, step);
  return static_cast<long>(std::ceil(q - grid_tolerance * std::max(1.0, std::abs(q))));
}

long floor_index(double t, double step) {
  const double q = index_quotient(t, step);
  return static_cast<long>(std::floor(q + grid_tolerance * std::max(1.0, std::abs(q))));
}

void require_same_step(const Trajectory& a, const Trajectory& b) {
  if (a.step() != b.step())
    throw AlignmentError(fmt::format("trajectories have steps {} and {}", a.step(), b.step()));
}

// Largest d(phi_k, phi_{k+1}) / step over consecutive samples with indices in [lo, hi].
double lipschitz_modulus(const Trajectory& phi, long lo, long hi) {
  double best = 0.0;
  for (long k = std::max(lo, phi.start_index()); k < std::min(hi, phi.end_index()); ++k)
    best = std::max(best, phi.space().distance(phi.at_index(k), phi.at_index(k + 1)) / phi.step());
  return best;
}

double sup_distance(const Trajectory& phi, const Trajectory& psi, long lo, long hi) {
  double best = 0.0;
  for (long k = lo; k <= hi; ++k)
    best = std::max(best, phi.space().distance(phi.at_index(k), psi.at_index(k)));
  return best;
}

}  // namespace

long grid_index(double t, double step) {
  if (!(step > 0) || !std::isfinite(t))
    throw AlignmentError(fmt::format("time {} cannot be placed on a grid of step {}", t, step));
  const double q = index_quotient(t, step);
  const double k = std::round(q);
  if (std::abs(q - k) > grid_tolerance * std::max(1.0, std::abs(q)))
    throw AlignmentError(fmt::format("time {} is not a multiple of the step {}", t, step));
  return static_cast<long>(k);
}

Trajectory::Trajectory(Space space, double step, long start_index, std::vector<Point> samples,
                       WindowFlags flags)
    : space_(std::move(space)),
      step_(step),
      start_index_(start_index),
      samples_(std::move(samples)),
      flags_(flags) {
  if (!(step_ > 0) || !std::isfinite(step_))
    throw ConstructionError(fmt::format("trajectory step must be positive, got {}", step_));
  if (samples_.empty()) throw ConstructionError("trajectory needs at least one sample");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!space_.contains(samples_[i]))
      throw ConstructionError(fmt::format("sample {} lies outside the space", i));
    samples_[i] = space_.reduce(samples_[i]);
  }
}

const Point& Trajectory::at_index(long k) const {
  if (!defined_at_index(k))
    throw DomainError(fmt::format("time {} outside window [{}, {}]", static_cast<double>(k) * step_,
                                  start_time(), end_time()));
  return samples_[static_cast<std::size_t>(k - start_index_)];
}

Trajectory shift(const Trajectory& phi, long k) {
  return Trajectory(phi.space(), phi.step(), phi.start_index() - k, phi.samples(), phi.flags());
}

Trajectory shift_by_time(const Trajectory& phi, double t) { return shift(phi, grid_index(t, phi.step())); }

Point evaluate(const Trajectory& phi, double t) {
  const double u = t / phi.step() - static_cast<double>(phi.start_index());
  const double last = static_cast<double>(phi.size() - 1);
  if (!(u >= -grid_tolerance && u <= last + grid_tolerance))
    throw DomainError(
        fmt::format("time {} outside window [{}, {}]", t, phi.start_time(), phi.end_time()));
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= grid_tolerance) return phi.samples()[static_cast<std::size_t>(nearest)];
  const auto i = static_cast<std::size_t>(std::floor(u));
  const double frac = u - static_cast<double>(i);
  const Point& a = phi.samples()[i];
  if (phi.space().kind() == SpaceKind::finite) return a;
  const Point delta = phi.space().displacement(a, phi.samples()[i + 1]);
  Point out(a.size());
  for (std::size_t d = 0; d < a.size(); ++d) out[d] = a[d] + frac * delta[d];
  return phi.space().reduce(out);
}

double cu_distance(const Trajectory& phi, const Trajectory& psi, double t_lo, double t_hi) {
  require_same_step(phi, psi);
  if (!(t_lo <= t_hi)) throw DomainError(fmt::format("empty window [{}, {}]", t_lo, t_hi));
  for (const Trajectory* x : {&phi, &psi}) {
    const double eps = grid_tolerance * x->step();
    if (t_lo < x->start_time() - eps || t_hi > x->end_time() + eps)
      throw DomainError(fmt::format("window [{}, {}] not inside trajectory window [{}, {}]", t_lo, t_hi,
                                    x->start_time(), x->end_time()));
  }
  const long lo = ceil_index(t_lo, phi.step());
  const long hi = floor_index(t_hi, phi.step());
  return sup_distance(phi, psi, lo, hi);
}

Trajectory concatenate(const Trajectory& phi, const Trajectory& psi, double tau, double tol) {
  require_same_step(phi, psi);
  if (!(phi.space() == psi.space())) throw SwitchingError("trajectories live in different spaces");
  const long k = grid_index(tau, phi.step());
  const double gap = phi.space().distance(phi.at_index(k), psi.at_index(k));
  if (gap > tol)
    throw SwitchingError(fmt::format("gap {} at time {} exceeds tolerance {}", gap, tau, tol));
  std::vector<Point> samples(phi.samples().begin(),
                             phi.samples().begin() + (k - phi.start_index()));
  samples.insert(samples.end(), psi.samples().begin() + (k - psi.start_index()), psi.samples().end());
  WindowFlags flags;
  flags.left_truncated = phi.flags().left_truncated;
  flags.left_exited = phi.flags().left_exited;
  flags.right_truncated = psi.flags().right_truncated;
  flags.right_exited = psi.flags().right_exited;
  return Trajectory(phi.space(), phi.step(), phi.start_index(), std::move(samples), flags);
}

double total_variation(const Trajectory& phi) {
  double sum = 0.0;
  for (std::size_t i = 1; i < phi.size(); ++i)
    sum += phi.space().distance(phi.samples()[i - 1], phi.samples()[i]);
  return sum;
}

// ---------------------------------------------------------------------------

SolutionBundle::SolutionBundle(Space space, double step, std::vector<Trajectory> members,
                               Provenance provenance)
    : space_(std::move(space)), step_(step), provenance_(std::move(provenance)) {
  if (!(step_ > 0) || !std::isfinite(step_))
    throw ConstructionError(fmt::format("bundle step must be positive, got {}", step_));
  members_.reserve(members.size());
  for (auto& m : members) add(std::move(m));
}

void SolutionBundle::add(Trajectory member) {
  if (member.step() != step_)
    throw ConstructionError(fmt::format("member step {} differs from bundle step {}", member.step(), step_));
  if (!(member.space() == space_)) throw ConstructionError("member space differs from bundle space");
  members_.push_back(std::move(member));
}

SolutionBundle section(const SolutionBundle& s, const std::function<bool(const Point&)>& a) {
  SolutionBundle out(s.space(), s.step(), {}, s.provenance());
  for (const auto& phi : s.members())
    if (phi.defined_at_zero() && a(phi.at_index(0))) out.add(phi);
  return out;
}

SolutionBundle section(const SolutionBundle& s, const CellSet& a) {
  const auto& grid = *a.grid();
  return section(s, [&](const Point& x) { return a.contains(grid.locate(x)); });
}

SolutionBundle shift_closure(const SolutionBundle& s) {
  SolutionBundle out(s.space(), s.step(), {}, s.provenance());
  for (const auto& phi : s.members())
    for (long k = phi.start_index(); k <= phi.end_index(); ++k) out.add(shift(phi, k));
  return out;
}

SolutionBundle shift(const SolutionBundle& s, long k) {
  SolutionBundle out(s.space(), s.step(), {}, s.provenance());
  for (const auto& phi : s.members()) out.add(shift(phi, k));
  return out;
}

CellSet initial_cells(const SolutionBundle& s, const GridPtr& grid) {
  CellSet out(grid);
  for (const auto& phi : s.members())
    if (phi.defined_at_zero()) out.insert(grid->locate(phi.at_index(0)));
  return out;
}

// ---------------------------------------------------------------------------

bool AxiomReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return !c.required || c.passed; });
}

const AxiomCheck& AxiomReport::check(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw DomainError(fmt::format("no axiom check named '{}'", name));
}

AxiomReport check_axioms(const SolutionBundle& s, const GridPtr& grid, const AxiomOptions& options) {
  if (s.empty()) throw EmptySetError("axiom diagnostics need a nonempty bundle");
  if (!(grid->space() == s.space())) throw DomainError("grid and bundle live in different spaces");
  const double step = s.step();
  const long win_lo = options.t_minus ? ceil_index(*options.t_minus, step) : std::numeric_limits<long>::min();
  const long win_hi = options.t_plus ? floor_index(*options.t_plus, step) : std::numeric_limits<long>::max();
  auto lo_of = [&](const Trajectory& phi) { return std::max(win_lo, phi.start_index()); };
  auto hi_of = [&](const Trajectory& phi) { return std::min(win_hi, phi.end_index()); };

  AxiomReport report;
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> at_zero;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].defined_at_zero()) at_zero.push_back(i);

  // existence
  const CellSet hit = initial_cells(s, grid);
  report.existence_coverage =
      static_cast<double>(hit.size()) / static_cast<double>(grid->cell_count());
  report.checks.push_back({"existence", true, report.existence_coverage >= options.min_coverage - 1e-12,
                           report.existence_coverage,
                           fmt::format("{} of {} cells hold some phi(0)", hit.size(), grid->cell_count())});

  // uniqueness, grouped by the cell of phi(0)
  {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (auto i : at_zero) groups[grid->locate(s[i].at_index(0))].push_back(i);
    double spread = 0.0;
    for (const auto& [cell, ids] : groups) {
      for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
          const auto& phi = s[ids[a]];
          const auto& psi = s[ids[b]];
          const long lo = std::max(lo_of(phi), lo_of(psi));
          const long hi = std::min(hi_of(phi), hi_of(psi));
          if (lo <= hi) spread = std::max(spread, sup_distance(phi, psi, lo, hi));
        }
    }
    report.uniqueness_spread = spread;
    report.checks.push_back({"uniqueness", false, spread <= options.tol, spread,
                             fmt::format("{} initial cells, largest spread {}", groups.size(), spread)});
  }

  // compactness: uniform bound and equicontinuity modulus
  {
    double modulus = 0.0;
    double bound = 0.0;
    Point origin = s.space().lower();
    if (s.space().kind() == SpaceKind::finite) origin = {0.0};
    for (const auto& phi : s.members()) {
      modulus = std::max(modulus, lipschitz_modulus(phi, lo_of(phi), hi_of(phi)));
      for (long k = lo_of(phi); k <= hi_of(phi); ++k)
        bound = std::max(bound, s.space().distance(origin, phi.at_index(k)));
    }
    const double limit = options.lipschitz_bound ? *options.lipschitz_bound
                                                 : options.max_jump_fraction * s.space().diameter() / step;
    report.lipschitz_witness = modulus;
    report.lipschitz_limit = limit;
    report.uniform_bound = bound;
    const bool ok = std::isfinite(modulus) && std::isfinite(bound) && modulus <= limit + options.tol;
    report.checks.push_back({"compactness", true, ok, modulus,
                             fmt::format("Lipschitz witness {} against limit {}, uniform bound {}", modulus,
                                         limit, bound)});
  }

  // shift closure: the bundle stands for the shift orbit of its members
  {
    std::size_t failures = 0;
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    for (std::size_t n = 0; n < options.spot_checks; ++n) {
      const auto& phi = s[pick(rng)];
      const long len = static_cast<long>(phi.size());
      std::uniform_int_distribution<long> offset(-len, len);
      const long j = offset(rng), k = offset(rng);
      const auto moved = shift(phi, k);
      if (!(shift(moved, j) == shift(phi, j + k)) || !(shift(phi, 0) == phi)) ++failures;
      std::uniform_int_distribution<long> at(phi.start_index(), phi.end_index());
      const long i = at(rng);
      if (moved.at_index(i - k) != phi.at_index(i)) ++failures;
    }
    report.checks.push_back({"shift_closure", true, failures == 0, static_cast<double>(failures),
                             fmt::format("{} flow-law spot checks, {} failures", options.spot_checks, failures)});
  }

  // switching closure: splices of members meeting within tol stay in the compactness class
  {
    std::size_t spliced = 0, failures = 0;
    double worst = 0.0;
    if (s.size() >= 2) {
      std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
      for (std::size_t n = 0; n < options.spot_checks; ++n) {
        const auto a = pick(rng), b = pick(rng);
        if (a == b) continue;
        const auto& phi = s[a];
        const auto& psi = s[b];
        const long lo = std::max(lo_of(phi), lo_of(psi));
        const long hi = std::min(hi_of(phi), hi_of(psi));
        for (long k = lo; k <= hi; ++k) {
          if (s.space().distance(phi.at_index(k), psi.at_index(k)) > options.tol) continue;
          const auto joined = concatenate(phi, psi, static_cast<double>(k) * step, options.tol);
          const double m = lipschitz_modulus(joined, std::max(win_lo, joined.start_index()),
                                             std::min(win_hi, joined.end_index()));
          worst = std::max(worst, m);
          ++spliced;
          if (m > report.lipschitz_limit + options.tol) ++failures;
          break;
        }
      }
    }
    report.checks.push_back({"switching_closure", true, failures == 0, worst,
                             fmt::format("{} splices, {} outside the compactness class", spliced, failures)});
  }

  // subsequence surrogate: members with the nearest initial points against a reference
  {
    AxiomCheck c{"subsequence", false, true, 0.0, "fewer than two members defined at time 0"};
    if (at_zero.size() >= 2) {
      std::uniform_int_distribution<std::size_t> pick(0, at_zero.size() - 1);
      const auto& ref = s[at_zero[pick(rng)]];
      std::vector<std::pair<double, std::size_t>> near;
      for (auto i : at_zero) {
        if (&s[i] == &ref) continue;
        near.emplace_back(s.space().distance(s[i].at_index(0), ref.at_index(0)), i);
      }
      std::stable_sort(near.begin(), near.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      near.resize(std::min<std::size_t>(near.size(), 5));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [d0, i] : near) {
        const long lo = std::max(lo_of(ref), lo_of(s[i]));
        const long hi = std::min(hi_of(ref), hi_of(s[i]));
        best = std::min(best, sup_distance(ref, s[i], lo, hi));
      }
      c.value = best;
      c.passed = best <= options.tol;
      c.detail = fmt::format("closest of {} nearest-start members is {} away", near.size(), best);
    }
    report.checks.push_back(c);
  }
  return report;
}

CellSet equilibrium_points(const SolutionBundle& s, const GridPtr& grid, double tol) {
  CellSet out(grid);
  for (const auto& phi : s.members())
    if (phi.defined_at_zero() && total_variation(phi) <= tol) out.insert(grid->locate(phi.at_index(0)));
  return out;
}

}  // namespace ydyn
