#include "ydyn/relation_kernel.hpp"

#include <cmath>
#include <cstdint>
#include <deque>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn::kernel {

StateSet empty_set(const Relation& r) { return StateSet(r.size()); }

StateSet full_set(const Relation& r) {
  StateSet s(r.size());
  s.set();
  return s;
}

StateSet make_set(const Relation& r, const std::vector<std::size_t>& states) {
  StateSet s(r.size());
  for (auto x : states) {
    if (x >= r.size()) throw DomainError(fmt::format("state {} outside {} states", x, r.size()));
    s.set(x);
  }
  return s;
}

namespace {

void require_size(const Relation& r, const StateSet& a) {
  if (a.size() != r.size())
    throw DomainError(fmt::format("state set of size {} for a relation of {} states", a.size(), r.size()));
}

}  // namespace

StateSet viable_core(const Relation& r, const StateSet& a) {
  require_size(r, a);
  const std::size_t n = r.size();
  StateSet core = a;
  std::vector<std::size_t> succ_in(n, 0), pred_in(n, 0);
  std::deque<std::size_t> doomed;
  for (auto x = core.find_first(); x != StateSet::npos; x = core.find_next(x)) {
    for (auto y : r.successors(x)) succ_in[x] += core.test(y);
    for (auto y : r.predecessors(x)) pred_in[x] += core.test(y);
    if (succ_in[x] == 0 || pred_in[x] == 0) doomed.push_back(x);
  }
  while (!doomed.empty()) {
    const auto x = doomed.front();
    doomed.pop_front();
    if (!core.test(x)) continue;
    core.reset(x);
    for (auto y : r.predecessors(x)) {
      if (core.test(y) && --succ_in[y] == 0) doomed.push_back(y);
    }
    for (auto y : r.successors(x)) {
      if (core.test(y) && --pred_in[y] == 0) doomed.push_back(y);
    }
  }
  return core;
}

bool is_weakly_invariant(const Relation& r, const StateSet& a) { return viable_core(r, a) == a; }

bool is_strongly_invariant(const Relation& r, const StateSet& a) {
  require_size(r, a);
  const StateSet core = viable_core(r, full_set(r));
  const StateSet inside = a & core;
  for (auto x = inside.find_first(); x != StateSet::npos; x = inside.find_next(x)) {
    for (auto y : r.successors(x))
      if (core.test(y) && !a.test(y)) return false;
    for (auto y : r.predecessors(x))
      if (core.test(y) && !a.test(y)) return false;
  }
  return true;
}

namespace {

using Mask = std::uint32_t;

// Reflexive-transitive closure of `from` along `step` masks, staying in `within`.
Mask closure(Mask from, Mask within, const std::vector<Mask>& step) {
  Mask seen = from & within;
  Mask frontier = seen;
  while (frontier) {
    Mask next = 0;
    for (Mask f = frontier; f; f &= f - 1) next |= step[static_cast<std::size_t>(__builtin_ctz(f))];
    next &= within & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

// A is weakly invariant iff every state of A can reach a cycle inside A
// and can be reached from a cycle inside A.
bool weakly_invariant_by_paths(Mask a, std::size_t n, const std::vector<Mask>& succ,
                               const std::vector<Mask>& pred) {
  Mask on_cycle = 0;
  for (std::size_t x = 0; x < n; ++x) {
    const Mask bit = Mask{1} << x;
    if (!(a & bit)) continue;
    Mask strictly_after = 0;
    for (Mask s = succ[x] & a; s; s &= s - 1) strictly_after |= Mask{1} << __builtin_ctz(s);
    if (closure(strictly_after, a, succ) & bit) on_cycle |= bit;
  }
  const Mask reaches_cycle = closure(on_cycle, a, pred);
  const Mask reached_from_cycle = closure(on_cycle, a, succ);
  return (a & ~(reaches_cycle & reached_from_cycle)) == 0;
}

}  // namespace

std::vector<StateSet> enumerate_weakly_invariant(const Relation& r, std::size_t cap) {
  const std::size_t n = r.size();
  if (n > cap || n > 31)
    throw CapacityError(fmt::format("subset enumeration over {} states exceeds the cap of {}", n,
                                    std::min<std::size_t>(cap, 31)));
  std::vector<Mask> succ(n, 0), pred(n, 0);
  for (const auto& [i, j] : r.edges()) {
    succ[i] |= Mask{1} << j;
    pred[j] |= Mask{1} << i;
  }
  std::vector<StateSet> out;
  const Mask end = Mask{1} << n;
  for (Mask a = 0; a < end; ++a) {
    if (!weakly_invariant_by_paths(a, n, succ, pred)) continue;
    StateSet s(n, a);
    out.push_back(std::move(s));
  }
  return out;
}

StateSet reach(const Relation& r, const StateSet& e, long n) {
  require_size(r, e);
  const StateSet core = viable_core(r, full_set(r));
  StateSet current = e & core;
  const long steps = n < 0 ? -n : n;
  for (long k = 0; k < steps; ++k) current = (n > 0 ? r.image(current) : r.preimage(current)) & core;
  return current;
}

namespace {

StateSet limit_set(const Relation& r, std::size_t x, bool forward) {
  if (x >= r.size()) throw DomainError(fmt::format("state {} outside {} states", x, r.size()));
  const StateSet core = viable_core(r, full_set(r));
  if (!core.test(x))
    throw EmptySolutionError(fmt::format("state {} lies on no complete trajectory", x));
  std::map<StateSet, std::size_t> first_seen;
  std::vector<StateSet> sequence;
  StateSet current(r.size());
  current.set(x);
  while (true) {
    const auto [it, inserted] = first_seen.emplace(current, sequence.size());
    if (!inserted) {
      StateSet out(r.size());
      for (std::size_t k = it->second; k < sequence.size(); ++k) out |= sequence[k];
      return out;
    }
    sequence.push_back(current);
    current = (forward ? r.image(current) : r.preimage(current)) & core;
  }
}

}  // namespace

StateSet omega_limit(const Relation& r, std::size_t x) { return limit_set(r, x, true); }
StateSet alpha_limit(const Relation& r, std::size_t x) { return limit_set(r, x, false); }

StateSet recurrent_states(const Relation& r) {
  const StateSet core = viable_core(r, full_set(r));
  StateSet out(r.size());
  for (auto x = core.find_first(); x != StateSet::npos; x = core.find_next(x))
    if (omega_limit(r, x).test(x)) out.set(x);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Closed communicating classes of the support graph of p (rows/cols = chain states).
std::vector<std::vector<std::size_t>> closed_classes(const Matrix& p) {
  const auto m = static_cast<std::size_t>(p.rows());
  std::vector<Bits> reach(m, Bits(m));
  for (std::size_t s = 0; s < m; ++s) {
    std::deque<std::size_t> queue{s};
    reach[s].set(s);
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      for (std::size_t y = 0; y < m; ++y) {
        if (p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) > 0.0 && !reach[s].test(y)) {
          reach[s].set(y);
          queue.push_back(y);
        }
      }
    }
  }
  std::vector<std::vector<std::size_t>> classes;
  Bits assigned(m);
  for (std::size_t s = 0; s < m; ++s) {
    if (assigned.test(s)) continue;
    // s is in a closed class iff everything it reaches reaches it back
    bool closed = true;
    for (auto y = reach[s].find_first(); y != Bits::npos; y = reach[s].find_next(y))
      if (!reach[y].test(s)) closed = false;
    if (!closed) continue;
    std::vector<std::size_t> cls;
    for (auto y = reach[s].find_first(); y != Bits::npos; y = reach[s].find_next(y)) {
      cls.push_back(y);
      assigned.set(y);
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

Vector stationary_of_class(const Matrix& p, const std::vector<std::size_t>& cls) {
  const auto k = static_cast<Eigen::Index>(cls.size());
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(j, i) = p(static_cast<Eigen::Index>(cls[static_cast<std::size_t>(i)]),
                  static_cast<Eigen::Index>(cls[static_cast<std::size_t>(j)])) - (i == j ? 1.0 : 0.0);
  a.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs(k - 1) = 1.0;
  return a.fullPivLu().solve(rhs);
}

Vector exact_stationary(const Matrix& p) {
  const auto m = p.rows();
  const auto classes = closed_classes(p);
  std::vector<int> class_of(static_cast<std::size_t>(m), -1);
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (auto x : classes[c]) class_of[x] = static_cast<int>(c);
  std::vector<std::size_t> transient;
  for (Eigen::Index x = 0; x < m; ++x)
    if (class_of[static_cast<std::size_t>(x)] < 0) transient.push_back(static_cast<std::size_t>(x));

  const auto t = static_cast<Eigen::Index>(transient.size());
  Matrix i_minus_q = Matrix::Identity(t, t);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < t; ++j)
      i_minus_q(i, j) -= p(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(i)]),
                           static_cast<Eigen::Index>(transient[static_cast<std::size_t>(j)]));
  const auto lu = i_minus_q.fullPivLu();

  Vector mu = Vector::Zero(m);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    // mass flowing into class c from a uniform start
    double mass = static_cast<double>(classes[c].size());
    if (t > 0) {
      Vector b = Vector::Zero(t);
      for (Eigen::Index i = 0; i < t; ++i)
        for (auto y : classes[c])
          b(i) += p(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(y));
      mass += lu.solve(b).sum();
    }
    mass /= static_cast<double>(m);
    const Vector pi = stationary_of_class(p, classes[c]);
    for (std::size_t k = 0; k < classes[c].size(); ++k)
      mu(static_cast<Eigen::Index>(classes[c][k])) += mass * std::max(pi(static_cast<Eigen::Index>(k)), 0.0);
  }
  return mu;
}

Vector power_stationary(const Matrix& p) {
  const auto m = p.rows();
  Vector mu = Vector::Constant(m, 1.0 / static_cast<double>(m));
  const Matrix pt = p.transpose();
  for (std::size_t it = 0; it < power_iteration_cap; ++it) {
    Vector next = pt * mu;
    const double change = (next - mu).lpNorm<1>();
    mu = std::move(next);
    if (change <= power_iteration_tolerance) return mu;
  }
  throw ConvergenceError(fmt::format("power iteration did not reach {} within {} iterations",
                                     power_iteration_tolerance, power_iteration_cap));
}

}  // namespace

DiscreteMeasure markov_measure(const Relation& r, const EdgeWeights& weights) {
  const std::size_t n = r.size();
  const StateSet core = viable_core(r, full_set(r));
  for (const auto& [edge, w] : weights) {
    if (!r.has_edge(edge.first, edge.second))
      throw DomainError(fmt::format("weight on non-edge {} -> {}", edge.first, edge.second));
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError(fmt::format("weight {} on edge {} -> {} is not a nonnegative number", w,
                                    edge.first, edge.second));
    if (w > 0.0 && (!core.test(edge.first) || !core.test(edge.second)))
      throw DomainError(fmt::format("edge {} -> {} leaves the viable core", edge.first, edge.second));
  }

  // Largest set in which every state has positive weight into the set.
  StateSet live = core;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto x = live.find_first(); x != StateSet::npos; x = live.find_next(x)) {
      double out = 0.0;
      for (auto y : r.successors(x)) {
        if (!live.test(y)) continue;
        if (auto it = weights.find({x, y}); it != weights.end()) out += it->second;
      }
      if (out <= 0.0) {
        live.reset(x);
        changed = true;
      }
    }
  }
  if (live.none()) throw ConvergenceError("no state carries outgoing weight; no stationary distribution");

  std::vector<std::size_t> states;
  std::vector<Eigen::Index> local(n, -1);
  for (auto x = live.find_first(); x != StateSet::npos; x = live.find_next(x)) {
    local[x] = static_cast<Eigen::Index>(states.size());
    states.push_back(x);
  }
  const auto m = static_cast<Eigen::Index>(states.size());
  Matrix p = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto x = states[static_cast<std::size_t>(i)];
    double total = 0.0;
    for (auto y : r.successors(x)) {
      if (!live.test(y)) continue;
      if (auto it = weights.find({x, y}); it != weights.end()) {
        p(i, local[y]) = it->second;
        total += it->second;
      }
    }
    p.row(i) /= total;
  }

  const Vector mu = states.size() <= exact_measure_limit ? exact_stationary(p) : power_stationary(p);
  std::vector<double> out(n, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) out[states[static_cast<std::size_t>(i)]] = std::max(mu(i), 0.0);
  return DiscreteMeasure::normalized(std::move(out));
}

}  // namespace ydyn::kernel
