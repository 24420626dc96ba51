/**
 * @file invariance_limits.hpp
 * @brief Limit sets, recurrence and invariance verdicts on a cell relation.
 *
 * Forward reach sets are restricted to the forward-viable cells (those
 * with an infinite forward path), backward ones to the backward-viable
 * cells. On an imported relation and a core cell this reproduces the exact
 * kernel results, since everything reachable from a core cell in either
 * direction is then on the core.
 */
#ifndef YDYN_INVARIANCE_LIMITS_HPP
#define YDYN_INVARIANCE_LIMITS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ydyn/phase_space.hpp"
#include "ydyn/semigroup.hpp"

namespace ydyn {

/// Orbit R_0, R_1, ... of a set under a deterministic set map, kept until
/// the first repeat. When found, R_{start + period} = R_start and `sets`
/// holds R_0 .. R_{start + period - 1}; otherwise R_0 .. R_{n_max}.
struct SubsetCycle {
  std::vector<Bits> sets;
  std::size_t start = 0;
  std::size_t period = 0;
  bool found() const { return period > 0; }
  /// Union over the cycle, or over the tail [n_max/2, n_max] when none was found.
  Bits limit_union() const;
};

/// Repeats are detected by hashing each set and re-verifying on collision.
SubsetCycle find_subset_cycle(Bits start, const std::function<Bits(const Bits&)>& step, std::size_t n_max);

/// Default cycle-search length: 4 x cell count.
std::size_t default_limit_steps(const CellRelation& v);

/// Default inflation for weak-invariance verdicts: 0 on imported relations, 1 otherwise.
std::size_t default_limit_inflation(const CellRelation& v);

struct LimitSetReport {
  std::size_t base_cell = 0;
  CellSet omega;
  CellSet alpha;
  std::size_t stabilization_step = 0;  ///< first n of the detected ω cycle
  std::size_t period = 0;              ///< 0 when no cycle was found
  std::size_t alpha_period = 0;
  bool stabilized = false;             ///< ω cycle found within the step budget
  bool alpha_stabilized = false;
  bool weak_invariant = false;
  std::size_t inflation = 0;
};

/// ω from the cycle of n -> R_n, R_0 = {x}, R_{n+1} = V(1)R_n ∩ forward-viable;
/// α the same backwards. Without a cycle by n = n_max the tail union over
/// [n_max/2, n_max] is reported with stabilized = false.
/// Throws EmptySolutionError when x is not forward-viable. α is empty when x
/// is not backward-viable.
LimitSetReport omega_limit_grid(const CellRelation& v, std::size_t x, std::optional<std::size_t> n_max = {},
                                std::optional<std::size_t> inflation = {});

/// Core cells x with x in ω(x).
CellSet recurrent_cells(const CellRelation& v, std::optional<std::size_t> n_max = {}, std::size_t threads = 1);

/// ω(x) is contained in the viability kernel of its own inflation.
bool check_theorem_B(const CellRelation& v, std::size_t x, std::optional<std::size_t> n_max = {},
                     std::optional<std::size_t> inflation = {});

/// One-step images and preimages of a ∩ core stay in a, within the core.
bool strong_invariance_grid(const CellRelation& v, const CellSet& a);

std::string to_json(const LimitSetReport& report);

}  // namespace ydyn

#endif  // YDYN_INVARIANCE_LIMITS_HPP
