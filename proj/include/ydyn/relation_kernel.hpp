/**
 * @file relation_kernel.hpp
 * @brief Exact invariance, limit-set and measure computations on a finite relation.
 *
 * The solution space of a relation is taken to be the set of its
 * bi-infinite paths. A state lies on such a path exactly when it belongs
 * to the viable core of the full state set, so states off the core have no
 * solution through them. Every result here is exact: there are no
 * tolerances except in the stationary-measure solve.
 */
#ifndef YDYN_RELATION_KERNEL_HPP
#define YDYN_RELATION_KERNEL_HPP

#include <cstddef>
#include <map>
#include <vector>

#include "ydyn/measure.hpp"
#include "ydyn/relation.hpp"

namespace ydyn::kernel {

using StateSet = Bits;

inline constexpr std::size_t default_enumeration_cap = 20;
inline constexpr std::size_t exact_measure_limit = 50;
inline constexpr double power_iteration_tolerance = 1e-12;
inline constexpr std::size_t power_iteration_cap = 1'000'000;

StateSet empty_set(const Relation& r);
StateSet full_set(const Relation& r);
StateSet make_set(const Relation& r, const std::vector<std::size_t>& states);

/// Largest subset of `a` in which every state has a successor and a
/// predecessor, found by iterated removal.
StateSet viable_core(const Relation& r, const StateSet& a);

/// Every state of `a` lies on a bi-infinite path inside `a`.
bool is_weakly_invariant(const Relation& r, const StateSet& a);

/// No bi-infinite path meets both `a` and its complement. States of `a`
/// that lie on no bi-infinite path impose nothing.
bool is_strongly_invariant(const Relation& r, const StateSet& a);

/// All weakly invariant subsets by exhaustive scan, in ascending bitmask
/// order. Decides each subset through cycle reachability rather than
/// viable_core, so it can serve as that function's oracle.
std::vector<StateSet> enumerate_weakly_invariant(const Relation& r,
                                                 std::size_t cap = default_enumeration_cap);

/// n >= 0: n-step successors along complete trajectories; n < 0: |n|-step
/// predecessors. reach(r, e, 0) = e ∩ core.
StateSet reach(const Relation& r, const StateSet& e, long n);

/// Union over the eventual cycle of n -> reach(r, {x}, n).
/// Throws EmptySolutionError when x is off the viable core.
StateSet omega_limit(const Relation& r, std::size_t x);
StateSet alpha_limit(const Relation& r, std::size_t x);

/// Core states x with x in omega_limit(r, x).
StateSet recurrent_states(const Relation& r);

using EdgeWeights = std::map<Edge, double>;

/// Stationary distribution of the Markov chain obtained by row-normalizing
/// `weights`. The chain lives on the largest set of states with positive
/// weight into that same set. When several closed classes exist the result
/// is the Cesàro limit started from the uniform distribution on that set.
/// Exact linear solves up to exact_measure_limit states, power iteration
/// above.
DiscreteMeasure markov_measure(const Relation& r, const EdgeWeights& weights);

}  // namespace ydyn::kernel

#endif  // YDYN_RELATION_KERNEL_HPP
