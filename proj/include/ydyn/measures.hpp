/**
 * @file measures.hpp
 * @brief Averaged measures and the inequality, equality, recurrence and
 *        full-measure checks run against a cell relation.
 *
 * Violations are signed: positive means the inequality fails. Preimages
 * and images are raw relation powers (reach_set), not restricted to a core.
 */
#ifndef YDYN_MEASURES_HPP
#define YDYN_MEASURES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ydyn/measure.hpp"
#include "ydyn/phase_space.hpp"
#include "ydyn/semigroup.hpp"
#include "ydyn/trajectory.hpp"

namespace ydyn {

inline constexpr std::size_t min_averaging_horizon = 100;
inline constexpr std::size_t default_random_family_size = 100;

// ---- test families ----

std::vector<CellSet> single_cells(const GridPtr& grid);
/// Products of aligned blocks [j 2^k, (j+1) 2^k) lying fully inside each
/// dimension, with k chosen per dimension. Finite spaces: single states.
std::vector<CellSet> dyadic_family(const GridPtr& grid);
/// Each cell included independently with probability 1/2; empty draws are redrawn.
std::vector<CellSet> random_family(const GridPtr& grid, std::size_t count, std::uint64_t seed);
/// One-dimensional grids only: runs of consecutive cells, wrapping on a torus.
std::vector<CellSet> random_arcs(const GridPtr& grid, std::size_t count, std::uint64_t seed);
/// single_cells, then dyadic_family, then random_family(count).
std::vector<CellSet> default_family(const GridPtr& grid, std::uint64_t seed,
                                    std::size_t count = default_random_family_size);

/// Model times as step counts of v; AlignmentError at non-multiples.
std::vector<long> steps_for_times(const CellRelation& v, const std::vector<double>& times);

// ---- averaging ----

/// Cesàro average over n < horizon of the uniform measure on R_n, where
/// R_0 = {x0} and R_{n+1} = V(1)R_n ∩ forward-viable.
DiscreteMeasure krylov_bogoliubov(const CellRelation& v, std::size_t x0, std::size_t horizon);
/// Occupation frequencies of the cells of phi(k step), 0 <= k < horizon.
DiscreteMeasure krylov_bogoliubov(const Trajectory& phi, const GridPtr& grid, std::size_t horizon);

// ---- checks ----

struct PairResult {
  std::size_t set = 0;  ///< index into the family
  long steps = 0;
  double value = 0.0;
};

enum class RecurrenceVerdict { pass, fail, inconclusive };

std::string_view to_string(RecurrenceVerdict verdict);

struct PoincareResult {
  RecurrenceVerdict verdict = RecurrenceVerdict::inconclusive;
  CellSet returning;   ///< B_∞; the last tail union when inconclusive
  double mass = 0.0;   ///< μ(B)
  double returning_mass = 0.0;  ///< μ(B ∩ B_∞)
  std::size_t period = 0;
};

struct MeasureReport {
  std::string family;
  double tolerance = 0.0;
  std::size_t pairs_tested = 0;
  std::optional<PairResult> worst_pair;  ///< largest value; ties keep the first pair
  std::vector<PairResult> strict_violations;
  std::vector<PoincareResult> recurrence;

  /// Largest value over the tested pairs, 0 when nothing was tested.
  double max_violation() const { return worst_pair ? worst_pair->value : 0.0; }
  /// max(0, max_violation()): the amount by which the inequality fails.
  double excess() const { return std::max(0.0, max_violation()); }
  bool passed() const { return max_violation() <= tolerance; }
};

/// Values μ(A) - μ(V(t)^{-1} A).
MeasureReport check_subinvariance(const DiscreteMeasure& mu, const CellRelation& v, const std::vector<CellSet>& family,
                                  const std::vector<long>& steps, double tolerance = 0.0,
                                  std::string family_name = "custom", std::size_t threads = 1);

/// Values |μ(A) - μ(V(t) A)|; pairs above tolerance are listed as strict violations.
MeasureReport check_strict_invariance(const DiscreteMeasure& mu, const CellRelation& v,
                                      const std::vector<CellSet>& family, const std::vector<long>& steps,
                                      double tolerance = 0.0, std::string family_name = "custom",
                                      std::size_t threads = 1);

/// B_∞ is the union over the eventual cycle of n -> V(n)^{-1} B, which is
/// also the intersection of the tails. Passes iff |μ(B ∩ B_∞) - μ(B)| <= tolerance.
PoincareResult poincare_check(const DiscreteMeasure& mu, const CellRelation& v, const CellSet& b,
                              std::optional<std::size_t> n_max = {}, double tolerance = 0.0);

struct TheoremDResult {
  double mass = 0.0;     ///< μ of the inflated recurrent set
  double missing = 0.0;  ///< μ of its complement
  bool passed = false;
};

/// Passes iff the complement of the inflated recurrent set has mass at most
/// `tolerance`, which is μ(set) >= 1 - tolerance without the rounding of the
/// total mass.
TheoremDResult theorem_D_check(const DiscreteMeasure& mu, const CellSet& recurrent, std::size_t inflation = 0,
                               double tolerance = 0.0);

std::string to_json(const MeasureReport& report);

}  // namespace ydyn

#endif  // YDYN_MEASURES_HPP
