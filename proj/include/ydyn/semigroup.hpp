/**
 * @file semigroup.hpp
 * @brief One-step cell relations standing in for V(step), with reach sets,
 *        semigroup checks and viability kernels.
 *
 * Edge i -> j means cell j meets the time-step image of cell i. reach_set
 * composes the relation exactly, so V(s + t) = V(t) V(s) holds as an
 * identity of relation powers.
 *
 * Text form: a header line
 *
 *     #@ cellrelation kind=torus lower=0 upper=1 resolution=100 step=0.05 mode=from_field inflation=1
 *
 * followed by the plain relation text, so the exact relation kernel can
 * read the file directly (the header is a comment to it).
 */
#ifndef YDYN_SEMIGROUP_HPP
#define YDYN_SEMIGROUP_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ydyn/phase_space.hpp"
#include "ydyn/relation.hpp"
#include "ydyn/solvers.hpp"
#include "ydyn/trajectory.hpp"

namespace ydyn {

enum class RelationMode { from_field, from_bundle, imported };

std::string_view to_string(RelationMode mode);
RelationMode relation_mode_from_string(std::string_view s);

class CellRelation {
 public:
  CellRelation(GridPtr grid, double step, Relation relation, RelationMode mode, std::size_t inflation);

  const GridPtr& grid() const { return grid_; }
  double step() const { return step_; }
  const Relation& relation() const { return relation_; }
  RelationMode mode() const { return mode_; }
  std::size_t inflation() const { return inflation_; }
  std::size_t cell_count() const { return relation_.size(); }

  bool operator==(const CellRelation& other) const {
    return *grid_ == *other.grid_ && step_ == other.step_ && relation_ == other.relation_ &&
           mode_ == other.mode_ && inflation_ == other.inflation_;
  }

 private:
  GridPtr grid_;
  double step_;
  Relation relation_;
  RelationMode mode_;
  std::size_t inflation_;
};

/// Outer approximation from a set-valued field. Each cell's corners and
/// centre are moved one step under every corner of the velocity box; the
/// cells met by the half-open hull of the results are its successors, then
/// the set is inflated. Box dimensions clip, torus dimensions wrap.
CellRelation build_cell_relation(const SetValuedField& field, const GridPtr& grid, double step,
                                 std::size_t inflation, std::size_t threads = 1);

/// Empirical relation: i -> j whenever a member moves from cell i to cell j
/// in `step`, at any start time. The bundle step must divide `step`.
CellRelation build_cell_relation(const SolutionBundle& bundle, const GridPtr& grid, double step,
                                 std::size_t inflation = 0);

/// Finite relation as a cell relation over labels "0".."n-1", step 1.
CellRelation import_relation(const Relation& r);

/// k >= 0: k-fold image; k < 0: |k|-fold preimage. No restriction.
CellSet reach_set(const CellRelation& v, const CellSet& e, long k);
/// Reach set at model time t; AlignmentError unless t is a multiple of the step.
CellSet reach_set_at(const CellRelation& v, const CellSet& e, double t);

struct SemigroupReport {
  CellSet law_violations;        ///< symmetric difference of V(s+t)E and V(t)V(s)E
  CellSet inclusion_violations;  ///< cells of E on the core missing from V(t)V(-t)E
  bool passed() const { return law_violations.empty() && inclusion_violations.empty(); }
};

SemigroupReport check_semigroup(const CellRelation& v, const CellSet& e, long s, long t);

/// Largest subset of a whose cells all have a successor and a predecessor in it.
CellSet viability_kernel(const CellRelation& v, const CellSet& a);
/// Largest subset of a whose cells all have a successor in it.
CellSet forward_viable(const CellRelation& v, const CellSet& a);
/// Largest subset of a whose cells all have a predecessor in it.
CellSet backward_viable(const CellRelation& v, const CellSet& a);

struct SoundnessReport {
  std::size_t transitions = 0;
  std::vector<Edge> missing;  ///< observed transitions that are not edges
  bool passed() const { return missing.empty(); }
};

/// Checks every step-long transition of every member against the edges. A
/// sample within 1e-9 index units of a cell face may count for either side.
SoundnessReport check_soundness(const CellRelation& v, const SolutionBundle& bundle);

std::string to_text(const CellRelation& v);
CellRelation cell_relation_from_text(std::string_view text);

}  // namespace ydyn

#endif  // YDYN_SEMIGROUP_HPP
