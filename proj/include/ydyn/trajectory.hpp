/**
 * @file trajectory.hpp
 * @brief Sampled trajectories on a uniform time grid, bundles of them, and
 *        the shift flow acting on both.
 *
 * A Trajectory stores samples at times k*step for k in
 * [start_index, end_index]. Shifts move start_index by whole steps only,
 * so the flow laws hold exactly. Window flags record whether the solution
 * continues past either end of the window or left a box there.
 */
#ifndef YDYN_TRAJECTORY_HPP
#define YDYN_TRAJECTORY_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ydyn/phase_space.hpp"

namespace ydyn {

struct WindowFlags {
  bool left_truncated = false;   ///< the solution continues before the first sample
  bool right_truncated = false;  ///< the solution continues after the last sample
  bool left_exited = false;      ///< backward integration left a box at the window start
  bool right_exited = false;     ///< forward integration left a box at the window end

  bool operator==(const WindowFlags&) const = default;
};

/// Index k with t = k*step. Throws AlignmentError when t is not on the grid
/// (relative tolerance 1e-9 in units of step).
long grid_index(double t, double step);

class Trajectory {
 public:
  /// Torus samples are reduced into the fundamental domain.
  Trajectory(Space space, double step, long start_index, std::vector<Point> samples,
             WindowFlags flags = {});

  const Space& space() const { return space_; }
  double step() const { return step_; }
  long start_index() const { return start_index_; }
  long end_index() const { return start_index_ + static_cast<long>(samples_.size()) - 1; }
  std::size_t size() const { return samples_.size(); }
  double start_time() const { return static_cast<double>(start_index_) * step_; }
  double end_time() const { return static_cast<double>(end_index()) * step_; }
  const std::vector<Point>& samples() const { return samples_; }
  const WindowFlags& flags() const { return flags_; }

  bool defined_at_index(long k) const { return k >= start_index_ && k <= end_index(); }
  bool defined_at_zero() const { return defined_at_index(0); }
  /// Sample at time k*step; DomainError outside the window.
  const Point& at_index(long k) const;
  const Point& front() const { return samples_.front(); }
  const Point& back() const { return samples_.back(); }

  bool operator==(const Trajectory&) const = default;

 private:
  Space space_;
  double step_;
  long start_index_;
  std::vector<Point> samples_;
  WindowFlags flags_;
};

/// sigma(k*step, phi): same samples, start index start_index - k.
Trajectory shift(const Trajectory& phi, long k);
/// Shift by model time t; AlignmentError unless t is a multiple of the step.
Trajectory shift_by_time(const Trajectory& phi, double t);

/// Value at time t. Exact at grid times, linear in between (shortest arc on
/// tori, left sample on finite spaces). DomainError outside the window.
Point evaluate(const Trajectory& phi, double t);

/// sup over grid times in [t_lo, t_hi] of the space distance between phi and
/// psi. Both must share the step and be defined on the whole window.
double cu_distance(const Trajectory& phi, const Trajectory& psi, double t_lo, double t_hi);

/// phi before tau, psi from tau on. SwitchingError when the two values at
/// tau are farther apart than tol.
Trajectory concatenate(const Trajectory& phi, const Trajectory& psi, double tau, double tol);

/// Sum of step distances over the whole window.
double total_variation(const Trajectory& phi);

struct Provenance {
  std::string solver;
  std::uint64_t seed = 0;
  double t_minus = 0.0;
  double t_plus = 0.0;
  std::string note;

  bool operator==(const Provenance&) const = default;
};

class SolutionBundle {
 public:
  SolutionBundle(Space space, double step, std::vector<Trajectory> members = {},
                 Provenance provenance = {});

  const Space& space() const { return space_; }
  double step() const { return step_; }
  const std::vector<Trajectory>& members() const { return members_; }
  const Trajectory& operator[](std::size_t i) const { return members_[i]; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Provenance& provenance() const { return provenance_; }
  Provenance& provenance() { return provenance_; }

  /// ConstructionError when the member's step or space differ.
  void add(Trajectory member);

  bool operator==(const SolutionBundle&) const = default;

 private:
  Space space_;
  double step_;
  std::vector<Trajectory> members_;
  Provenance provenance_;
};

/// Members defined at time 0 whose value there lies in `a`.
SolutionBundle section(const SolutionBundle& s, const CellSet& a);
SolutionBundle section(const SolutionBundle& s, const std::function<bool(const Point&)>& a);

/// Every shift sigma(k, phi) of every member that is defined at time 0,
/// members in order and k ascending.
SolutionBundle shift_closure(const SolutionBundle& s);

/// Applies shift(., k) to every member.
SolutionBundle shift(const SolutionBundle& s, long k);

/// Values phi(0) of the members defined at time 0, as cells of `grid`.
CellSet initial_cells(const SolutionBundle& s, const GridPtr& grid);

// ---------------------------------------------------------------------------
// Axiom diagnostics

struct AxiomOptions {
  /// Window examined; defaults to each member's own window.
  std::optional<double> t_minus;
  std::optional<double> t_plus;
  double tol = 1e-9;
  /// Declared bound on |velocity|. Without one, a step may move at most
  /// max_jump_fraction of the space diameter.
  std::optional<double> lipschitz_bound;
  double max_jump_fraction = 0.25;
  double min_coverage = 1.0;
  std::size_t spot_checks = 100;
  std::uint64_t seed = 0;
};

struct AxiomCheck {
  std::string name;
  bool required = true;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

/// Finite-sample witnesses for the solution-space axioms. Only the required
/// checks (existence, compactness, shift and switching closure) decide
/// passed(); uniqueness and the subsequence check are reported for
/// information.
struct AxiomReport {
  double existence_coverage = 0.0;
  double uniqueness_spread = 0.0;
  double lipschitz_witness = 0.0;
  double lipschitz_limit = 0.0;
  double uniform_bound = 0.0;
  std::vector<AxiomCheck> checks;

  bool passed() const;
  const AxiomCheck& check(std::string_view name) const;
};

/// Throws EmptySetError on an empty bundle.
AxiomReport check_axioms(const SolutionBundle& s, const GridPtr& grid, const AxiomOptions& options = {});

/// Cells of phi(0) for members defined at 0 whose total variation is <= tol.
CellSet equilibrium_points(const SolutionBundle& s, const GridPtr& grid, double tol);

}  // namespace ydyn

#endif  // YDYN_TRAJECTORY_HPP
