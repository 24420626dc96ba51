/**
 * @file solvers.hpp
 * @brief Generators of solution bundles: selection sampling for
 *        differential inclusions, Filippov integration with sliding, and
 *        greedy backward extension.
 */
#ifndef YDYN_SOLVERS_HPP
#define YDYN_SOLVERS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ydyn/phase_space.hpp"
#include "ydyn/trajectory.hpp"

namespace ydyn {

/// Axis-aligned box of velocities.
struct VelocityBox {
  Point lower;
  Point upper;
};

/// Right-hand side of x' in F(x), given by the interval hull of F(x).
class SetValuedField {
 public:
  using Callback = std::function<VelocityBox(const Point&)>;

  /// speed_bound: declared bound on |v| over all of F, if known.
  static SetValuedField from_callback(Space space, Callback f, std::optional<double> speed_bound = {});
  /// One box per grid cell, validated here (ConstructionError names the cell).
  static SetValuedField from_table(GridPtr grid, std::vector<VelocityBox> boxes,
                                   std::optional<double> speed_bound = {});

  const Space& space() const { return space_; }
  std::optional<double> speed_bound() const { return speed_bound_; }
  /// ConstructionError for an empty, unbounded or misshapen box.
  VelocityBox at(const Point& x) const;

 private:
  SetValuedField(Space space, std::optional<double> bound) : space_(std::move(space)), speed_bound_(bound) {}

  Space space_;
  std::optional<double> speed_bound_;
  Callback callback_;
  GridPtr table_grid_;
  std::vector<VelocityBox> table_;
};

/// Reads "cell_index lo1 hi1 ... lon hin" lines; every cell must appear once.
SetValuedField field_from_cell_table(const std::string& text, GridPtr grid,
                                     std::optional<double> speed_bound = {});

enum class SelectionLaw {
  uniform_corner,  ///< each coordinate independently at its lower or upper bound
  uniform_box,     ///< uniform in the box
  extreme,         ///< the all-lower or the all-upper corner
};

struct SelectionPolicy {
  std::uint64_t seed = 0;
  std::size_t dwell_steps = 5;
  SelectionLaw law = SelectionLaw::uniform_corner;
};

/// Seed of the random stream for (seed index, selection index):
/// splitmix64(splitmix64(splitmix64(master) + seed_index) + selection_index).
std::uint64_t stream_seed(std::uint64_t master, std::size_t seed_index, std::size_t selection_index);

/// Explicit Euler with piecewise-constant selections, forward on [0, t_plus]
/// and on the reversed inclusion x' in -F(x) over [t_minus, 0]. Members are
/// ordered by (seed index, selection index). A member leaving a box stops at
/// its last sample inside and is flagged as exited on that side.
SolutionBundle sample_inclusion(const SetValuedField& field, const std::vector<Point>& seeds, double t_minus,
                                double t_plus, double step, std::size_t per_seed,
                                const SelectionPolicy& policy, std::size_t threads = 1);

/// Discontinuous field f+ on h > 0, f- on h < 0.
struct PiecewiseField {
  Space space;
  std::function<double(const Point&)> h;
  std::function<Point(const Point&)> f_plus;
  std::function<Point(const Point&)> f_minus;
  /// Used only where both one-sided fields are tangent to the surface and differ.
  std::function<Point(const Point&)> f_zero;
  /// Central differences when empty.
  std::function<Point(const Point&)> grad_h;
};

struct FilippovOptions {
  double surface_tolerance = 1e-9;
  double gradient_step = 1e-6;
  std::size_t bisection_cap = 64;
  /// Throw AmbiguityError where both one-sided fields leave the surface,
  /// instead of following the tangent combination.
  bool reject_escaping = false;
};

/// Velocity of the Filippov solution at x in the given time direction (+1 or
/// -1); `sliding` reports whether it is the tangent combination.
Point filippov_velocity(const PiecewiseField& z, const Point& x, int direction, const FilippovOptions& options,
                        bool* sliding = nullptr);

Trajectory simulate_filippov(const PiecewiseField& z, const Point& x0, double t_minus, double t_plus,
                             double step, const FilippovOptions& options = {});

SolutionBundle filippov_bundle(const PiecewiseField& z, const std::vector<Point>& seeds, double t_minus,
                               double t_plus, double step, const FilippovOptions& options = {},
                               std::size_t threads = 1);

/// Set-valued form of a piecewise field: {f+} or {f-} off the surface; on it
/// the sliding velocity when sliding applies, else the hull of f+ and f-.
SetValuedField filippov_set_valued(const PiecewiseField& z, const FilippovOptions& options = {},
                                   std::optional<double> speed_bound = {});

struct BackwardExtension {
  Trajectory trajectory;
  std::size_t depth = 0;
};

/// Repeatedly prepends the first member (bundle order) whose last value lies
/// within tol of the current first value. Stops after `depth` splices, when
/// the current start is not left-truncated, or when nothing matches.
BackwardExtension extend_backward(const SolutionBundle& s, const Trajectory& phi, std::size_t depth, double tol);

namespace builtin {

/// x' in [1, 2] on the circle of length 1.
SetValuedField interval_rotation();
/// (0,-1) above y = 0, (0,1) below, on [0,1] x [-1.05, 1.05].
PiecewiseField filippov_absorb();
Space filippov_space();

}  // namespace builtin

}  // namespace ydyn

#endif  // YDYN_SOLVERS_HPP
