/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every ydyn module.
 *
 * All failures are reported by throwing a subclass of ydyn::Error. The
 * subclass names the failure category; the message carries the offending
 * value (coordinate, window bounds, gap, cell index, ...).
 */
#ifndef YDYN_ERRORS_HPP
#define YDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ydyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define YDYN_DECLARE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

/// Point outside a space, time outside a trajectory window, weight on a non-edge.
YDYN_DECLARE_ERROR(DomainError);
/// Operation requires a nonempty operand.
YDYN_DECLARE_ERROR(EmptySetError);
/// Exhaustive operation requested above its state cap.
YDYN_DECLARE_ERROR(CapacityError);
/// Iterative solve did not reach tolerance.
YDYN_DECLARE_ERROR(ConvergenceError);
/// Time or shift not an integer multiple of the sampling step.
YDYN_DECLARE_ERROR(AlignmentError);
/// Splice points of two trajectories do not match.
YDYN_DECLARE_ERROR(SwitchingError);
/// Base point lies on no complete trajectory.
YDYN_DECLARE_ERROR(EmptySolutionError);
/// Averaging horizon too short or longer than the data.
YDYN_DECLARE_ERROR(HorizonError);
/// Invalid field, relation or bundle at construction time.
YDYN_DECLARE_ERROR(ConstructionError);
/// Filippov surface behaviour is undetermined at a point.
YDYN_DECLARE_ERROR(AmbiguityError);
/// Artifact cannot be plotted as requested.
YDYN_DECLARE_ERROR(PlotError);
/// Malformed text input (relation, CSV, manifest).
YDYN_DECLARE_ERROR(FormatError);
/// Invalid or incomplete run configuration.
YDYN_DECLARE_ERROR(ConfigError);

#undef YDYN_DECLARE_ERROR

}  // namespace ydyn

#endif  // YDYN_ERRORS_HPP
