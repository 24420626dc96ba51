/**
 * @file measure.hpp
 * @brief Probability vectors over the cells of a grid or the states of a relation.
 */
#ifndef YDYN_MEASURE_HPP
#define YDYN_MEASURE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ydyn/phase_space.hpp"

namespace ydyn {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// Nonnegative weights with total mass one (within 1e-12).
class DiscreteMeasure {
 public:
  static constexpr double mass_tolerance = 1e-12;

  /// Validates nonnegativity and unit mass.
  explicit DiscreteMeasure(std::vector<double> weights);
  /// Rescales nonnegative weights with positive total to unit mass.
  static DiscreteMeasure normalized(std::vector<double> weights);
  static DiscreteMeasure uniform(std::size_t size);
  static DiscreteMeasure uniform_on(const Bits& support);
  static DiscreteMeasure point_mass(std::size_t size, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  /// Compensated sum of weights over the set, in ascending index order.
  double mass(const Bits& set) const;
  double mass(const CellSet& set) const { return mass(set.bits()); }
  double total_mass() const;
  Bits support() const;

  /// Total-variation distance, half the L1 distance.
  double total_variation(const DiscreteMeasure& other) const;

 private:
  std::vector<double> weights_;
};

/// CSV with header "cell,weight"; weights printed in shortest round-trip form.
/// Lines starting with '#' are skipped when reading.
std::string measure_to_csv(const DiscreteMeasure& measure);
DiscreteMeasure measure_from_csv(std::string_view text);

}  // namespace ydyn

#endif  // YDYN_MEASURE_HPP
