/**
 * @file phase_space.hpp
 * @brief Compact phase spaces, uniform grids over them, and cell sets.
 *
 * Three kinds of space are supported: boxes and flat tori in n dimensions,
 * and finite label sets. A Grid partitions a space into half-open cells
 * (the last cell of a box dimension is closed on the right so the box is
 * covered exactly; torus cells wrap). A CellSet is a membership bitset over
 * the cells of one grid.
 *
 * Cell adjacency is the Chebyshev (king-move) neighbourhood in the
 * multi-index, wrapping on tori. On a finite space every pair of distinct
 * cells is at distance one.
 */
#ifndef YDYN_PHASE_SPACE_HPP
#define YDYN_PHASE_SPACE_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace ydyn {

using Point = std::vector<double>;
using Bits = boost::dynamic_bitset<>;

enum class SpaceKind { box, torus, finite };

std::string_view to_string(SpaceKind kind);

class Space {
 public:
  /// Axis-aligned box [lower, upper] (closed).
  static Space box(Point lower, Point upper);
  /// Flat torus; coordinate d has period upper[d] - lower[d].
  static Space torus(Point lower, Point upper);
  /// Finite label set. Points are one-dimensional and hold the label index.
  static Space finite(std::vector<std::string> labels);

  SpaceKind kind() const { return kind_; }
  std::size_t dimension() const;
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double extent(std::size_t d) const { return upper_[d] - lower_[d]; }

  bool contains(const Point& p) const;
  /// Torus points are reduced into [lower, upper); other kinds are unchanged.
  Point reduce(const Point& p) const;
  /// Shortest displacement from a to b. On a torus each coordinate lies in
  /// (-period/2, period/2]; a half-period tie goes the positive way.
  Point displacement(const Point& a, const Point& b) const;
  /// Euclidean on boxes, flat quotient metric on tori, discrete on finite sets.
  double distance(const Point& a, const Point& b) const;
  /// Largest distance between two points of the space.
  double diameter() const;

  std::size_t label_index(std::string_view label) const;

  bool operator==(const Space&) const = default;

 private:
  Space() = default;
  void check_dimension(const Point& p) const;

  SpaceKind kind_ = SpaceKind::box;
  Point lower_;
  Point upper_;
  std::vector<std::string> labels_;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  /// Finite spaces take an empty resolution (one cell per label).
  Grid(Space space, std::vector<std::size_t> resolution);

  static GridPtr make(Space space, std::vector<std::size_t> resolution) {
    return std::make_shared<const Grid>(std::move(space), std::move(resolution));
  }

  const Space& space() const { return space_; }
  const std::vector<std::size_t>& resolution() const { return resolution_; }
  std::size_t dimension() const { return resolution_.size(); }
  std::size_t cell_count() const { return cell_count_; }
  double cell_width(std::size_t d) const;

  /// Unique cell containing p. Throws DomainError for a point outside a box.
  std::size_t locate(const Point& p) const;
  std::size_t locate_label(std::string_view label) const;

  Point cell_center(std::size_t cell) const;
  Point cell_lower(std::size_t cell) const;
  Point cell_upper(std::size_t cell) const;

  /// Continuous index coordinate: cell i of dimension d spans [i, i+1).
  double index_coordinate(std::size_t d, double x) const;
  double coordinate_of_index(std::size_t d, double u) const;

  std::vector<std::size_t> multi_index(std::size_t cell) const;
  std::size_t flat_index(const std::vector<std::size_t>& index) const;
  /// Wraps on tori; returns false for out-of-range indices on boxes.
  bool normalize_index(std::vector<long>& index) const;

  /// Chebyshev distance between cells in adjacency steps.
  std::size_t step_distance(std::size_t a, std::size_t b) const;

  bool operator==(const Grid& other) const {
    return space_ == other.space_ && resolution_ == other.resolution_;
  }

 private:
  Space space_;
  std::vector<std::size_t> resolution_;
  std::size_t cell_count_ = 0;
};

class CellSet {
 public:
  explicit CellSet(GridPtr grid);
  CellSet(GridPtr grid, Bits bits);

  static CellSet full(GridPtr grid);
  static CellSet of(GridPtr grid, const std::vector<std::size_t>& cells);

  const GridPtr& grid() const { return grid_; }
  const Bits& bits() const { return bits_; }
  std::size_t cell_count() const { return bits_.size(); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  bool contains(std::size_t cell) const { return bits_.test(cell); }
  void insert(std::size_t cell) { bits_.set(cell); }
  void erase(std::size_t cell) { bits_.reset(cell); }
  std::vector<std::size_t> cells() const;

  bool is_subset_of(const CellSet& other) const;

  CellSet operator|(const CellSet& other) const;
  CellSet operator&(const CellSet& other) const;
  CellSet operator-(const CellSet& other) const;
  CellSet operator~() const;
  bool operator==(const CellSet& other) const;

  void require_same_grid(const CellSet& other) const;

 private:
  GridPtr grid_;
  Bits bits_;
};

/// Symmetric Hausdorff distance in adjacency steps. Both sets nonempty.
std::size_t cell_distance(const CellSet& a, const CellSet& b);

/// a together with every cell within adjacency radius r.
CellSet inflate(const CellSet& a, std::size_t radius);

/// Cells meeting the closed coordinate box [lower, upper]. On a torus the
/// box may extend past one period and wraps.
CellSet cells_in_box(const GridPtr& grid, const Point& lower, const Point& upper);

}  // namespace ydyn

#endif  // YDYN_PHASE_SPACE_HPP
