#include "ydyn/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::box: return "box";
    case SpaceKind::torus: return "torus";
    case SpaceKind::finite: return "finite";
  }
  return "unknown";
}

namespace {

void check_bounds(const Point& lower, const Point& upper) {
  if (lower.empty()) throw ConstructionError("space needs at least one dimension");
  if (lower.size() != upper.size())
    throw ConstructionError("lower and upper bounds differ in dimension");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || !(lower[d] < upper[d]))
      throw ConstructionError(
          fmt::format("dimension {}: need lower < upper, got [{}, {}]", d, lower[d], upper[d]));
  }
}

double wrap_coordinate(double x, double lo, double hi) {
  const double period = hi - lo;
  double y = x - period * std::floor((x - lo) / period);
  if (y >= hi || y < lo) y = lo;
  return y;
}

}  // namespace

Space Space::box(Point lower, Point upper) {
  check_bounds(lower, upper);
  Space s;
  s.kind_ = SpaceKind::box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Space Space::torus(Point lower, Point upper) {
  check_bounds(lower, upper);
  Space s;
  s.kind_ = SpaceKind::torus;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Space Space::finite(std::vector<std::string> labels) {
  if (labels.empty()) throw ConstructionError("finite space needs at least one label");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw ConstructionError(fmt::format("duplicate label '{}'", l));
  }
  Space s;
  s.kind_ = SpaceKind::finite;
  s.lower_ = {0.0};
  s.upper_ = {static_cast<double>(labels.size())};
  s.labels_ = std::move(labels);
  return s;
}

std::size_t Space::dimension() const { return kind_ == SpaceKind::finite ? 1 : lower_.size(); }

void Space::check_dimension(const Point& p) const {
  if (p.size() != dimension())
    throw DomainError(
        fmt::format("point has dimension {}, space has dimension {}", p.size(), dimension()));
}

bool Space::contains(const Point& p) const {
  if (p.size() != dimension()) return false;
  switch (kind_) {
    case SpaceKind::box:
      for (std::size_t d = 0; d < p.size(); ++d)
        if (!(p[d] >= lower_[d] && p[d] <= upper_[d])) return false;
      return true;
    case SpaceKind::torus:
      return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
    case SpaceKind::finite: {
      const double v = p[0];
      return v >= 0 && v < static_cast<double>(labels_.size()) && v == std::floor(v);
    }
  }
  return false;
}

Point Space::reduce(const Point& p) const {
  if (kind_ != SpaceKind::torus) return p;
  check_dimension(p);
  Point q(p.size());
  for (std::size_t d = 0; d < p.size(); ++d) q[d] = wrap_coordinate(p[d], lower_[d], upper_[d]);
  return q;
}

Point Space::displacement(const Point& a, const Point& b) const {
  check_dimension(a);
  check_dimension(b);
  Point out(a.size());
  for (std::size_t d = 0; d < a.size(); ++d) {
    double delta = b[d] - a[d];
    if (kind_ == SpaceKind::torus) {
      const double period = extent(d);
      delta -= period * std::floor(delta / period);  // [0, period)
      if (delta > period / 2) delta -= period;       // a half-period tie stays positive
    }
    out[d] = delta;
  }
  return out;
}

double Space::distance(const Point& a, const Point& b) const {
  if (kind_ == SpaceKind::finite) {
    check_dimension(a);
    check_dimension(b);
    return a[0] == b[0] ? 0.0 : 1.0;
  }
  const Point delta = displacement(a, b);
  double sum = 0.0;
  for (double x : delta) sum += x * x;
  return std::sqrt(sum);
}

double Space::diameter() const {
  if (kind_ == SpaceKind::finite) return labels_.size() > 1 ? 1.0 : 0.0;
  double sum = 0.0;
  for (std::size_t d = 0; d < lower_.size(); ++d) {
    const double e = kind_ == SpaceKind::torus ? extent(d) / 2 : extent(d);
    sum += e * e;
  }
  return std::sqrt(sum);
}

std::size_t Space::label_index(std::string_view label) const {
  if (kind_ != SpaceKind::finite) throw DomainError("labels exist only on finite spaces");
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DomainError(fmt::format("unknown label '{}'", label));
  return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------

Grid::Grid(Space space, std::vector<std::size_t> resolution) : space_(std::move(space)) {
  if (space_.kind() == SpaceKind::finite) {
    const std::size_t n = space_.labels().size();
    if (!resolution.empty() && !(resolution.size() == 1 && resolution[0] == n))
      throw ConstructionError("finite grids have exactly one cell per label");
    resolution_ = {n};
  } else {
    if (resolution.size() != space_.dimension())
      throw ConstructionError(fmt::format("resolution has {} entries, space has dimension {}",
                                          resolution.size(), space_.dimension()));
    resolution_ = std::move(resolution);
  }
  cell_count_ = 1;
  for (std::size_t d = 0; d < resolution_.size(); ++d) {
    if (resolution_[d] == 0) throw ConstructionError(fmt::format("dimension {}: zero resolution", d));
    cell_count_ *= resolution_[d];
  }
}

double Grid::cell_width(std::size_t d) const {
  return space_.extent(d) / static_cast<double>(resolution_[d]);
}

double Grid::index_coordinate(std::size_t d, double x) const {
  return (x - space_.lower()[d]) / space_.extent(d) * static_cast<double>(resolution_[d]);
}

double Grid::coordinate_of_index(std::size_t d, double u) const {
  return space_.lower()[d] + u / static_cast<double>(resolution_[d]) * space_.extent(d);
}

std::size_t Grid::locate(const Point& p) const {
  if (space_.kind() == SpaceKind::finite) {
    if (!space_.contains(p))
      throw DomainError(fmt::format("point {} is not a label index of a {}-label space",
                                    p.empty() ? -1.0 : p[0], space_.labels().size()));
    return static_cast<std::size_t>(p[0]);
  }
  if (p.size() != dimension())
    throw DomainError(fmt::format("point has dimension {}, grid has {}", p.size(), dimension()));
  std::vector<std::size_t> index(dimension());
  for (std::size_t d = 0; d < dimension(); ++d) {
    double x = p[d];
    if (space_.kind() == SpaceKind::box) {
      if (!(x >= space_.lower()[d] && x <= space_.upper()[d]))
        throw DomainError(fmt::format("coordinate {} = {} outside [{}, {}]", d, x,
                                      space_.lower()[d], space_.upper()[d]));
    } else {
      if (!std::isfinite(x)) throw DomainError(fmt::format("coordinate {} is not finite", d));
      x = wrap_coordinate(x, space_.lower()[d], space_.upper()[d]);
    }
    const double u = std::floor(index_coordinate(d, x));
    index[d] = std::min(static_cast<std::size_t>(std::max(u, 0.0)), resolution_[d] - 1);
  }
  return flat_index(index);
}

std::size_t Grid::locate_label(std::string_view label) const { return space_.label_index(label); }

std::vector<std::size_t> Grid::multi_index(std::size_t cell) const {
  std::vector<std::size_t> index(dimension());
  for (std::size_t d = 0; d < dimension(); ++d) {
    index[d] = cell % resolution_[d];
    cell /= resolution_[d];
  }
  return index;
}

std::size_t Grid::flat_index(const std::vector<std::size_t>& index) const {
  std::size_t flat = 0;
  for (std::size_t d = dimension(); d-- > 0;) flat = flat * resolution_[d] + index[d];
  return flat;
}

bool Grid::normalize_index(std::vector<long>& index) const {
  for (std::size_t d = 0; d < dimension(); ++d) {
    const long res = static_cast<long>(resolution_[d]);
    if (space_.kind() == SpaceKind::torus) {
      index[d] = ((index[d] % res) + res) % res;
    } else if (index[d] < 0 || index[d] >= res) {
      return false;
    }
  }
  return true;
}

Point Grid::cell_center(std::size_t cell) const {
  if (space_.kind() == SpaceKind::finite) return {static_cast<double>(cell)};
  const auto index = multi_index(cell);
  Point c(dimension());
  for (std::size_t d = 0; d < dimension(); ++d)
    c[d] = coordinate_of_index(d, static_cast<double>(index[d]) + 0.5);
  return c;
}

Point Grid::cell_lower(std::size_t cell) const {
  if (space_.kind() == SpaceKind::finite) return {static_cast<double>(cell)};
  const auto index = multi_index(cell);
  Point c(dimension());
  for (std::size_t d = 0; d < dimension(); ++d)
    c[d] = coordinate_of_index(d, static_cast<double>(index[d]));
  return c;
}

Point Grid::cell_upper(std::size_t cell) const {
  if (space_.kind() == SpaceKind::finite) return {static_cast<double>(cell)};
  const auto index = multi_index(cell);
  Point c(dimension());
  for (std::size_t d = 0; d < dimension(); ++d)
    c[d] = coordinate_of_index(d, static_cast<double>(index[d] + 1));
  return c;
}

std::size_t Grid::step_distance(std::size_t a, std::size_t b) const {
  if (space_.kind() == SpaceKind::finite) return a == b ? 0 : 1;
  const auto ia = multi_index(a);
  const auto ib = multi_index(b);
  std::size_t best = 0;
  for (std::size_t d = 0; d < dimension(); ++d) {
    std::size_t delta = ia[d] > ib[d] ? ia[d] - ib[d] : ib[d] - ia[d];
    if (space_.kind() == SpaceKind::torus) delta = std::min(delta, resolution_[d] - delta);
    best = std::max(best, delta);
  }
  return best;
}

// ---------------------------------------------------------------------------

CellSet::CellSet(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw ConstructionError("cell set without grid");
  bits_.resize(grid_->cell_count());
}

CellSet::CellSet(GridPtr grid, Bits bits) : grid_(std::move(grid)), bits_(std::move(bits)) {
  if (!grid_) throw ConstructionError("cell set without grid");
  if (bits_.size() != grid_->cell_count())
    throw ConstructionError(fmt::format("bitset of length {} for a grid of {} cells", bits_.size(),
                                        grid_->cell_count()));
}

CellSet CellSet::full(GridPtr grid) {
  CellSet s(std::move(grid));
  s.bits_.set();
  return s;
}

CellSet CellSet::of(GridPtr grid, const std::vector<std::size_t>& cells) {
  CellSet s(std::move(grid));
  for (auto c : cells) {
    if (c >= s.cell_count()) throw DomainError(fmt::format("cell {} out of range", c));
    s.insert(c);
  }
  return s;
}

std::vector<std::size_t> CellSet::cells() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) out.push_back(i);
  return out;
}

void CellSet::require_same_grid(const CellSet& other) const {
  if (grid_ != other.grid_ && !(*grid_ == *other.grid_))
    throw DomainError("cell sets belong to different grids");
}

bool CellSet::is_subset_of(const CellSet& other) const {
  require_same_grid(other);
  return bits_.is_subset_of(other.bits_);
}

CellSet CellSet::operator|(const CellSet& other) const {
  require_same_grid(other);
  return CellSet(grid_, bits_ | other.bits_);
}

CellSet CellSet::operator&(const CellSet& other) const {
  require_same_grid(other);
  return CellSet(grid_, bits_ & other.bits_);
}

CellSet CellSet::operator-(const CellSet& other) const {
  require_same_grid(other);
  return CellSet(grid_, bits_ - other.bits_);
}

CellSet CellSet::operator~() const { return CellSet(grid_, ~bits_); }

bool CellSet::operator==(const CellSet& other) const {
  require_same_grid(other);
  return bits_ == other.bits_;
}

namespace {

// Visit every cell within Chebyshev radius r of `cell` (including itself).
template <typename F>
void for_each_within(const Grid& grid, std::size_t cell, std::size_t radius, F&& visit) {
  if (grid.space().kind() == SpaceKind::finite) {
    if (radius == 0) {
      visit(cell);
    } else {
      for (std::size_t c = 0; c < grid.cell_count(); ++c) visit(c);
    }
    return;
  }
  const std::size_t n = grid.dimension();
  const auto base = grid.multi_index(cell);
  const long r = static_cast<long>(radius);
  std::vector<long> offset(n, -r);
  std::vector<long> index(n);
  while (true) {
    for (std::size_t d = 0; d < n; ++d) index[d] = static_cast<long>(base[d]) + offset[d];
    if (grid.normalize_index(index)) {
      std::vector<std::size_t> u(index.begin(), index.end());
      visit(grid.flat_index(u));
    }
    std::size_t d = 0;
    while (d < n && offset[d] == r) offset[d++] = -r;
    if (d == n) break;
    ++offset[d];
  }
}

// BFS distance (adjacency steps) from `sources` to every cell.
std::vector<std::size_t> distance_transform(const CellSet& sources) {
  const Grid& grid = *sources.grid();
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(grid.cell_count(), unreached);
  std::deque<std::size_t> queue;
  for (auto c : sources.cells()) {
    dist[c] = 0;
    queue.push_back(c);
  }
  while (!queue.empty()) {
    const auto c = queue.front();
    queue.pop_front();
    for_each_within(grid, c, 1, [&](std::size_t nb) {
      if (dist[nb] == unreached) {
        dist[nb] = dist[c] + 1;
        queue.push_back(nb);
      }
    });
  }
  return dist;
}

std::size_t directed_distance(const CellSet& from, const std::vector<std::size_t>& dist_to) {
  std::size_t best = 0;
  for (auto c : from.cells()) best = std::max(best, dist_to[c]);
  return best;
}

}  // namespace

std::size_t cell_distance(const CellSet& a, const CellSet& b) {
  a.require_same_grid(b);
  if (a.empty() || b.empty()) throw EmptySetError("cell_distance needs two nonempty sets");
  return std::max(directed_distance(a, distance_transform(b)),
                  directed_distance(b, distance_transform(a)));
}

CellSet inflate(const CellSet& a, std::size_t radius) {
  if (radius == 0) return a;
  CellSet out(a.grid());
  for (auto c : a.cells()) for_each_within(*a.grid(), c, radius, [&](std::size_t nb) { out.insert(nb); });
  return out;
}

CellSet cells_in_box(const GridPtr& grid, const Point& lower, const Point& upper) {
  CellSet out(grid);
  const Space& space = grid->space();
  if (space.kind() == SpaceKind::finite) {
    const auto n = static_cast<double>(grid->cell_count());
    for (double v = std::ceil(std::max(lower.at(0), 0.0)); v <= upper.at(0) && v < n; v += 1.0)
      out.insert(static_cast<std::size_t>(v));
    return out;
  }
  const std::size_t n = grid->dimension();
  if (lower.size() != n || upper.size() != n) throw DomainError("box dimension mismatch");
  std::vector<long> first(n), last(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (lower[d] > upper[d]) return out;
    const long res = static_cast<long>(grid->resolution()[d]);
    double lo = grid->index_coordinate(d, lower[d]);
    double hi = grid->index_coordinate(d, upper[d]);
    if (space.kind() == SpaceKind::box) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, static_cast<double>(res) - 0.5);
      if (lo > hi) return out;
    }
    first[d] = static_cast<long>(std::floor(lo));
    last[d] = static_cast<long>(std::floor(hi));
    if (space.kind() == SpaceKind::torus && last[d] - first[d] >= res) last[d] = first[d] + res - 1;
  }
  std::vector<long> index = first;
  std::vector<long> wrapped(n);
  while (true) {
    wrapped = index;
    if (grid->normalize_index(wrapped)) {
      std::vector<std::size_t> u(wrapped.begin(), wrapped.end());
      out.insert(grid->flat_index(u));
    }
    std::size_t d = 0;
    while (d < n && index[d] == last[d]) {
      index[d] = first[d];
      ++d;
    }
    if (d == n) break;
    ++index[d];
  }
  return out;
}

}  // namespace ydyn
