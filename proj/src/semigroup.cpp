#include "ydyn/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <fmt/format.h>

#include "ydyn/errors.hpp"
#include "ydyn/parallel.hpp"
#include "ydyn/relation_kernel.hpp"
#include "ydyn/text.hpp"

namespace ydyn {

namespace {

constexpr double snap_tolerance = 1e-9;

double snap(double u) {
  const double r = std::round(u);
  return std::abs(u - r) <= snap_tolerance ? r : u;
}

// Indices of dimension d met by the half-open hull [lo, hi); empty when the
// hull misses a box dimension entirely.
std::vector<std::size_t> hull_indices(const Grid& grid, std::size_t d, double lo, double hi) {
  const long res = static_cast<long>(grid.resolution()[d]);
  long first = static_cast<long>(std::floor(lo));
  long last = hi > lo ? static_cast<long>(std::ceil(hi)) - 1 : first;
  std::vector<std::size_t> out;
  if (grid.space().kind() == SpaceKind::torus) {
    if (last - first + 1 >= res) first = 0, last = res - 1;
    for (long i = first; i <= last; ++i) out.push_back(static_cast<std::size_t>(((i % res) + res) % res));
    std::sort(out.begin(), out.end());
    return out;
  }
  // the last box cell is closed on the right
  if (first == res && lo == static_cast<double>(res)) first = res - 1;
  first = std::max(first, 0L);
  last = std::min(last, res - 1);
  for (long i = first; i <= last; ++i) out.push_back(static_cast<std::size_t>(i));
  return out;
}

CellSet cell_image(const SetValuedField& field, const Grid& grid, const GridPtr& ptr, std::size_t cell,
                   double step) {
  const std::size_t dim = grid.dimension();
  const auto index = grid.multi_index(cell);
  std::vector<std::vector<double>> points;  // index coordinates: corners then centre
  for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
    std::vector<double> u(dim);
    for (std::size_t d = 0; d < dim; ++d) u[d] = static_cast<double>(index[d] + ((mask >> d) & 1));
    points.push_back(std::move(u));
  }
  std::vector<double> centre(dim);
  for (std::size_t d = 0; d < dim; ++d) centre[d] = static_cast<double>(index[d]) + 0.5;
  points.push_back(std::move(centre));

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& u : points) {
    Point x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = grid.coordinate_of_index(d, u[d]);
    const VelocityBox box = field.at(x);
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double v = ((mask >> d) & 1) ? box.upper[d] : box.lower[d];
        const double moved = snap(u[d] + step * v / grid.cell_width(d));
        lo[d] = std::min(lo[d], moved);
        hi[d] = std::max(hi[d], moved);
      }
    }
  }

  CellSet out(ptr);
  std::vector<std::vector<std::size_t>> ranges(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    ranges[d] = hull_indices(grid, d, lo[d], hi[d]);
    if (ranges[d].empty()) return out;
  }
  std::vector<std::size_t> pos(dim, 0), idx(dim);
  while (true) {
    for (std::size_t d = 0; d < dim; ++d) idx[d] = ranges[d][pos[d]];
    out.insert(grid.flat_index(idx));
    std::size_t d = 0;
    while (d < dim && ++pos[d] == ranges[d].size()) pos[d++] = 0;
    if (d == dim) break;
  }
  return out;
}

// Cells a point may belong to: within snap_tolerance of a cell face the
// point counts for both sides, matching the snapping in cell_image.
std::vector<std::size_t> boundary_cells(const Grid& grid, const Point& p) {
  if (grid.space().kind() == SpaceKind::finite) return {grid.locate(p)};
  const std::size_t dim = grid.dimension();
  std::vector<std::vector<long>> choices(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double u = grid.index_coordinate(d, p[d]);
    const double r = std::round(u);
    if (std::abs(u - r) <= snap_tolerance)
      choices[d] = {static_cast<long>(r) - 1, static_cast<long>(r)};
    else
      choices[d] = {static_cast<long>(std::floor(u))};
  }
  std::vector<std::size_t> out;
  std::vector<std::size_t> pos(dim, 0);
  while (true) {
    std::vector<long> idx(dim);
    for (std::size_t d = 0; d < dim; ++d) idx[d] = choices[d][pos[d]];
    if (grid.normalize_index(idx)) out.push_back(grid.flat_index({idx.begin(), idx.end()}));
    std::size_t d = 0;
    while (d < dim && ++pos[d] == choices[d].size()) pos[d++] = 0;
    if (d == dim) break;
  }
  if (out.empty()) out.push_back(grid.locate(p));
  return out;
}

Relation relation_from_images(std::size_t n, const std::vector<CellSet>& images) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : images[i].cells()) edges.emplace_back(i, j);
  return Relation(n, std::move(edges));
}

// Iterated removal of cells lacking a neighbour (successor if forward) inside the set.
Bits one_sided_core(const Relation& r, const Bits& a, bool forward) {
  Bits keep = a;
  std::vector<std::size_t> count(r.size(), 0);
  std::deque<std::size_t> dead;
  for (auto i = keep.find_first(); i != Bits::npos; i = keep.find_next(i)) {
    for (auto j : forward ? r.successors(i) : r.predecessors(i))
      if (keep.test(j)) ++count[i];
    if (count[i] == 0) dead.push_back(i);
  }
  while (!dead.empty()) {
    const auto i = dead.front();
    dead.pop_front();
    if (!keep.test(i)) continue;
    keep.reset(i);
    for (auto p : forward ? r.predecessors(i) : r.successors(i))
      if (keep.test(p) && --count[p] == 0) dead.push_back(p);
  }
  return keep;
}

void require_grid(const CellRelation& v, const CellSet& e) {
  if (!(*v.grid() == *e.grid())) throw DomainError("cell set and relation use different grids");
}

}  // namespace

std::string_view to_string(RelationMode mode) {
  switch (mode) {
    case RelationMode::from_field: return "from_field";
    case RelationMode::from_bundle: return "from_bundle";
    case RelationMode::imported: return "imported";
  }
  return "unknown";
}

RelationMode relation_mode_from_string(std::string_view s) {
  if (s == "from_field") return RelationMode::from_field;
  if (s == "from_bundle") return RelationMode::from_bundle;
  if (s == "imported") return RelationMode::imported;
  throw FormatError(fmt::format("unknown relation mode '{}'", s));
}

CellRelation::CellRelation(GridPtr grid, double step, Relation relation, RelationMode mode, std::size_t inflation)
    : grid_(std::move(grid)), step_(step), relation_(std::move(relation)), mode_(mode), inflation_(inflation) {
  if (!(step_ > 0) || !std::isfinite(step_))
    throw ConstructionError(fmt::format("relation step must be positive, got {}", step_));
  if (relation_.size() != grid_->cell_count())
    throw ConstructionError(
        fmt::format("relation has {} states, grid has {} cells", relation_.size(), grid_->cell_count()));
}

CellRelation build_cell_relation(const SetValuedField& field, const GridPtr& grid, double step,
                                 std::size_t inflation, std::size_t threads) {
  if (!(field.space() == grid->space())) throw ConstructionError("field and grid live in different spaces");
  if (grid->space().kind() == SpaceKind::finite)
    throw ConstructionError("fields cannot be discretized on a finite space");
  if (!(step > 0)) throw ConstructionError(fmt::format("relation step must be positive, got {}", step));
  std::vector<CellSet> images(grid->cell_count(), CellSet(grid));
  parallel_for(grid->cell_count(), threads, [&](std::size_t c) {
    images[c] = inflate(cell_image(field, *grid, grid, c, step), inflation);
  });
  return CellRelation(grid, step, relation_from_images(grid->cell_count(), images), RelationMode::from_field,
                      inflation);
}

CellRelation build_cell_relation(const SolutionBundle& bundle, const GridPtr& grid, double step,
                                 std::size_t inflation) {
  if (bundle.empty()) throw ConstructionError("cannot build a relation from an empty bundle");
  if (!(bundle.space() == grid->space())) throw ConstructionError("bundle and grid live in different spaces");
  const long ratio = grid_index(step, bundle.step());
  if (ratio < 1) throw AlignmentError(fmt::format("relation step {} is below the bundle step", step));
  std::vector<CellSet> images(grid->cell_count(), CellSet(grid));
  for (const auto& phi : bundle.members())
    for (long k = phi.start_index(); k + ratio <= phi.end_index(); ++k)
      images[grid->locate(phi.at_index(k))].insert(grid->locate(phi.at_index(k + ratio)));
  if (inflation > 0)
    for (auto& img : images) img = inflate(img, inflation);
  return CellRelation(grid, step, relation_from_images(grid->cell_count(), images), RelationMode::from_bundle,
                      inflation);
}

CellRelation import_relation(const Relation& r) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < r.size(); ++i) labels.push_back(std::to_string(i));
  return CellRelation(Grid::make(Space::finite(std::move(labels)), {}), 1.0, r, RelationMode::imported, 0);
}

CellSet reach_set(const CellRelation& v, const CellSet& e, long k) {
  require_grid(v, e);
  Bits cur = e.bits();
  for (long n = 0; n < std::abs(k) && cur.any(); ++n)
    cur = k > 0 ? v.relation().image(cur) : v.relation().preimage(cur);
  return CellSet(e.grid(), std::move(cur));
}

CellSet reach_set_at(const CellRelation& v, const CellSet& e, double t) {
  return reach_set(v, e, grid_index(t, v.step()));
}

SemigroupReport check_semigroup(const CellRelation& v, const CellSet& e, long s, long t) {
  const CellSet lhs = reach_set(v, e, s + t);
  const CellSet rhs = reach_set(v, reach_set(v, e, s), t);
  const CellSet core = viability_kernel(v, CellSet::full(e.grid()));
  const CellSet back_and_forth = reach_set(v, reach_set(v, e, -t), t);
  return {(lhs - rhs) | (rhs - lhs), (e & core) - back_and_forth};
}

CellSet viability_kernel(const CellRelation& v, const CellSet& a) {
  require_grid(v, a);
  return CellSet(a.grid(), kernel::viable_core(v.relation(), a.bits()));
}

CellSet forward_viable(const CellRelation& v, const CellSet& a) {
  require_grid(v, a);
  return CellSet(a.grid(), one_sided_core(v.relation(), a.bits(), true));
}

CellSet backward_viable(const CellRelation& v, const CellSet& a) {
  require_grid(v, a);
  return CellSet(a.grid(), one_sided_core(v.relation(), a.bits(), false));
}

SoundnessReport check_soundness(const CellRelation& v, const SolutionBundle& bundle) {
  if (!(bundle.space() == v.grid()->space())) throw DomainError("bundle and relation live in different spaces");
  const long ratio = grid_index(v.step(), bundle.step());
  SoundnessReport report;
  std::set<Edge> missing;
  const auto& grid = *v.grid();
  for (const auto& phi : bundle.members()) {
    for (long k = phi.start_index(); k + ratio <= phi.end_index(); ++k) {
      const auto from = boundary_cells(grid, phi.at_index(k));
      const auto to = boundary_cells(grid, phi.at_index(k + ratio));
      ++report.transitions;
      bool found = false;
      for (auto i : from)
        for (auto j : to) found = found || v.relation().has_edge(i, j);
      if (!found) missing.emplace(grid.locate(phi.at_index(k)), grid.locate(phi.at_index(k + ratio)));
    }
  }
  report.missing.assign(missing.begin(), missing.end());
  return report;
}

std::string to_text(const CellRelation& v) {
  std::string header = "#@ cellrelation";
  for (const auto& [k, val] : text::space_fields(v.grid()->space())) header += fmt::format(" {}={}", k, val);
  std::string res;
  if (v.grid()->space().kind() != SpaceKind::finite) {
    for (std::size_t d = 0; d < v.grid()->dimension(); ++d)
      res += (d ? "," : "") + std::to_string(v.grid()->resolution()[d]);
    header += fmt::format(" resolution={}", res);
  }
  header += fmt::format(" step={} mode={} inflation={}\n", text::format_double(v.step()), to_string(v.mode()),
                        v.inflation());
  return header + to_text(v.relation());
}

CellRelation cell_relation_from_text(std::string_view body) {
  const auto eol = body.find('\n');
  const auto first = text::trim(body.substr(0, eol));
  constexpr std::string_view tag = "#@ cellrelation";
  if (first.substr(0, tag.size()) != tag) throw FormatError("line 1: missing '#@ cellrelation' header");
  std::map<std::string, std::string> fields;
  for (const auto& token : text::split(text::trim(first.substr(tag.size())), ' ')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError(fmt::format("line 1: malformed header field '{}'", token));
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> std::string {
    auto it = fields.find(key);
    if (it == fields.end()) throw FormatError(fmt::format("line 1: header lacks '{}'", key));
    return it->second;
  };
  const Space space = text::space_from_fields(fields);
  std::vector<std::size_t> resolution;
  if (space.kind() != SpaceKind::finite)
    for (const auto& part : text::split(get("resolution"), ','))
      resolution.push_back(text::parse_u64(part, "resolution"));
  auto grid = Grid::make(space, resolution);
  return CellRelation(grid, text::parse_double(get("step"), "step"), relation_from_text(body),
                      relation_mode_from_string(get("mode")), text::parse_u64(get("inflation"), "inflation"));
}

}  // namespace ydyn
