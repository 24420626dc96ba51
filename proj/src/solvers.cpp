#include "ydyn/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ydyn/errors.hpp"
#include "ydyn/parallel.hpp"
#include "ydyn/text.hpp"

namespace ydyn {

namespace {

void validate_box(const VelocityBox& box, std::size_t dim, const std::string& where) {
  if (box.lower.size() != dim || box.upper.size() != dim)
    throw ConstructionError(fmt::format("velocity box at {} has the wrong dimension", where));
  for (std::size_t d = 0; d < dim; ++d) {
    if (!std::isfinite(box.lower[d]) || !std::isfinite(box.upper[d]))
      throw ConstructionError(fmt::format("velocity box at {} is unbounded", where));
    if (box.lower[d] > box.upper[d])
      throw ConstructionError(fmt::format("velocity box at {} is empty in coordinate {}", where, d));
  }
}

// splitmix64 finalizer
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Portable draws so bundles are identical across standard libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

Point draw_velocity(const VelocityBox& box, SelectionLaw law, std::mt19937_64& rng) {
  Point v(box.lower.size());
  switch (law) {
    case SelectionLaw::uniform_corner:
      for (std::size_t d = 0; d < v.size(); ++d) v[d] = coin(rng) ? box.upper[d] : box.lower[d];
      break;
    case SelectionLaw::uniform_box:
      for (std::size_t d = 0; d < v.size(); ++d)
        v[d] = box.lower[d] == box.upper[d] ? box.lower[d]
                                            : box.lower[d] + unit_draw(rng) * (box.upper[d] - box.lower[d]);
      break;
    case SelectionLaw::extreme:
      v = coin(rng) ? box.upper : box.lower;
      break;
  }
  return v;
}

void check_horizons(double t_minus, double t_plus, double step) {
  if (!(step > 0) || !std::isfinite(step)) throw DomainError(fmt::format("step must be positive, got {}", step));
  if (!(t_minus <= 0 && t_plus >= 0))
    throw DomainError(fmt::format("horizons must satisfy t_minus <= 0 <= t_plus, got [{}, {}]", t_minus, t_plus));
  grid_index(t_minus, step);
  grid_index(t_plus, step);
}

struct HalfPath {
  std::vector<Point> samples;  // starts with the seed
  bool exited = false;
};

HalfPath integrate_inclusion(const SetValuedField& field, const Point& x0, long steps, int direction,
                             const SelectionPolicy& policy, std::mt19937_64& rng, double dt) {
  const Space& space = field.space();
  HalfPath path;
  path.samples.push_back(x0);
  Point v;
  for (long i = 0; i < steps; ++i) {
    const Point& x = path.samples.back();
    if (static_cast<std::size_t>(i) % policy.dwell_steps == 0) {
      v = draw_velocity(field.at(x), policy.law, rng);
      for (auto& c : v) c *= direction;
    }
    Point y(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) y[d] = x[d] + dt * v[d];
    if (!space.contains(y)) {
      path.exited = true;
      break;
    }
    path.samples.push_back(space.reduce(y));
  }
  return path;
}

Trajectory join_halves(const Space& space, double step, HalfPath backward, HalfPath forward) {
  std::vector<Point> samples(backward.samples.rbegin(), backward.samples.rend());
  samples.insert(samples.end(), forward.samples.begin() + 1, forward.samples.end());
  WindowFlags flags;
  flags.left_exited = backward.exited;
  flags.left_truncated = !backward.exited;
  flags.right_exited = forward.exited;
  flags.right_truncated = !forward.exited;
  const long start = -static_cast<long>(backward.samples.size() - 1);
  return Trajectory(space, step, start, std::move(samples), flags);
}

Point scaled(Point v, double s) {
  for (auto& x : v) x *= s;
  return v;
}

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
  return s;
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point gradient(const PiecewiseField& z, const Point& x, const FilippovOptions& o) {
  if (z.grad_h) return z.grad_h(x);
  Point g(x.size());
  Point p = x;
  for (std::size_t d = 0; d < x.size(); ++d) {
    p[d] = x[d] + o.gradient_step;
    const double up = z.h(p);
    p[d] = x[d] - o.gradient_step;
    const double down = z.h(p);
    p[d] = x[d];
    g[d] = (up - down) / (2 * o.gradient_step);
  }
  return g;
}

void project_to_surface(const PiecewiseField& z, Point& y, const FilippovOptions& o) {
  for (int it = 0; it < 8 && std::abs(z.h(y)) > o.surface_tolerance; ++it) {
    const Point g = gradient(z, y, o);
    const double n2 = dot(g, g);
    if (!(n2 > 0)) throw AmbiguityError(fmt::format("switching surface has zero gradient at ({})", fmt::join(y, ", ")));
    const double hy = z.h(y);
    for (std::size_t d = 0; d < y.size(); ++d) y[d] -= hy * g[d] / n2;
  }
}

Point advance(const Point& x, const Point& v, double dt) {
  Point y(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) y[d] = x[d] + dt * v[d];
  return y;
}

// One Filippov step of length dt in the given direction.
Point filippov_step(const PiecewiseField& z, const Point& x, int direction, double dt, const FilippovOptions& o) {
  const double hx = z.h(x);
  bool sliding = false;
  if (std::abs(hx) <= o.surface_tolerance) {
    Point y = advance(x, filippov_velocity(z, x, direction, o, &sliding), dt);
    if (sliding) project_to_surface(z, y, o);
    return y;
  }
  const bool above = hx > 0;
  const Point f = scaled(above ? z.f_plus(x) : z.f_minus(x), direction);
  Point y = advance(x, f, dt);
  const double hy = z.h(y);
  if (std::abs(hy) <= o.surface_tolerance) {
    project_to_surface(z, y, o);
    return y;
  }
  if ((hy > 0) == above) return y;

  // crossing inside the step: bracket the hitting time to dt/64
  double lo = 0.0, hi = 1.0;
  for (std::size_t it = 0; it < o.bisection_cap && hi - lo > 1.0 / 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = z.h(advance(x, f, mid * dt));
    if (std::abs(hm) <= o.surface_tolerance) {
      lo = hi = mid;
      break;
    }
    ((hm > 0) == above ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  Point hit = advance(x, f, theta * dt);
  project_to_surface(z, hit, o);
  Point out = advance(hit, filippov_velocity(z, hit, direction, o, &sliding), (1.0 - theta) * dt);
  if (sliding) project_to_surface(z, out, o);
  return out;
}

HalfPath integrate_filippov(const PiecewiseField& z, const Point& x0, long steps, int direction, double dt,
                            const FilippovOptions& o) {
  HalfPath path;
  path.samples.push_back(x0);
  for (long i = 0; i < steps; ++i) {
    Point y = filippov_step(z, path.samples.back(), direction, dt, o);
    if (!z.space.contains(y)) {
      path.exited = true;
      break;
    }
    path.samples.push_back(z.space.reduce(y));
  }
  return path;
}

}  // namespace

// ---------------------------------------------------------------------------

SetValuedField SetValuedField::from_callback(Space space, Callback f, std::optional<double> speed_bound) {
  if (!f) throw ConstructionError("field callback is empty");
  SetValuedField out(std::move(space), speed_bound);
  out.callback_ = std::move(f);
  return out;
}

SetValuedField SetValuedField::from_table(GridPtr grid, std::vector<VelocityBox> boxes,
                                          std::optional<double> speed_bound) {
  if (boxes.size() != grid->cell_count())
    throw ConstructionError(
        fmt::format("field table has {} boxes for {} cells", boxes.size(), grid->cell_count()));
  for (std::size_t c = 0; c < boxes.size(); ++c)
    validate_box(boxes[c], grid->space().dimension(), fmt::format("cell {}", c));
  SetValuedField out(grid->space(), speed_bound);
  out.table_grid_ = std::move(grid);
  out.table_ = std::move(boxes);
  return out;
}

VelocityBox SetValuedField::at(const Point& x) const {
  if (table_grid_) return table_[table_grid_->locate(x)];
  VelocityBox box = callback_(x);
  validate_box(box, space_.dimension(), fmt::format("point ({})", fmt::join(x, ", ")));
  return box;
}

SetValuedField field_from_cell_table(const std::string& body, GridPtr grid, std::optional<double> speed_bound) {
  const std::size_t dim = grid->space().dimension();
  std::vector<std::optional<VelocityBox>> boxes(grid->cell_count());
  std::istringstream in(body);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() != 1 + 2 * dim)
      throw FormatError(fmt::format("line {}: expected {} fields, got {}", line_no, 1 + 2 * dim, tokens.size()));
    const auto cell = text::parse_u64(tokens[0], fmt::format("line {} cell", line_no));
    if (cell >= boxes.size()) throw FormatError(fmt::format("line {}: cell {} out of range", line_no, cell));
    if (boxes[cell]) throw FormatError(fmt::format("line {}: cell {} listed twice", line_no, cell));
    VelocityBox box;
    for (std::size_t d = 0; d < dim; ++d) {
      box.lower.push_back(text::parse_double(tokens[1 + 2 * d], fmt::format("line {}", line_no)));
      box.upper.push_back(text::parse_double(tokens[2 + 2 * d], fmt::format("line {}", line_no)));
    }
    boxes[cell] = std::move(box);
  }
  std::vector<VelocityBox> table;
  table.reserve(boxes.size());
  for (std::size_t c = 0; c < boxes.size(); ++c) {
    if (!boxes[c]) throw ConstructionError(fmt::format("field table has no box for cell {}", c));
    table.push_back(std::move(*boxes[c]));
  }
  return SetValuedField::from_table(std::move(grid), std::move(table), speed_bound);
}

std::uint64_t stream_seed(std::uint64_t master, std::size_t seed_index, std::size_t selection_index) {
  return splitmix64(splitmix64(splitmix64(master) + seed_index) + selection_index);
}

SolutionBundle sample_inclusion(const SetValuedField& field, const std::vector<Point>& seeds, double t_minus,
                                double t_plus, double step, std::size_t per_seed,
                                const SelectionPolicy& policy, std::size_t threads) {
  check_horizons(t_minus, t_plus, step);
  if (policy.dwell_steps == 0) throw DomainError("dwell must be at least one step");
  const Space& space = field.space();
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (!space.contains(seeds[i])) throw DomainError(fmt::format("seed {} lies outside the space", i));
  const long forward = grid_index(t_plus, step);
  const long backward = -grid_index(t_minus, step);

  std::vector<std::optional<Trajectory>> slots(seeds.size() * per_seed);
  parallel_for(slots.size(), threads, [&](std::size_t n) {
    const std::size_t i = n / per_seed, j = n % per_seed;
    std::mt19937_64 rng(stream_seed(policy.seed, i, j));
    const Point x0 = space.reduce(seeds[i]);
    auto fwd = integrate_inclusion(field, x0, forward, +1, policy, rng, step);
    auto bwd = integrate_inclusion(field, x0, backward, -1, policy, rng, step);
    slots[n] = join_halves(space, step, std::move(bwd), std::move(fwd));
  });
  SolutionBundle out(space, step, {}, {"selection", policy.seed, t_minus, t_plus, ""});
  for (auto& s : slots) out.add(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------

Point filippov_velocity(const PiecewiseField& z, const Point& x, int direction, const FilippovOptions& o,
                        bool* sliding) {
  const Point g = gradient(z, x, o);
  const Point fp = scaled(z.f_plus(x), direction);
  const Point fm = scaled(z.f_minus(x), direction);
  const double a = dot(g, fp);
  const double b = dot(g, fm);
  const double eps = 1e-12 * norm(g) * std::max(norm(fp), norm(fm));
  if (sliding) *sliding = false;
  if (std::abs(a) <= eps && std::abs(b) <= eps) {
    if (fp == fm) return fp;
    if (z.f_zero) return scaled(z.f_zero(x), direction);
    throw AmbiguityError(fmt::format("both fields are tangent to the surface at ({})", fmt::join(x, ", ")));
  }
  if (a > 0 && b > 0) return fp;
  if (a < 0 && b < 0) return fm;
  // a and b of opposite sign (or one zero): the tangent combination
  if (a > 0 || b < 0) {
    if (o.reject_escaping)
      throw AmbiguityError(fmt::format("both fields leave the surface at ({})", fmt::join(x, ", ")));
  }
  const double lambda = b / (b - a);
  Point v(fp.size());
  for (std::size_t d = 0; d < v.size(); ++d) v[d] = lambda * fp[d] + (1 - lambda) * fm[d];
  if (sliding) *sliding = true;
  return v;
}

Trajectory simulate_filippov(const PiecewiseField& z, const Point& x0, double t_minus, double t_plus, double step,
                             const FilippovOptions& options) {
  check_horizons(t_minus, t_plus, step);
  if (!z.space.contains(x0)) throw DomainError("initial point lies outside the space");
  const Point start = z.space.reduce(x0);
  auto fwd = integrate_filippov(z, start, grid_index(t_plus, step), +1, step, options);
  auto bwd = integrate_filippov(z, start, -grid_index(t_minus, step), -1, step, options);
  return join_halves(z.space, step, std::move(bwd), std::move(fwd));
}

SolutionBundle filippov_bundle(const PiecewiseField& z, const std::vector<Point>& seeds, double t_minus,
                               double t_plus, double step, const FilippovOptions& options, std::size_t threads) {
  std::vector<std::optional<Trajectory>> slots(seeds.size());
  parallel_for(seeds.size(), threads,
               [&](std::size_t i) { slots[i] = simulate_filippov(z, seeds[i], t_minus, t_plus, step, options); });
  SolutionBundle out(z.space, step, {}, {"filippov", 0, t_minus, t_plus, ""});
  for (auto& s : slots) out.add(std::move(*s));
  return out;
}

SetValuedField filippov_set_valued(const PiecewiseField& z, const FilippovOptions& options,
                                   std::optional<double> speed_bound) {
  return SetValuedField::from_callback(
      z.space,
      [z, options](const Point& x) -> VelocityBox {
        const double hx = z.h(x);
        if (hx > options.surface_tolerance) {
          const Point v = z.f_plus(x);
          return {v, v};
        }
        if (hx < -options.surface_tolerance) {
          const Point v = z.f_minus(x);
          return {v, v};
        }
        bool sliding = false;
        const Point v = filippov_velocity(z, x, +1, options, &sliding);
        if (sliding) return {v, v};
        const Point fp = z.f_plus(x), fm = z.f_minus(x);
        VelocityBox box{fp, fp};
        for (std::size_t d = 0; d < fp.size(); ++d) {
          box.lower[d] = std::min(fp[d], fm[d]);
          box.upper[d] = std::max(fp[d], fm[d]);
        }
        return box;
      },
      speed_bound);
}

// ---------------------------------------------------------------------------

BackwardExtension extend_backward(const SolutionBundle& s, const Trajectory& phi, std::size_t depth, double tol) {
  if (depth == 0) throw DomainError("extension depth must be at least 1");
  if (phi.step() != s.step()) throw AlignmentError("trajectory and bundle steps differ");
  BackwardExtension out{phi, 0};
  while (out.depth < depth && out.trajectory.flags().left_truncated) {
    const Trajectory& cur = out.trajectory;
    const Trajectory* match = nullptr;
    for (const auto& psi : s.members()) {
      if (psi.size() >= 2 && s.space().distance(psi.back(), cur.front()) <= tol) {
        match = &psi;
        break;
      }
    }
    if (!match) break;
    const Trajectory head = shift(*match, match->end_index() - cur.start_index());
    out.trajectory = concatenate(head, cur, cur.start_time(), tol);
    ++out.depth;
  }
  return out;
}

namespace builtin {

SetValuedField interval_rotation() {
  return SetValuedField::from_callback(
      Space::torus({0.0}, {1.0}), [](const Point&) { return VelocityBox{{1.0}, {2.0}}; }, 2.0);
}

Space filippov_space() { return Space::box({0.0, -1.05}, {1.0, 1.05}); }

PiecewiseField filippov_absorb() {
  PiecewiseField z{filippov_space(), nullptr, nullptr, nullptr, nullptr, nullptr};
  z.h = [](const Point& p) { return p[1]; };
  z.f_plus = [](const Point&) { return Point{0.0, -1.0}; };
  z.f_minus = [](const Point&) { return Point{0.0, 1.0}; };
  z.grad_h = [](const Point&) { return Point{0.0, 1.0}; };
  return z;
}

}  // namespace builtin

}  // namespace ydyn
