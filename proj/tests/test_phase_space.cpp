#include <random>

#include "doctest.h"
#include "ydyn/errors.hpp"
#include "ydyn/phase_space.hpp"

using namespace ydyn;

namespace {

GridPtr circle(std::size_t res) { return Grid::make(Space::torus({0.0}, {1.0}), {res}); }

CellSet random_nonempty(const GridPtr& g, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.2);
  CellSet s(g);
  for (std::size_t c = 0; c < g->cell_count(); ++c)
    if (coin(rng)) s.insert(c);
  if (s.empty()) s.insert(rng() % g->cell_count());
  return s;
}

}  // namespace

TEST_CASE("locate on a circle wraps into the fundamental domain") {
  auto g = circle(10);
  CHECK(g->locate({0.25}) == 2);
  CHECK(g->locate({1.25}) == 2);
  CHECK(g->locate({-0.75}) == 2);
  CHECK(g->locate({0.0}) == 0);
  CHECK(g->locate({0.999999}) == 9);
}

TEST_CASE("locate on a box rejects points outside and closes the last cell") {
  auto g = Grid::make(Space::box({0.0}, {1.0}), {4});
  CHECK_THROWS_AS(g->locate({1.2}), DomainError);
  CHECK_THROWS_WITH_AS(g->locate({-0.1}), doctest::Contains("coordinate 0"), DomainError);
  CHECK(g->locate({1.0}) == 3);
  CHECK(g->locate({0.0}) == 0);
  CHECK(g->locate({0.5}) == 2);
}

TEST_CASE("finite spaces index labels") {
  auto g = Grid::make(Space::finite({"a", "b", "c"}), {});
  CHECK(g->cell_count() == 3);
  CHECK(g->locate_label("c") == 2);
  CHECK(g->locate({1.0}) == 1);
  CHECK_THROWS_AS(g->locate_label("d"), DomainError);
  CHECK_THROWS_AS(Space::finite({"a", "a"}), ConstructionError);
  CHECK_THROWS_AS(Space::finite({}), ConstructionError);
}

TEST_CASE("space descriptors reject degenerate bounds") {
  CHECK_THROWS_AS(Space::box({1.0}, {1.0}), ConstructionError);
  CHECK_THROWS_AS(Space::torus({0.0, 0.0}, {1.0}), ConstructionError);
  CHECK_THROWS_AS(Grid(Space::box({0.0}, {1.0}), {0}), ConstructionError);
}

TEST_CASE("locate inverts cell_center on every grid") {
  const std::vector<GridPtr> grids = {
      circle(100), Grid::make(Space::box({0.0, -1.05}, {1.0, 1.05}), {8, 21}),
      Grid::make(Space::torus({0.0, 0.0}, {2.0, 3.0}), {7, 5}),
      Grid::make(Space::box({-1, -1, -1}, {1, 1, 1}), {3, 4, 5}),
      Grid::make(Space::finite({"x", "y"}), {})};
  for (const auto& g : grids)
    for (std::size_t c = 0; c < g->cell_count(); ++c) CHECK(g->locate(g->cell_center(c)) == c);
}

TEST_CASE("torus metric is the flat quotient metric") {
  const auto s = Space::torus({0.0}, {1.0});
  CHECK(s.distance({0.05}, {0.95}) == doctest::Approx(0.1));
  CHECK(s.displacement({0.9}, {0.1})[0] == doctest::Approx(0.2));
  CHECK(s.displacement({0.1}, {0.9})[0] == doctest::Approx(-0.2));
  // half-period tie goes the positive way
  CHECK(s.displacement({0.0}, {0.5})[0] == doctest::Approx(0.5));
  CHECK(s.displacement({0.5}, {0.0})[0] == doctest::Approx(0.5));
  const auto f = Space::finite({"a", "b"});
  CHECK(f.distance({0.0}, {1.0}) == 1.0);
  CHECK(f.distance({1.0}, {1.0}) == 0.0);
}

TEST_CASE("cell_distance examples") {
  auto g = circle(10);
  CHECK(cell_distance(CellSet::of(g, {0}), CellSet::of(g, {0})) == 0);
  CHECK(cell_distance(CellSet::of(g, {0}), CellSet::of(g, {5})) == 5);
  CHECK(cell_distance(CellSet::of(g, {0}), CellSet::of(g, {9})) == 1);
  CHECK_THROWS_AS(cell_distance(CellSet::of(g, {0}), CellSet(g)), EmptySetError);
  auto other = circle(12);
  CHECK_THROWS_AS(cell_distance(CellSet::of(g, {0}), CellSet::of(other, {0})), DomainError);
}

TEST_CASE("cell_distance agrees with a brute-force Hausdorff computation") {
  std::mt19937_64 rng(7);
  auto g = Grid::make(Space::torus({0.0, 0.0}, {1.0, 1.0}), {6, 5});
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_nonempty(g, rng);
    const auto b = random_nonempty(g, rng);
    std::size_t ab = 0, ba = 0;
    for (auto x : a.cells()) {
      std::size_t best = SIZE_MAX;
      for (auto y : b.cells()) best = std::min(best, g->step_distance(x, y));
      ab = std::max(ab, best);
    }
    for (auto y : b.cells()) {
      std::size_t best = SIZE_MAX;
      for (auto x : a.cells()) best = std::min(best, g->step_distance(x, y));
      ba = std::max(ba, best);
    }
    CHECK(cell_distance(a, b) == std::max(ab, ba));
  }
}

TEST_CASE("cell_distance satisfies the triangle inequality") {
  std::mt19937_64 rng(11);
  const std::vector<GridPtr> grids = {circle(20), Grid::make(Space::box({0, 0}, {1, 1}), {7, 6}),
                                      Grid::make(Space::finite({"a", "b", "c", "d"}), {})};
  for (const auto& g : grids) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_nonempty(g, rng);
      const auto b = random_nonempty(g, rng);
      const auto c = random_nonempty(g, rng);
      CHECK(cell_distance(a, c) <= cell_distance(a, b) + cell_distance(b, c));
      CHECK(cell_distance(a, b) == cell_distance(b, a));
    }
  }
}

TEST_CASE("inflate examples") {
  auto g = circle(10);
  CHECK(inflate(CellSet::of(g, {3}), 0) == CellSet::of(g, {3}));
  CHECK(inflate(CellSet::of(g, {3}), 1) == CellSet::of(g, {2, 3, 4}));
  CHECK(inflate(CellSet::of(g, {0}), 1) == CellSet::of(g, {9, 0, 1}));
  CHECK(inflate(CellSet::full(g), 4) == CellSet::full(g));
  auto box = Grid::make(Space::box({0.0}, {1.0}), {10});
  CHECK(inflate(CellSet::of(box, {0}), 2) == CellSet::of(box, {0, 1, 2}));
  auto plane = Grid::make(Space::box({0, 0}, {1, 1}), {3, 3});
  CHECK(inflate(CellSet::of(plane, {4}), 1) == CellSet::full(plane));
}

TEST_CASE("inflate is monotone in the set and in the radius") {
  std::mt19937_64 rng(3);
  auto g = Grid::make(Space::torus({0, 0}, {1, 1}), {8, 8});
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_nonempty(g, rng);
    const auto b = a | random_nonempty(g, rng);
    const std::size_t r = trial % 3;
    CHECK(inflate(a, r).is_subset_of(inflate(b, r)));
    CHECK(inflate(a, r).is_subset_of(inflate(a, r + 1)));
    CHECK(a.is_subset_of(inflate(a, r)));
  }
}

TEST_CASE("cells_in_box selects rows and arcs") {
  auto g = Grid::make(Space::box({0.0, -1.05}, {1.0, 1.05}), {8, 21});
  const auto strip = cells_in_box(g, {0.0, 0.2}, {1.0, 0.4});
  CHECK(strip.size() == 8 * 3);
  for (auto c : strip.cells()) {
    const auto idx = g->multi_index(c);
    CHECK(idx[1] >= 12);
    CHECK(idx[1] <= 14);
  }
  auto s1 = circle(10);
  CHECK(cells_in_box(s1, {0.85}, {1.15}) == CellSet::of(s1, {8, 9, 0, 1}));
}
