#include <filesystem>
#include <random>

#include "doctest.h"
#include "ydyn/errors.hpp"
#include "ydyn/trajectory.hpp"
#include "ydyn/trajectory_io.hpp"

using namespace ydyn;

namespace {

const Space line = Space::box({-100.0}, {100.0});
const Space circle = Space::torus({0.0}, {1.0});

Trajectory random_trajectory(std::mt19937_64& rng, const Space& space) {
  std::uniform_int_distribution<long> start(-20, 20);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<Point> samples(len(rng));
  for (auto& p : samples) {
    p.resize(space.dimension());
    for (auto& x : p) x = coord(rng);
  }
  return Trajectory(space, 0.1, start(rng), samples, {true, false, false, false});
}

Trajectory constant(const Space& space, Point x, long start, std::size_t len, double step = 0.1) {
  return Trajectory(space, step, start, std::vector<Point>(len, x));
}

}  // namespace

TEST_CASE("shift examples") {
  const Trajectory phi(line, 0.1, 0, {{1.0}, {2.0}, {3.0}});
  CHECK(shift(phi, 0) == phi);
  const auto moved = shift(phi, 1);
  CHECK(moved.start_index() == -1);
  CHECK(moved.samples() == phi.samples());
  CHECK(shift(shift(phi, 2), 3) == shift(phi, 5));
  CHECK(shift_by_time(phi, 0.2) == shift(phi, 2));
  CHECK_THROWS_AS(shift_by_time(phi, 0.15), AlignmentError);
}

TEST_CASE("flow laws hold exactly on random trajectories") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<long> k(-50, 50);
  for (int n = 0; n < 300; ++n) {
    const auto phi = random_trajectory(rng, line);
    const long j = k(rng), i = k(rng);
    CHECK(shift(phi, 0) == phi);
    CHECK(shift(shift(phi, j), i) == shift(phi, j + i));
    for (long t = phi.start_index(); t <= phi.end_index(); ++t)
      CHECK(evaluate(shift(phi, j), static_cast<double>(t - j) * 0.1) == phi.at_index(t));
  }
}

TEST_CASE("evaluate interpolates and rejects times outside the window") {
  const Trajectory phi(line, 0.1, 0, {{0.0}, {1.0}});
  CHECK(evaluate(phi, 0.1)[0] == 1.0);
  CHECK(evaluate(phi, 0.0)[0] == 0.0);
  CHECK(evaluate(phi, 0.05)[0] == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(evaluate(phi, 0.2), doctest::Contains("[0, 0.1]"), DomainError);
  CHECK_THROWS_AS(evaluate(phi, -0.01), DomainError);
}

TEST_CASE("evaluate on a circle follows the shorter arc") {
  const Trajectory phi(circle, 1.0, 0, {{0.9}, {0.1}});
  CHECK(evaluate(phi, 0.5)[0] == doctest::Approx(0.0));
  CHECK(evaluate(phi, 0.25)[0] == doctest::Approx(0.95));
  const Trajectory half(circle, 1.0, 0, {{0.0}, {0.5}});
  // a half-period tie goes the positive way
  CHECK(evaluate(half, 0.5)[0] == doctest::Approx(0.25));
}

TEST_CASE("cu_distance examples") {
  const auto a = constant(line, {1.0}, -5, 11);
  const auto b = constant(line, {4.0}, -5, 11);
  CHECK(cu_distance(a, a, -0.5, 0.5) == 0.0);
  CHECK(cu_distance(a, b, -0.5, 0.5) == doctest::Approx(3.0));
  CHECK(cu_distance(b, a, -0.2, 0.3) == cu_distance(a, b, -0.2, 0.3));
  CHECK_THROWS_AS(cu_distance(a, b, -0.6, 0.5), DomainError);
}

TEST_CASE("cu_distance is a pseudometric") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<Trajectory> t;
    for (int i = 0; i < 3; ++i) {
      std::vector<Point> samples(8);
      for (auto& p : samples) p = {coord(rng), coord(rng)};
      t.emplace_back(Space::torus({0, 0}, {1, 1}), 0.25, -3, samples);
    }
    const double ab = cu_distance(t[0], t[1], -0.75, 1.0);
    const double bc = cu_distance(t[1], t[2], -0.75, 1.0);
    const double ac = cu_distance(t[0], t[2], -0.75, 1.0);
    CHECK(ab == cu_distance(t[1], t[0], -0.75, 1.0));
    CHECK(ac <= ab + bc + 1e-15);
  }
}

TEST_CASE("concatenate splices at a matching time") {
  const Trajectory phi(line, 0.1, 0, {{0.0}, {1.0}, {2.0}, {3.0}});
  CHECK(concatenate(phi, phi, 0.2, 1e-9) == phi);

  const Trajectory psi(line, 0.1, 1, {{1.0}, {5.0}, {6.0}, {7.0}},
                       {false, true, false, false});
  const auto joined = concatenate(phi, psi, 0.1, 1e-9);
  CHECK(joined.start_index() == 0);
  CHECK(joined.samples() == std::vector<Point>{{0.0}, {1.0}, {5.0}, {6.0}, {7.0}});
  CHECK(joined.flags().right_truncated);

  const auto far = constant(line, {0.5}, 0, 4);
  CHECK_THROWS_WITH_AS(concatenate(phi, far, 0.0, 1e-9), doctest::Contains("gap 0.5"), SwitchingError);
}

TEST_CASE("concatenate adopts the second value at the splice time") {
  const Trajectory phi(line, 1.0, 0, {{0.0}, {1.0}, {2.0}});
  const Trajectory psi(line, 1.0, 0, {{9.0}, {1.0 + 1e-12}, {4.0}});
  CHECK(concatenate(phi, psi, 1.0, 1e-9).at_index(1)[0] == 1.0 + 1e-12);
}

TEST_CASE("concatenate is associative when splice points match exactly") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    std::vector<Point> s1(10), s2(10), s3(10);
    for (std::size_t i = 0; i < 10; ++i) s1[i] = {coord(rng)}, s2[i] = {coord(rng)}, s3[i] = {coord(rng)};
    s2[3] = s1[3];
    s3[6] = s2[6];
    const Trajectory a(line, 0.5, 0, s1), b(line, 0.5, 0, s2), c(line, 0.5, 0, s3);
    CHECK(concatenate(concatenate(a, b, 1.5, 0.0), c, 3.0, 0.0) ==
          concatenate(a, concatenate(b, c, 3.0, 0.0), 1.5, 0.0));
  }
}

TEST_CASE("concatenate reproduces the absorbed descent") {
  const Space plane = Space::box({0.0, -1.05}, {1.0, 1.05});
  const double dt = 0.01;
  std::vector<Point> descent;
  for (int k = 0; k <= 100; ++k) descent.push_back({0.3, 1.0 - k * dt});
  descent.back() = {0.3, 0.0};
  const Trajectory down(plane, dt, 0, descent);
  const auto rest = constant(plane, {0.3, 0.0}, 0, 201, dt);
  const auto joined = concatenate(down, rest, 1.0, 1e-9);
  REQUIRE(joined.size() == 201);
  for (long k = 0; k <= 200; ++k) {
    const double t = k * dt;
    CHECK(joined.at_index(k)[0] == 0.3);
    CHECK(joined.at_index(k)[1] == doctest::Approx(std::max(1.0 - t, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("section filters members defined at time zero") {
  auto grid = Grid::make(circle, {10});
  SolutionBundle s(circle, 0.1);
  s.add(constant(circle, {0.05}, -2, 5));
  s.add(constant(circle, {0.15}, -2, 5));
  s.add(constant(circle, {0.07}, 1, 5));  // not defined at 0
  s.add(constant(circle, {0.0}, 0, 1));
  CHECK(section(s, CellSet::full(grid)).size() == 3);
  CHECK(section(s, CellSet(grid)).empty());
  const auto first = section(s, CellSet::of(grid, {0}));
  REQUIRE(first.size() == 2);
  for (const auto& phi : first.members()) CHECK(phi.at_index(0)[0] < 0.1);
}

TEST_CASE("bundles reject mismatched members") {
  SolutionBundle s(line, 0.1);
  CHECK_THROWS_AS(s.add(constant(line, {0.0}, 0, 2, 0.2)), ConstructionError);
  CHECK_THROWS_AS(s.add(constant(circle, {0.0}, 0, 2)), ConstructionError);
  CHECK_THROWS_AS(Trajectory(line, 0.1, 0, {}), ConstructionError);
  CHECK_THROWS_AS(Trajectory(line, 0.1, 0, {{200.0}}), ConstructionError);
  CHECK_THROWS_AS(Trajectory(line, 0.0, 0, {{0.0}}), ConstructionError);
}

TEST_CASE("shift_closure contains every shift defined at zero") {
  SolutionBundle s(line, 0.1);
  s.add(Trajectory(line, 0.1, -1, {{1.0}, {2.0}, {3.0}}));
  const auto closed = shift_closure(s);
  REQUIRE(closed.size() == 3);
  CHECK(closed[0].at_index(0)[0] == 1.0);
  CHECK(closed[1].at_index(0)[0] == 2.0);
  CHECK(closed[2].at_index(0)[0] == 3.0);
}

TEST_CASE("axiom diagnostics on constants over an epsilon-net") {
  auto grid = Grid::make(circle, {20});
  SolutionBundle s(circle, 0.05);
  for (std::size_t c = 0; c < 20; ++c) s.add(constant(circle, grid->cell_center(c), -10, 21, 0.05));
  const auto report = check_axioms(s, grid, {});
  CHECK(report.passed());
  CHECK(report.existence_coverage == 1.0);
  CHECK(report.check("uniqueness").passed);
  CHECK(report.lipschitz_witness == 0.0);
  CHECK(equilibrium_points(s, grid, 1e-12) == CellSet::full(grid));
}

TEST_CASE("axiom diagnostics flag a member with growing steps") {
  const Space wide = Space::box({0.0}, {1e4});
  auto grid = Grid::make(wide, {10});
  SolutionBundle s(wide, 0.01);
  std::vector<Point> samples;
  for (int k = 0; k <= 13; ++k) samples.push_back({std::ldexp(1.0, k)});
  s.add(Trajectory(wide, 0.01, 0, samples));
  AxiomOptions opts;
  opts.min_coverage = 0.0;
  const auto report = check_axioms(s, grid, opts);
  CHECK_FALSE(report.check("compactness").passed);
  CHECK_FALSE(report.passed());
  opts.lipschitz_bound = 2.0;
  CHECK_FALSE(check_axioms(s, grid, opts).check("compactness").passed);
}

TEST_CASE("axiom diagnostics report partial coverage") {
  auto grid = Grid::make(circle, {4});
  SolutionBundle s(circle, 0.1);
  s.add(constant(circle, {0.1}, 0, 3));
  const auto report = check_axioms(s, grid, {});
  CHECK(report.existence_coverage == 0.25);
  CHECK_FALSE(report.check("existence").passed);
  CHECK_THROWS_AS(check_axioms(SolutionBundle(circle, 0.1), grid, {}), EmptySetError);
}

TEST_CASE("trajectory CSV round-trips bit-exactly") {
  std::mt19937_64 rng(77);
  const Space plane = Space::box({-1, -1}, {1, 1});
  for (int n = 0; n < 50; ++n) {
    const auto phi = random_trajectory(rng, plane);
    const auto text = trajectory_to_csv(phi);
    CHECK(trajectory_from_csv(text, plane, 0.1, phi.flags()) == phi);
  }
  CHECK(trajectory_to_csv(Trajectory(line, 0.5, -1, {{1.0}, {2.5}})) == "t,x1\n-0.5,1\n0,2.5\n");
  CHECK_THROWS_AS(trajectory_from_csv("t,x1\n0,1\n0.2,1\n", line, 0.1), FormatError);
  CHECK_THROWS_AS(trajectory_from_csv("t,x1\n0.05,1\n", line, 0.1), FormatError);
  CHECK_THROWS_AS(trajectory_from_csv("t,x1,x2\n0,1,2\n", line, 0.1), FormatError);
}

TEST_CASE("bundle directories round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ydyn_bundle_roundtrip";
  std::filesystem::remove_all(dir);
  std::mt19937_64 rng(3);
  SolutionBundle s(circle, 0.1, {}, {"test", 17, -2.0, 2.0, "fixture"});
  for (int i = 0; i < 5; ++i) s.add(random_trajectory(rng, circle));
  write_bundle(dir.string(), s);
  CHECK(read_bundle(dir.string()) == s);
  std::filesystem::remove_all(dir);
}
