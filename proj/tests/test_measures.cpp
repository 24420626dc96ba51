#include <random>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/invariance_limits.hpp"
#include "ydyn/measures.hpp"
#include "ydyn/relation_kernel.hpp"

using namespace ydyn;

namespace {

const Space circle = Space::torus({0.0}, {1.0});

CellRelation rotation_relation() {
  return build_cell_relation(builtin::interval_rotation(), Grid::make(circle, {100}), 0.05, 1);
}

CellRelation filippov_relation() {
  return build_cell_relation(filippov_set_valued(builtin::filippov_absorb()),
                             Grid::make(builtin::filippov_space(), {8, 21}), 0.1, 0);
}

CellSet surface(const GridPtr& g) { return cells_in_box(g, {0.0, 0.0}, {1.0, 0.0}); }

DiscreteMeasure markov_for(const Relation& r, std::uint64_t seed) {
  return kernel::markov_measure(r, testing::random_core_weights(r, seed));
}

}  // namespace

TEST_CASE("test families") {
  auto g1 = Grid::make(circle, {100});
  CHECK(single_cells(g1).size() == 100);
  const auto dy = dyadic_family(g1);
  CHECK(dy.size() == 100 + 50 + 25 + 12 + 6 + 3 + 1);
  CHECK(dy.back() == cells_in_box(g1, {0.0}, {0.635}));
  CHECK(dy.back().size() == 64);

  auto g2 = Grid::make(builtin::filippov_space(), {8, 21});
  const auto dy2 = dyadic_family(g2);
  CHECK(dy2.size() == (8 + 4 + 2 + 1) * (21 + 10 + 5 + 2 + 1));
  for (const auto& s : dy2) {
    const auto n = s.size();
    CHECK((n & (n - 1)) == 0);
  }

  auto gf = Grid::make(Space::finite({"a", "b", "c"}), {});
  CHECK(dyadic_family(gf).size() == 3);

  const auto rnd = random_family(g1, 100, 5);
  CHECK(rnd.size() == 100);
  CHECK(rnd == random_family(g1, 100, 5));
  for (const auto& s : rnd) CHECK_FALSE(s.empty());
  CHECK(default_family(g1, 5).size() == 100 + dy.size() + 100);

  const auto arcs = random_arcs(g1, 50, 3);
  bool wrapped = false;
  for (const auto& a : arcs) {
    CHECK_FALSE(a.empty());
    if (a.size() < 100) {
      // a proper arc has exactly one cell whose left neighbour is missing
      std::size_t starts = 0;
      for (auto c : a.cells()) starts += !a.contains((c + 99) % 100);
      CHECK(starts == 1);
    }
    wrapped = wrapped || (a.contains(0) && a.contains(99) && a.size() < 100);
  }
  CHECK(wrapped);
  CHECK_THROWS_AS(random_arcs(g2, 1, 1), DomainError);

  const auto v = rotation_relation();
  CHECK(steps_for_times(v, {0.05, 0.5, 1.0}) == std::vector<long>{1, 10, 20});
  CHECK_THROWS_AS(steps_for_times(v, {0.07}), AlignmentError);
}

TEST_CASE("averaging on the rotation approaches the uniform measure") {
  const auto v = rotation_relation();
  const auto mu = krylov_bogoliubov(v, 0, 1000);
  CHECK(mu.total_variation(DiscreteMeasure::uniform(100)) <= 0.05);
  CHECK_THROWS_AS(krylov_bogoliubov(v, 0, 99), HorizonError);
}

TEST_CASE("averaging a constant trajectory gives a point mass") {
  auto g = Grid::make(circle, {10});
  const Trajectory phi(circle, 0.1, 0, std::vector<Point>(150, Point{0.42}));
  CHECK(krylov_bogoliubov(phi, g, 150).weights() == DiscreteMeasure::point_mass(10, 4).weights());
  CHECK_THROWS_AS(krylov_bogoliubov(phi, g, 151), HorizonError);
  CHECK_THROWS_AS(krylov_bogoliubov(phi, g, 50), HorizonError);
  const Trajectory late(circle, 0.1, 1, std::vector<Point>(200, Point{0.42}));
  CHECK_THROWS_AS(krylov_bogoliubov(late, g, 150), HorizonError);
}

TEST_CASE("averaging the absorbing example concentrates on the landing cell") {
  const auto v = filippov_relation();
  const auto& g = v.grid();
  const auto x = g->locate({0.3, 1.0});
  const auto target = g->locate({0.3, 0.0});
  // the reach set lands after 10 steps of 0.1
  const auto mu = krylov_bogoliubov(v, x, 1000);
  CHECK(mu.weight(target) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(mu.weight(target) > krylov_bogoliubov(v, x, 100).weight(target));

  const auto phi = simulate_filippov(builtin::filippov_absorb(), {0.3, 1.0}, 0.0, 20.0, 0.01);
  const auto occ = krylov_bogoliubov(phi, g, 2000);
  CHECK(occ.weight(target) >= 1.0 - 100.0 / 2000.0);
  CHECK(mu.support().is_subset_of(Bits(g->cell_count()).set()));
}

TEST_CASE("sub-invariance examples") {
  const auto v = rotation_relation();
  const auto g = v.grid();
  const auto uniform = DiscreteMeasure::uniform(100);
  const auto steps = steps_for_times(v, {0.05, 0.5, 1.0});
  auto family = dyadic_family(g);
  for (auto& a : random_arcs(g, 100, 7)) family.push_back(std::move(a));
  const auto rep = check_subinvariance(uniform, v, family, steps, 1e-9, "dyadic+arcs");
  CHECK(rep.passed());
  CHECK(rep.pairs_tested == family.size() * 3);
  CHECK(rep.max_violation() <= 1e-12);

  const auto r3 = import_relation(testing::r3());
  const DiscreteMeasure half({0.5, 0.5, 0.0});
  const auto a = CellSet::of(r3.grid(), {0});
  const auto r3rep = check_subinvariance(half, r3, {a}, {1});
  CHECK(r3rep.max_violation() == 0.0);
  CHECK(r3rep.passed());

  const auto fil = filippov_relation();
  const auto off = fil.grid()->locate({0.3, 1.0});
  const auto point = DiscreteMeasure::point_mass(fil.cell_count(), off);
  const auto bad = check_subinvariance(point, fil, {CellSet::of(fil.grid(), {off})}, {1});
  CHECK(bad.max_violation() == 1.0);
  CHECK_FALSE(bad.passed());
  CHECK(bad.worst_pair->set == 0);
  CHECK(bad.worst_pair->steps == 1);

  CHECK_THROWS_AS(check_subinvariance(DiscreteMeasure::uniform(3), v, {}, {1}), DomainError);
  const auto none = check_subinvariance(uniform, v, {}, {1});
  CHECK(none.pairs_tested == 0);
  CHECK(none.passed());
}

TEST_CASE("Markov measures are sub-invariant for every subset") {
  for (auto seed : testing::sweep_seeds(20)) {
    const auto r = testing::random_relation(seed, 12);
    if (kernel::viable_core(r, kernel::full_set(r)).none()) continue;
    const auto v = import_relation(r);
    const auto mu = markov_for(r, seed);
    std::vector<CellSet> all;
    for (std::uint64_t m = 0; m < (1ULL << r.size()); ++m) all.emplace_back(v.grid(), testing::subset_bits(r.size(), m));
    const auto rep = check_subinvariance(mu, v, all, {1, 2, 3}, 1e-12, "all subsets", 4);
    CHECK(rep.passed());
  }
}

TEST_CASE("strict invariance is falsified where sub-invariance holds") {
  const auto fil = filippov_relation();
  const auto& g = fil.grid();
  const auto on_line = DiscreteMeasure::uniform_on(surface(g).bits());
  const auto strip = cells_in_box(g, {0.0, 0.2}, {1.0, 0.4});
  const auto strict = check_strict_invariance(on_line, fil, {strip}, {10});
  CHECK(strict.max_violation() == 1.0);
  REQUIRE(strict.strict_violations.size() == 1);
  CHECK(strict.strict_violations[0].value > 0.0);
  CHECK_FALSE(strict.passed());
  CHECK(check_subinvariance(on_line, fil, default_family(g, 1), {1, 10}, 1e-9).passed());

  const auto piece = cells_in_box(g, {0.3, 0.0}, {0.6, 0.0});
  const auto eq = check_strict_invariance(on_line, fil, {piece, surface(g)}, {1, 10});
  CHECK(eq.max_violation() == 0.0);
  CHECK(eq.strict_violations.empty());

  const auto rot = rotation_relation();
  const auto uniform = DiscreteMeasure::uniform(100);
  const auto arc = cells_in_box(rot.grid(), {0.2}, {0.295});
  CHECK(check_subinvariance(uniform, rot, {arc}, {1, 10}).passed());
  const auto grows = check_strict_invariance(uniform, rot, {arc}, {1, 10}, 1e-9);
  CHECK_FALSE(grows.passed());
  CHECK(grows.strict_violations.size() == 2);
}

TEST_CASE("recurrence examples") {
  const auto r3 = import_relation(testing::r3());
  const auto& g = r3.grid();
  const DiscreteMeasure half({0.5, 0.5, 0.0});
  const auto pa = poincare_check(half, r3, CellSet::of(g, {0}));
  CHECK(pa.verdict == RecurrenceVerdict::pass);
  CHECK(CellSet::of(g, {0, 1}).is_subset_of(pa.returning));
  CHECK(pa.returning_mass == 0.5);

  const auto pc = poincare_check(DiscreteMeasure::point_mass(3, 2), r3, CellSet::of(g, {2}));
  CHECK(pc.verdict == RecurrenceVerdict::pass);
  CHECK(pc.returning.contains(2));
  CHECK(pc.returning_mass == pc.mass);

  // mass on a state that never comes back
  const auto chain = import_relation(Relation(2, {{0, 1}, {1, 1}}));
  const auto fail = poincare_check(DiscreteMeasure::uniform(2), chain, CellSet::of(chain.grid(), {0}));
  CHECK(fail.verdict == RecurrenceVerdict::fail);
  CHECK(fail.returning.empty());

  const auto rot = rotation_relation();
  const auto uniform = DiscreteMeasure::uniform(100);
  const auto b = cells_in_box(rot.grid(), {0.0}, {0.095});
  const auto pb = poincare_check(uniform, rot, b, {}, 1e-9);
  CHECK(pb.verdict == RecurrenceVerdict::pass);
  CHECK(pb.returning == CellSet::full(rot.grid()));
  CHECK(poincare_check(uniform, rot, b, 3, 1e-9).verdict == RecurrenceVerdict::inconclusive);
  for (const auto& arc : random_arcs(rot.grid(), 20, 11)) {
    const auto p = poincare_check(uniform, rot, arc, {}, 1e-9);
    CHECK(p.verdict == RecurrenceVerdict::pass);
    CHECK(std::abs(p.returning_mass - p.mass) <= 1e-9);
  }
}

TEST_CASE("recurrence and full measure on Markov measures") {
  for (auto seed : testing::sweep_seeds()) {
    const auto r = testing::random_relation(seed);
    if (kernel::viable_core(r, kernel::full_set(r)).none()) continue;
    const auto v = import_relation(r);
    const auto mu = markov_for(r, seed);
    for (std::uint64_t m = 1; m < (1ULL << r.size()); ++m) {
      const auto p = poincare_check(mu, v, CellSet(v.grid(), testing::subset_bits(r.size(), m)));
      CHECK(p.verdict == RecurrenceVerdict::pass);
      CHECK(p.returning_mass == p.mass);
    }
    const CellSet rec(v.grid(), kernel::recurrent_states(r));
    CHECK(CellSet(v.grid(), mu.support()).is_subset_of(rec));
    const auto d = theorem_D_check(mu, rec);
    CHECK(d.passed);
    CHECK(d.missing == 0.0);
    CHECK(recurrent_cells(v) == rec);
  }
}

TEST_CASE("full-measure examples") {
  const auto r3 = import_relation(testing::r3());
  const auto& g = r3.grid();
  const auto rec = CellSet(g, kernel::recurrent_states(testing::r3()));
  CHECK(rec == CellSet::full(g));
  CHECK(theorem_D_check(DiscreteMeasure({0.5, 0.5, 0.0}), rec).passed);
  CHECK(theorem_D_check(DiscreteMeasure::point_mass(3, 2), CellSet::of(g, {2})).passed);
  CHECK_FALSE(theorem_D_check(DiscreteMeasure({0.5, 0.5, 0.0}), CellSet::of(g, {2})).passed);

  const auto rot = rotation_relation();
  const auto all = recurrent_cells(rot);
  CHECK(all == CellSet::full(rot.grid()));
  CHECK(theorem_D_check(DiscreteMeasure::uniform(100), all).mass == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(theorem_D_check(DiscreteMeasure::uniform(100), all).passed);

  const auto fil = filippov_relation();
  const auto line = recurrent_cells(fil);
  CHECK(theorem_D_check(DiscreteMeasure::uniform_on(surface(fil.grid()).bits()), line).passed);
  CHECK_FALSE(theorem_D_check(DiscreteMeasure::uniform(fil.cell_count()), line, 1).passed);
}

TEST_CASE("averaged measures lose their sub-invariance defect as the horizon grows") {
  const auto v = rotation_relation();
  const auto family = default_family(v.grid(), 3);
  const auto steps = steps_for_times(v, {0.05, 0.5, 1.0});
  double previous = 1.0;
  for (std::size_t t : {100u, 200u, 500u, 1000u}) {
    const auto rep = check_subinvariance(krylov_bogoliubov(v, 0, t), v, family, steps, 0.01);
    MESSAGE("T = " << t << ": max value " << rep.max_violation() << ", excess " << rep.excess());
    CHECK(rep.excess() <= previous);
    previous = rep.excess();
  }
  CHECK(previous <= 0.01);
}

TEST_CASE("occupation measures are sub-invariant up to one visit") {
  // every one-step transition of the path is an edge, so each visit to A
  // after the first step is preceded by a visit to V(1)^{-1} A
  const auto v = rotation_relation();
  const auto family = default_family(v.grid(), 9);
  for (auto law : {SelectionLaw::uniform_corner, SelectionLaw::uniform_box, SelectionLaw::extreme}) {
    const auto s = sample_inclusion(builtin::interval_rotation(), {{0.123}}, 0.0, 60.0, 0.05, 1, {5, 3, law});
    REQUIRE(check_soundness(v, s).passed());
    for (std::size_t t : {100u, 400u, 1000u}) {
      const auto mu = krylov_bogoliubov(s.members()[0], v.grid(), t);
      const auto rep = check_subinvariance(mu, v, family, {1});
      CHECK(rep.max_violation() <= 1.0 / static_cast<double>(t) + 1e-12);
    }
  }
}

TEST_CASE("measure report JSON") {
  const auto fil = filippov_relation();
  const auto& g = fil.grid();
  auto rep = check_strict_invariance(DiscreteMeasure::uniform_on(surface(g).bits()), fil,
                                     {cells_in_box(g, {0.0, 0.2}, {1.0, 0.4})}, {10}, 0.0, "strip");
  rep.recurrence.push_back(poincare_check(DiscreteMeasure::uniform_on(surface(g).bits()), fil, surface(g)));
  const auto j = nlohmann::json::parse(to_json(rep));
  CHECK(j["max_violation"] == 1.0);
  CHECK(j["pairs_tested"] == 1);
  CHECK(j["worst_pair"]["steps"] == 10);
  CHECK(j["recurrence"][0]["verdict"] == "pass");
  CHECK(j["strict_violations"].size() == 1);
  CHECK(j["family"] == "strip");
}
