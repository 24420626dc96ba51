#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/relation.hpp"

using namespace ydyn;

TEST_CASE("relation text format") {
  const std::string text = "states 3\n0 -> 1\n1 -> 0\n1 -> 2\n2 -> 2\n";
  const auto r = relation_from_text(text);
  CHECK(r == testing::r3());
  CHECK(to_text(r) == text);
}

TEST_CASE("relation parser tolerates comments, blank lines and spacing") {
  const auto r = relation_from_text("# R3\n\nstates 3   # three states\n 1->2\n0 ->1\n  2 -> 2\n1 -> 0\n");
  CHECK(r == testing::r3());
}

TEST_CASE("relation parser reports malformed input") {
  CHECK_THROWS_AS(relation_from_text(""), FormatError);
  CHECK_THROWS_AS(relation_from_text("0 -> 1\n"), FormatError);
  CHECK_THROWS_WITH_AS(relation_from_text("states 2\n0 -> 5\n"), doctest::Contains("line 2"), FormatError);
  CHECK_THROWS_AS(relation_from_text("states 2\n0 => 1\n"), FormatError);
  CHECK_THROWS_AS(relation_from_text("states 2\n0 -> 1\n0 -> 1\n"), FormatError);
  CHECK_THROWS_AS(relation_from_text("states 0\n"), FormatError);
}

TEST_CASE("relation text round-trips for random relations") {
  for (auto seed : testing::sweep_seeds(50)) {
    const auto r = testing::random_relation(seed, 12);
    const auto text = to_text(r);
    CHECK(relation_from_text(text) == r);
    CHECK(to_text(relation_from_text(text)) == text);
  }
}

TEST_CASE("image and preimage are dual") {
  for (auto seed : testing::sweep_seeds(30)) {
    const auto r = testing::random_relation(seed);
    const auto n = r.size();
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        Bits sx(n), sy(n);
        sx.set(x);
        sy.set(y);
        CHECK(r.image(sx).test(y) == r.preimage(sy).test(x));
        CHECK(r.has_edge(x, y) == r.image(sx).test(y));
      }
    }
  }
}

TEST_CASE("deduplicated drops repeated edges") {
  const auto r = Relation::deduplicated(2, {{0, 1}, {0, 1}, {1, 1}});
  CHECK(r.edge_count() == 2);
  CHECK_THROWS_AS(Relation(2, {{0, 1}, {0, 1}}), ConstructionError);
  CHECK_THROWS_AS(Relation(2, {{0, 2}}), ConstructionError);
}
