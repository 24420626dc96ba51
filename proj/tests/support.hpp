// Shared fixtures for the unit and acceptance suites.
#ifndef YDYN_TESTS_SUPPORT_HPP
#define YDYN_TESTS_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "ydyn/relation.hpp"
#include "ydyn/relation_kernel.hpp"

namespace ydyn::testing {

// States a=0, b=1, c=2 with a->b, b->a, b->c, c->c.
inline Relation r3() { return Relation(3, {{0, 1}, {1, 0}, {1, 2}, {2, 2}}); }

// Random relation on 1..max_states states; edge density drawn per relation.
inline Relation random_relation(std::uint64_t seed, std::size_t max_states = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(1, max_states);
  std::uniform_real_distribution<double> density_dist(0.1, 0.5);
  std::bernoulli_distribution coin(density_dist(rng));
  const std::size_t n = size_dist(rng);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return Relation(n, std::move(edges));
}

// Fixed seed list used by every random-relation sweep.
inline std::vector<std::uint64_t> sweep_seeds(std::size_t count = 100) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = 1000 + 7919 * k;
  return seeds;
}

// Random positive weights on every edge inside the viable core.
inline kernel::EdgeWeights random_core_weights(const Relation& r, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  const auto core = kernel::viable_core(r, kernel::full_set(r));
  kernel::EdgeWeights out;
  for (const auto& [i, j] : r.edges())
    if (core.test(i) && core.test(j)) out[{i, j}] = w(rng);
  return out;
}

inline Bits subset_bits(std::size_t n, std::uint64_t mask) { return Bits(n, mask); }

}  // namespace ydyn::testing

#endif
