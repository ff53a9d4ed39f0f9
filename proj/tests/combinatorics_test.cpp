#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "expander/combinatorics.hpp"
#include "expander/dense_oracle.hpp"
#include "expander/rng.hpp"

namespace expander {
namespace {

RegularMultigraph doubled_cycle(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  return build_graph(Sequence(v, "monotone"), TiePolicy::stable());
}

RegularMultigraph random_graph(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, n);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return build_graph(Sequence(v, "random"));
}

TEST(Cheeger, DoubledEightCycle) { EXPECT_DOUBLE_EQ(cheeger_bruteforce(doubled_cycle(8)), 1.0); }

TEST(Cheeger, DoubledTriangle) { EXPECT_DOUBLE_EQ(cheeger_bruteforce(doubled_cycle(3)), 4.0); }

TEST(Cheeger, SizeLimit) { EXPECT_THROW(cheeger_bruteforce(random_graph(17, 1)), Error); }

// (d - |l2|)/2 <= h <= sqrt(2 d (d - |l2|)) with l2 the second largest
// eigenvalue, plus the same with signed l2.
TEST(Cheeger, SandwichOnRandomGraphs) {
  constexpr double kSlack = 1e-9;
  for (std::uint64_t t = 0; t < 120; ++t) {
    const std::size_t n = 3 + t % 14;
    const auto g = random_graph(n, 50 + t);
    const double h = cheeger_bruteforce(g);
    const double l2 = oracle_extremes(dense_spectrum_oracle(g)).lambda2;
    EXPECT_LE((4 - std::fabs(l2)) / 2, h + kSlack) << "n=" << n;
    EXPECT_LE(h, std::sqrt(8 * (4 - std::fabs(l2))) + kSlack) << "n=" << n;
    EXPECT_LE((4 - l2) / 2, h + kSlack) << "n=" << n;
    EXPECT_LE(h, std::sqrt(8 * (4 - l2)) + kSlack) << "n=" << n;
  }
}

TEST(Mixing, AllVerticesHasNoDiscrepancy) {
  const auto g = random_graph(60, 3);
  std::vector<Vertex> all(60);
  std::iota(all.begin(), all.end(), Vertex{0});
  const auto m = mixing_discrepancy(g, all, all);
  EXPECT_EQ(m.edge_count, 240.0);
  EXPECT_NEAR(m.discrepancy, 0.0, 1e-9);
}

TEST(Mixing, VertexAgainstItsNeighbors) {
  const auto g = random_graph(60, 4);
  for (Vertex v = 0; v < 60; ++v) {
    const auto nb = g.neighbors(v);
    const std::vector<Vertex> t(nb.begin(), nb.end());
    const auto m = mixing_discrepancy(g, {v}, t);
    EXPECT_EQ(m.edge_count, 4.0);
    EXPECT_LE(m.discrepancy, m.bound);
  }
}

TEST(Mixing, EmptySetIsAnError) {
  const auto g = random_graph(20, 5);
  EXPECT_THROW(mixing_discrepancy(g, {}, {1, 2}, 3.4), Error);
  EXPECT_THROW(mixing_discrepancy(g, {1}, {}, 3.4), Error);
  EXPECT_THROW(mixing_discrepancy(g, {20}, {1}, 3.4), Error);
}

TEST(Mixing, RandomSetsRespectTheLemma) {
  CounterRng rng(99);
  for (std::uint64_t gi = 0; gi < 5; ++gi) {
    const auto g = random_graph(200, 900 + gi);
    const double lambda = compute_lambda(g).lambda;
    for (int t = 0; t < 100; ++t) {
      std::vector<Vertex> s, u;
      const double ps = rng.uniform(), pu = rng.uniform();
      for (Vertex v = 0; v < 200; ++v) {
        if (rng.uniform() < ps) s.push_back(v);
        if (rng.uniform() < pu) u.push_back(v);
      }
      if (s.empty() || u.empty()) continue;
      const auto m = mixing_discrepancy(g, s, u, lambda);
      ASSERT_LE(m.discrepancy, m.bound);
    }
  }
}

}  // namespace
}  // namespace expander
