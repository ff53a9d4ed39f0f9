#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "expander/graph.hpp"
#include "expander/rng.hpp"

namespace expander {
namespace {

const Sequence kFigureOne({1, 41, 42, 13, 56, 23, 73}, "sqrt2-digit-pairs");

std::vector<Vertex> one_based(const RankPermutation& pi) {
  std::vector<Vertex> out;
  for (auto v : pi.order) out.push_back(v + 1);
  return out;
}

TEST(RankPermutation, FigureOneSequence) {
  EXPECT_EQ(one_based(rank_permutation(kFigureOne, TiePolicy::stable())),
            (std::vector<Vertex>{1, 4, 6, 2, 3, 5, 7}));
  EXPECT_EQ(one_based(rank_permutation(kFigureOne, TiePolicy::jitter(9))),
            (std::vector<Vertex>{1, 4, 6, 2, 3, 5, 7}));
}

TEST(RankPermutation, SortedInputIsIdentity) {
  const Sequence s({10, 20, 30}, "s");
  EXPECT_EQ(rank_permutation(s, TiePolicy::stable()).order, (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(rank_permutation(s, TiePolicy::jitter(4)).order, (std::vector<Vertex>{0, 1, 2}));
}

TEST(RankPermutation, StableTiesKeepIndexOrder) {
  EXPECT_EQ(rank_permutation(Sequence({5, 5, 5}, "t"), TiePolicy::stable()).order, (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(rank_permutation(Sequence({2, 1, 2, 1}, "t"), TiePolicy::stable()).order,
            (std::vector<Vertex>{1, 3, 0, 2}));
}

TEST(RankPermutation, TooShort) { EXPECT_THROW(rank_permutation(Sequence({1, 2}, "t")), Error); }

TEST(RankPermutation, JitterShufflesTiesUniformly) {
  // All 3! orders of a fully tied triple should appear about equally often.
  const Sequence s({5, 5, 5}, "t");
  std::map<std::vector<Vertex>, int> counts;
  constexpr int kSeeds = 6000;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) ++counts[rank_permutation(s, TiePolicy::jitter(seed)).order];
  ASSERT_EQ(counts.size(), 6U);
  double chi2 = 0;
  for (const auto& [perm, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 20.5);  // chi-square, 5 dof, p = 0.001
}

TEST(RankPermutation, JitterRespectsValueOrder) {
  CounterRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(50);
    for (auto& x : v) x = static_cast<double>(rng.next() % 7);
    const Sequence s(v, "t");
    const auto pi = rank_permutation(s, TiePolicy::jitter(trial));
    for (std::size_t k = 0; k + 1 < pi.size(); ++k) ASSERT_LE(v[pi.order[k]], v[pi.order[k + 1]]);
  }
}

TEST(BuildGraph, SortedInputGivesDoubledCycle) {
  const auto g = build_graph(Sequence({1, 2, 3, 4}, "s"), TiePolicy::stable());
  EXPECT_EQ(export_graph(g, GraphFormat::kEdgeList), "1 2 2\n1 4 2\n2 3 2\n3 4 2\n");
}

TEST(BuildGraph, FigureOneEdges) {
  const auto g = build_graph(kFigureOne, TiePolicy::stable());
  using E = RegularMultigraph::Edge;
  const std::vector<E> expected{{0, 1, 1}, {0, 3, 1}, {0, 6, 2}, {1, 2, 2}, {1, 5, 1}, {2, 3, 1},
                                {2, 4, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}, {4, 6, 1}, {5, 6, 1}};
  EXPECT_EQ(g.edges(), expected);
  EXPECT_EQ(g.multiplicity(1, 2), 2);
  EXPECT_EQ(g.multiplicity(6, 0), 2);
  EXPECT_EQ(g.multiplicity(0, 2), 0);
}

TEST(ExportGraph, DoubledTriangle) {
  const auto g = build_graph(Sequence({3, 1, 2}, "t"), TiePolicy::stable());
  EXPECT_EQ(export_graph(g, "edge-list"), "1 2 2\n1 3 2\n2 3 2\n");
}

TEST(ExportGraph, FigureOneDot) {
  const auto dot = export_graph(build_graph(kFigureOne, TiePolicy::stable()), GraphFormat::kDot);
  EXPECT_EQ(dot.rfind("graph G {\n", 0), 0U);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '-') / 2, 14);
  EXPECT_NE(dot.find("  1 -- 7;\n  1 -- 7;\n"), std::string::npos);
  EXPECT_EQ(dot.substr(dot.size() - 2), "}\n");
}

TEST(ExportGraph, FigureOneEdgeList) {
  const auto text = export_graph(build_graph(kFigureOne, TiePolicy::stable()), GraphFormat::kEdgeList);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
  EXPECT_EQ(text,
            "1 2 1\n1 4 1\n1 7 2\n2 3 2\n2 6 1\n3 4 1\n3 5 1\n4 5 1\n4 6 1\n5 6 1\n5 7 1\n6 7 1\n");
}

TEST(ExportGraph, UnknownFormat) {
  const auto g = build_graph(kFigureOne);
  EXPECT_THROW(export_graph(g, "graphml"), Error);
  EXPECT_THROW(export_graph(g, ""), Error);
}

// Structural invariants over random inputs of varying length, including
// heavily tied inputs, under both tie policies.
TEST(BuildGraph, StructuralInvariantsProperty) {
  CounterRng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 3 + rng.next() % 198;
    const bool tied = trial % 3 == 0;
    std::vector<double> v(n);
    for (auto& x : v) x = tied ? static_cast<double>(rng.next() % 5) : rng.uniform();
    const Sequence s(v, "p");
    for (const auto policy : {TiePolicy::stable(), TiePolicy::jitter(trial)}) {
      const auto g = build_graph(s, policy);
      ASSERT_EQ(g.size(), n);
      int total = 0;
      for (Vertex u = 0; u < n; ++u) {
        ASSERT_EQ(g.weighted_degree(u), 4);
        const auto nb = g.neighbors(u);
        const auto mu = g.multiplicities(u);
        for (std::size_t j = 0; j < nb.size(); ++j) {
          ASSERT_NE(nb[j], u);
          ASSERT_TRUE(mu[j] == 1 || mu[j] == 2);
          ASSERT_EQ(g.multiplicity(nb[j], u), mu[j]);
        }
      }
      for (const auto& e : g.edges()) total += e.multiplicity;
      ASSERT_EQ(total, static_cast<int>(2 * n));
    }
  }
}

TEST(BuildGraph, MonotoneInputDoublesEveryEdge) {
  for (std::size_t n = 3; n <= 40; ++n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    for (const auto& e : build_graph(Sequence(v, "m")).edges()) ASSERT_EQ(e.multiplicity, 2);
    std::reverse(v.begin(), v.end());
    for (const auto& e : build_graph(Sequence(v, "m")).edges()) ASSERT_EQ(e.multiplicity, 2);
  }
}

TEST(BuildGraph, EdgeMultisetIsUnionOfCycles) {
  CounterRng rng(8);
  std::vector<double> v(60);
  for (auto& x : v) x = rng.uniform();
  const Sequence s(v, "u");
  const auto pi = rank_permutation(s, TiePolicy::stable());
  std::map<std::pair<Vertex, Vertex>, int> expected;
  const auto add = [&](Vertex a, Vertex b) { ++expected[{std::min(a, b), std::max(a, b)}]; };
  for (Vertex i = 0; i < 60; ++i) add(i, (i + 1) % 60);
  for (std::size_t k = 0; k < 60; ++k) add(pi.order[k], pi.order[(k + 1) % 60]);
  std::map<std::pair<Vertex, Vertex>, int> got;
  for (const auto& e : build_graph(pi).edges()) got[{e.u, e.v}] = e.multiplicity;
  EXPECT_EQ(got, expected);
}

}  // namespace
}  // namespace expander
