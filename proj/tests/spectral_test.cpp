#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "expander/dense_oracle.hpp"
#include "expander/graph.hpp"
#include "expander/rng.hpp"
#include "expander/sources.hpp"
#include "expander/spectral.hpp"

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

SpectralOptions long_run() {
  SpectralOptions o;
  o.max_iterations = 1'000'000;
  return o;
}

TEST(Spmv, ConstantVectorGivesDegree) {
  const auto g = random_graph(37, 1);
  const std::vector<double> ones(37, 1.0);
  for (double v : spmv(g, ones)) EXPECT_EQ(v, 4.0);
}

TEST(Spmv, DoubledFourCycleAlternatingVector) {
  const auto g = doubled_cycle(4);
  const std::vector<double> x{1, 0, -1, 0};
  EXPECT_EQ(spmv(g, x), (std::vector<double>{0, 0, 0, 0}));
}

TEST(Spmv, BasisVectorGivesColumn) {
  const auto g = random_graph(25, 2);
  for (Vertex k = 0; k < 25; ++k) {
    std::vector<double> e(25, 0.0);
    e[k] = 1.0;
    const auto col = spmv(g, e);
    EXPECT_EQ(std::accumulate(col.begin(), col.end(), 0.0), 4.0);
    for (Vertex i = 0; i < 25; ++i) EXPECT_EQ(col[i], g.multiplicity(i, k));
  }
}

TEST(Spmv, LengthMismatch) {
  const auto g = random_graph(10, 3);
  EXPECT_THROW(spmv(g, std::vector<double>(9, 1.0)), Error);
}

TEST(RemoveMean, LeavesNegligibleMean) {
  CounterRng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(1000 + t * 37);
    const double offset = 1e6 * rng.uniform();
    for (auto& v : x) v = offset + rng.uniform();
    remove_mean(x);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    EXPECT_LE(std::fabs(mean), 1e-12 * std::sqrt(dot(x, x)));
  }
}

TEST(ExtremeEigenvalue, DoubledEightCycle) {
  const auto g = doubled_cycle(8);
  const auto top = extreme_eigenvalue(g, SpectrumEnd::kTop, long_run());
  const auto bottom = extreme_eigenvalue(g, SpectrumEnd::kBottom, long_run());
  ASSERT_TRUE(top.converged);
  ASSERT_TRUE(bottom.converged);
  EXPECT_NEAR(top.value, 4 * std::cos(2 * std::numbers::pi / 8), 1e-8);
  EXPECT_NEAR(top.value, 2 * std::numbers::sqrt2, 1e-8);
  EXPECT_NEAR(bottom.value, -4.0, 1e-8);
}

TEST(ExtremeEigenvalue, MatchesDenseOracleOnRandomGraphs) {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto g = random_graph(50, 100 + t);
    const auto o = oracle_extremes(dense_spectrum_oracle(g));
    const auto top = extreme_eigenvalue(g, SpectrumEnd::kTop, long_run());
    const auto bottom = extreme_eigenvalue(g, SpectrumEnd::kBottom, long_run());
    ASSERT_TRUE(top.converged && bottom.converged);
    EXPECT_NEAR(top.value, o.lambda2, 1e-8);
    EXPECT_NEAR(bottom.value, o.lambdaN, 1e-8);
  }
}

TEST(ExtremeEigenvalue, CapHitGivesBoundsOnTheRightSide) {
  SpectralOptions few;
  few.max_iterations = 20;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto g = random_graph(200, 300 + t);
    const auto o = oracle_extremes(dense_spectrum_oracle(g));
    const auto top = extreme_eigenvalue(g, SpectrumEnd::kTop, few);
    const auto bottom = extreme_eigenvalue(g, SpectrumEnd::kBottom, few);
    EXPECT_FALSE(top.converged);
    EXPECT_EQ(top.iterations, 20);
    EXPECT_LE(top.value, o.lambda2 + 1e-12);
    EXPECT_GE(bottom.value, o.lambdaN - 1e-12);
    const auto r = compute_lambda(g, few);
    EXPECT_TRUE(r.lower_bound_only);
    EXPECT_LE(r.lambda, o.lambda + 1e-12);
  }
}

TEST(ComputeLambda, DoubledEightCycleIsFour) {
  const auto r = compute_lambda(doubled_cycle(8), long_run());
  EXPECT_FALSE(r.lower_bound_only);
  EXPECT_NEAR(r.lambda, 4.0, 1e-8);
}

TEST(ComputeLambda, DoubledTriangle) {
  const auto r = compute_lambda(doubled_cycle(3));
  EXPECT_FALSE(r.lower_bound_only);
  EXPECT_NEAR(r.lambda2, -2.0, 1e-9);
  EXPECT_NEAR(r.lambdaN, -2.0, 1e-9);
  EXPECT_NEAR(r.lambda, 2.0, 1e-9);
}

TEST(ComputeLambda, LehmerFiveHundred) {
  const auto g = build_graph(named_source("lehmer", std::nullopt, 500), TiePolicy::jitter(0));
  EXPECT_NEAR(compute_lambda(g).lambda, 3.54, 0.02);
}

TEST(ComputeLambda, ResultInvariants) {
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto r = compute_lambda(random_graph(3 + t * 7, t));
    EXPECT_LE(-4.0, r.lambdaN);
    EXPECT_LE(r.lambdaN, r.lambda2 + 1e-12);
    EXPECT_LE(r.lambda2, 4.0);
    EXPECT_EQ(r.lambda, std::max(std::fabs(r.lambda2), std::fabs(r.lambdaN)));
    if (!r.lower_bound_only) {
      EXPECT_LT(r.residual, SpectralOptions{}.tolerance);
    }
  }
}

TEST(ComputeLambda, DeterministicGivenSeed) {
  const auto g = random_graph(500, 7);
  SpectralOptions o;
  o.rng_seed = 1234;
  const auto a = compute_lambda(g, o);
  const auto b = compute_lambda(g, o);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(ComputeLambda, RotationInvariance) {
  CounterRng rng(5);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 40 + 10 * t;
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform();
    const auto base_graph = build_graph(Sequence(v, "r"), TiePolicy::stable());
    const auto base = compute_lambda(base_graph, long_run());
    const auto base_oracle = oracle_extremes(dense_spectrum_oracle(base_graph)).lambda;
    const std::size_t shift = 1 + rng.next() % (n - 1);
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(shift), v.end());
    const auto rotated_graph = build_graph(Sequence(v, "r"), TiePolicy::stable());
    EXPECT_NEAR(oracle_extremes(dense_spectrum_oracle(rotated_graph)).lambda, base_oracle, 1e-10);
    EXPECT_NEAR(compute_lambda(rotated_graph, long_run()).lambda, base.lambda, 1e-8);
  }
}

TEST(ComputeLambda, SystemRandomNearRamanujanBound) {
  // Large i.i.d. samples concentrate just below 2 sqrt 3.
  int in_band = 0;
  int above_floor = 0;
  constexpr int kTrials = 40;
  for (int t = 0; t < kTrials; ++t) {
    const auto g = build_graph(named_source("system", std::nullopt, 5000));
    const double lambda = compute_lambda(g).lambda;
    in_band += lambda >= 3.43 && lambda <= 3.50;
    above_floor += lambda >= kRamanujanBound - 0.1;
  }
  EXPECT_GE(in_band, kTrials - 1);
  EXPECT_EQ(above_floor, kTrials);
}

TEST(SpectralOptions, Validation) {
  const auto g = random_graph(10, 1);
  SpectralOptions bad;
  bad.tolerance = 0;
  EXPECT_THROW(compute_lambda(g, bad), Error);
  bad = {};
  bad.reproject_every = 0;
  EXPECT_THROW(compute_lambda(g, bad), Error);
  bad = {};
  bad.max_iterations = -1;
  EXPECT_THROW(compute_lambda(g, bad), Error);
}

TEST(SpectralOptions, DefaultCapScalesWithLogN) {
  SpectralOptions o;
  EXPECT_EQ(o.iteration_cap(1000), 1000);
  EXPECT_EQ(o.iteration_cap(1024), 1000);
  EXPECT_EQ(o.iteration_cap(1025), 1100);
  EXPECT_EQ(o.iteration_cap(3), 200);
}

}  // namespace
}  // namespace expander
