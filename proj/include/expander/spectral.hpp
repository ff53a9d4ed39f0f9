#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "expander/error.hpp"
#include "expander/graph.hpp"
#include "expander/rng.hpp"

namespace expander {

/// The Ramanujan threshold 2*sqrt(d - 1) for d = 4.
inline const double kRamanujanBound = 2.0 * std::sqrt(3.0);

struct SpectralOptions {
  /// Stop once the Rayleigh quotient moves less than this between sweeps.
  double tolerance = 1e-9;
  /// Iteration cap per end; 0 selects 100 * ceil(log2 n).
  int max_iterations = 0;
  /// Sweep length: exact mean removal and the convergence test run this often.
  int reproject_every = 50;
  std::uint64_t rng_seed = 0;

  int iteration_cap(std::size_t n) const {
    if (max_iterations > 0) return max_iterations;
    const int log2n = static_cast<int>(std::bit_width(n > 1 ? n - 1 : std::size_t{1}));
    return 100 * std::max(log2n, 1);
  }

  void validate() const {
    if (!(tolerance > 0.0)) throw Error("solver tolerance must be positive");
    if (max_iterations < 0) throw Error("iteration cap must be at least 1");
    if (reproject_every < 1) throw Error("re-projection interval must be at least 1");
  }
};

/// y = A x with multiplicities. `y` must not alias `x`.
inline void spmv(const RegularMultigraph& g, std::span<const double> x, std::span<double> y) {
  const std::size_t n = g.size();
  if (x.size() != n || y.size() != n) throw Error("spmv: vector length does not match vertex count");
  const auto off = g.row_offsets();
  const auto col = g.column_indices();
  const auto val = g.values();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (auto j = off[i]; j < off[i + 1]; ++j) acc += val[j] * x[col[j]];
    y[i] = acc;
  }
}

inline std::vector<double> spmv(const RegularMultigraph& g, std::span<const double> x) {
  std::vector<double> y(g.size());
  spmv(g, x, y);
  return y;
}

/// Projects onto the orthogonal complement of the constant vector.
inline void remove_mean(std::span<double> x) {
  if (x.empty()) return;
  // Two passes: the second removes the rounding left by the first.
  for (int pass = 0; pass < 2; ++pass) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (auto& v : x) v -= mean;
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

enum class SpectrumEnd { kTop, kBottom };

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  /// Change of the Rayleigh quotient over the last sweep.
  double residual = std::numeric_limits<double>::infinity();
  /// ||B x - theta x|| for the final unit iterate.
  double residual_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Power iteration on B = A + 4I (top) or B = 4I - A (bottom), restricted
/// to mean-zero vectors. Both shifts are positive semidefinite, so the
/// dominant eigenvalue of B on that subspace is lambda_2 + 4 or 4 - lambda_n.
/// An unconverged result is a Rayleigh quotient: a lower bound on lambda_2
/// (top) or an upper bound on lambda_n (bottom).
inline EigenEstimate extreme_eigenvalue(const RegularMultigraph& g, SpectrumEnd end,
                                        const SpectralOptions& opts = {}) {
  opts.validate();
  const std::size_t n = g.size();
  if (n < kMinSequenceLength) throw Error("graph needs at least 3 vertices");
  const double sign = end == SpectrumEnd::kTop ? 1.0 : -1.0;
  const double shift = RegularMultigraph::kDegree;

  CounterRng rng(opts.rng_seed, end == SpectrumEnd::kTop ? 1 : 2);
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
  remove_mean(x);
  double norm = std::sqrt(dot(x, x));
  for (auto& v : x) v /= norm;

  const auto off = g.row_offsets();
  const auto col = g.column_indices();
  const auto val = g.values();
  struct Applied {
    double xy, sum, sum_sq;
  };
  // y = B x, with <x, y>, sum(y) and |y|^2 accumulated on the way.
  const auto apply = [&](std::span<const double> in, std::span<double> out) {
    Applied a{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (auto j = off[i]; j < off[i + 1]; ++j) acc += val[j] * in[col[j]];
      const double v = shift * in[i] + sign * acc;
      out[i] = v;
      a.xy += in[i] * v;
      a.sum += v;
      a.sum_sq += v * v;
    }
    return a;
  };

  EigenEstimate est;
  const int cap = opts.iteration_cap(n);
  double theta = 0.0;
  double sweep_theta = std::numeric_limits<double>::quiet_NaN();
  double prev_change = std::numeric_limits<double>::quiet_NaN();
  int k = 0;
  while (k < cap) {
    const Applied a = apply(x, y);
    theta = a.xy;
    ++k;
    const bool sweep_end = k % opts.reproject_every == 0;
    // Rounding leaks into the constant direction, which B amplifies by up to
    // 8/theta per step. One-pass mean removal every step, exact at sweep ends.
    double mean = 0.0;
    if (sweep_end) {
      remove_mean(y);
      norm = std::sqrt(dot(y, y));
    } else {
      mean = a.sum / static_cast<double>(n);
      norm = std::sqrt(std::max(a.sum_sq - static_cast<double>(n) * mean * mean, 0.0));
    }
    if (!(norm > 0.0)) {
      // x lies in the kernel of B; theta = 0 is exact.
      est.converged = true;
      est.residual = 0.0;
      break;
    }
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < n; ++i) x[i] = (y[i] - mean) * inv;
    if (sweep_end) {
      const double change = std::fabs(theta - sweep_theta);
      sweep_theta = theta;
      est.residual = change;
      // The quotient approaches its limit geometrically; the remaining
      // distance is about change * rho / (1 - rho) with rho the per-sweep
      // contraction, estimated from consecutive changes.
      const double rho = std::min(change / prev_change, 0.999);
      prev_change = change;
      if (change < opts.tolerance && (change == 0.0 || change * rho / (1.0 - rho) < opts.tolerance)) {
        est.converged = true;
        break;
      }
    }
  }

  // Final quotient and residual on the last unit iterate.
  const double final_theta = apply(x, y).xy;
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) r2 += (y[i] - final_theta * x[i]) * (y[i] - final_theta * x[i]);
  if (final_theta >= theta) theta = final_theta;
  est.residual_norm = std::sqrt(r2);
  est.iterations = k;
  est.value = sign * (theta - shift);
  return est;
}

struct SpectralResult {
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double residual_norm = 0.0;
  bool lower_bound_only = false;
};

/// lambda = max(|lambda_2|, |lambda_n|) of the adjacency matrix.
inline SpectralResult compute_lambda(const RegularMultigraph& g, const SpectralOptions& opts = {}) {
  const auto top = extreme_eigenvalue(g, SpectrumEnd::kTop, opts);
  const auto bottom = extreme_eigenvalue(g, SpectrumEnd::kBottom, opts);
  SpectralResult r;
  r.lambda2 = top.value;
  r.lambdaN = bottom.value;
  r.lambda = std::max(std::fabs(r.lambda2), std::fabs(r.lambdaN));
  r.iterations = top.iterations + bottom.iterations;
  r.residual = std::max(top.residual, bottom.residual);
  r.residual_norm = std::max(top.residual_norm, bottom.residual_norm);
  r.lower_bound_only = !(top.converged && bottom.converged);
  return r;
}

}  // namespace expander
