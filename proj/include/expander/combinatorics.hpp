#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "expander/error.hpp"
#include "expander/graph.hpp"
#include "expander/spectral.hpp"

namespace expander {

inline constexpr std::size_t kCheegerMaxVertices = 16;

/// Exact expansion ratio min |dS|/|S| over nonempty S with |S| <= n/2,
/// boundary edges weighted by multiplicity. Exhaustive, so n <= 16.
inline double cheeger_bruteforce(const RegularMultigraph& g) {
  const std::size_t n = g.size();
  if (n < kMinSequenceLength) throw Error("graph needs at least 3 vertices");
  if (n > kCheegerMaxVertices) throw Error("exhaustive expansion ratio limited to 16 vertices");

  const auto edges = g.edges();
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    const int size = std::popcount(mask);
    if (static_cast<std::size_t>(2 * size) > n) continue;
    int boundary = 0;
    for (const auto& e : edges) {
      if (((mask >> e.u) & 1U) != ((mask >> e.v) & 1U)) boundary += e.multiplicity;
    }
    best = std::min(best, static_cast<double>(boundary) / size);
  }
  return best;
}

struct MixingBound {
  /// | e(S,T) - (d/n)|S||T| |
  double discrepancy;
  /// lambda * sqrt(|S||T|)
  double bound;
  /// e(S,T): ordered pairs (u in S, v in T) weighted by multiplicity.
  double edge_count;
};

/// Both sides of the expander mixing inequality for vertex sets S and T
/// (0-based, duplicates ignored) and a given lambda.
inline MixingBound mixing_discrepancy(const RegularMultigraph& g, const std::vector<Vertex>& s,
                                      const std::vector<Vertex>& t, double lambda) {
  const std::size_t n = g.size();
  if (s.empty() || t.empty()) throw Error("mixing sets must be nonempty");
  std::vector<char> in_s(n, 0), in_t(n, 0);
  for (auto v : s) {
    if (v >= n) throw Error("vertex out of range");
    in_s[v] = 1;
  }
  for (auto v : t) {
    if (v >= n) throw Error("vertex out of range");
    in_t[v] = 1;
  }
  double size_s = 0, size_t_ = 0;
  for (std::size_t v = 0; v < n; ++v) {
    size_s += in_s[v];
    size_t_ += in_t[v];
  }

  double e = 0.0;
  for (Vertex u = 0; u < n; ++u) {
    if (!in_s[u]) continue;
    const auto nb = g.neighbors(u);
    const auto mu = g.multiplicities(u);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (in_t[nb[j]]) e += mu[j];
    }
  }
  const double expected = RegularMultigraph::kDegree * size_s * size_t_ / static_cast<double>(n);
  return {std::fabs(e - expected), lambda * std::sqrt(size_s * size_t_), e};
}

/// As above with lambda taken from the sparse solver.
inline MixingBound mixing_discrepancy(const RegularMultigraph& g, const std::vector<Vertex>& s,
                                      const std::vector<Vertex>& t, const SpectralOptions& opts = {}) {
  return mixing_discrepancy(g, s, t, compute_lambda(g, opts).lambda);
}

}  // namespace expander
