#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "expander/error.hpp"
#include "expander/rng.hpp"
#include "expander/sequence.hpp"

namespace expander {

using Vertex = std::uint32_t;

/// How equal sample values are ordered when building the rank permutation.
struct TiePolicy {
  enum class Kind { kJitter, kStable };

  Kind kind = Kind::kJitter;
  std::uint64_t seed = 0;

  static constexpr TiePolicy jitter(std::uint64_t seed = 0) { return {Kind::kJitter, seed}; }
  static constexpr TiePolicy stable() { return {Kind::kStable, 0}; }

  std::string_view name() const { return kind == Kind::kJitter ? "jitter" : "stable"; }
  friend bool operator==(const TiePolicy&, const TiePolicy&) = default;
};

inline TiePolicy parse_tie_policy(std::string_view token, std::uint64_t seed = 0) {
  if (token == "jitter") return TiePolicy::jitter(seed);
  if (token == "stable") return TiePolicy::stable();
  throw Error("unknown tie policy '" + std::string(token) + "'");
}

/// order[k] is the (0-based) position of the k-th smallest value.
struct RankPermutation {
  std::vector<Vertex> order;
  TiePolicy policy;

  std::size_t size() const noexcept { return order.size(); }
};

/// Sorts positions by value. Equal values are ordered by position under the
/// stable policy, or by a seeded per-position random key under jitter, which
/// is a uniform shuffle within every block of ties.
inline RankPermutation rank_permutation(const Sequence& seq, TiePolicy policy = TiePolicy::jitter()) {
  seq.require_graphable();
  const auto& x = seq.values();
  const std::size_t n = x.size();
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});

  if (policy.kind == TiePolicy::Kind::kStable) {
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return x[a] < x[b]; });
  } else {
    std::vector<std::uint64_t> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = mix64(mix64(policy.seed) ^ (i * CounterRng::kGolden));
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
      return std::tie(x[a], key[a], a) < std::tie(x[b], key[b], b);
    });
  }
  return {std::move(order), policy};
}

/// The 4-regular order/index multigraph in CSR form. Parallel edges are
/// stored once with an integer multiplicity.
class RegularMultigraph {
 public:
  static constexpr int kDegree = 4;

  struct Edge {
    Vertex u, v;
    int multiplicity;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  RegularMultigraph() = default;

  /// Union of the cycle 0-1-...-(n-1)-0 and the cycle through `order`.
  static RegularMultigraph from_cycles(const std::vector<Vertex>& order) {
    const std::size_t n = order.size();
    if (n < kMinSequenceLength) throw Error("graph needs at least 3 vertices");

    // Exactly four incidences per vertex before merging.
    std::vector<std::array<Vertex, 4>> inc(n);
    std::vector<int> fill(n, 0);
    const auto add = [&](Vertex a, Vertex b) {
      inc[a][fill[a]++] = b;
      inc[b][fill[b]++] = a;
    };
    for (std::size_t i = 0; i < n; ++i) add(static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n));
    for (std::size_t k = 0; k < n; ++k) add(order[k], order[(k + 1) % n]);

    RegularMultigraph g;
    g.offsets_.reserve(n + 1);
    g.offsets_.push_back(0);
    for (std::size_t v = 0; v < n; ++v) {
      auto& nb = inc[v];
      std::sort(nb.begin(), nb.end());
      for (int j = 0; j < 4; ++j) {
        if (j > 0 && nb[j] == nb[j - 1]) {
          ++g.mult_.back();
        } else {
          g.neighbors_.push_back(nb[j]);
          g.mult_.push_back(1);
        }
      }
      g.offsets_.push_back(static_cast<std::uint32_t>(g.neighbors_.size()));
    }
    return g;
  }

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  /// Distinct neighbors of v and their multiplicities, as parallel ranges.
  std::span<const Vertex> neighbors(Vertex v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::span<const int> multiplicities(Vertex v) const {
    return {mult_.data() + offsets_[v], mult_.data() + offsets_[v + 1]};
  }

  int multiplicity(Vertex u, Vertex v) const {
    const auto nb = neighbors(u);
    const auto mu = multiplicities(u);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (nb[j] == v) return mu[j];
    }
    return 0;
  }

  int weighted_degree(Vertex v) const {
    const auto mu = multiplicities(v);
    return std::accumulate(mu.begin(), mu.end(), 0);
  }

  /// Undirected edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < size(); ++u) {
      const auto nb = neighbors(u);
      const auto mu = multiplicities(u);
      for (std::size_t j = 0; j < nb.size(); ++j) {
        if (u < nb[j]) out.push_back({u, nb[j], mu[j]});
      }
    }
    return out;
  }

  std::span<const std::uint32_t> row_offsets() const noexcept { return offsets_; }
  std::span<const Vertex> column_indices() const noexcept { return neighbors_; }
  std::span<const int> values() const noexcept { return mult_; }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<Vertex> neighbors_;
  std::vector<int> mult_;
};

inline RegularMultigraph build_graph(const RankPermutation& pi) {
  return RegularMultigraph::from_cycles(pi.order);
}

inline RegularMultigraph build_graph(const Sequence& seq, TiePolicy policy = TiePolicy::jitter()) {
  return build_graph(rank_permutation(seq, policy));
}

enum class GraphFormat { kEdgeList, kDot };

inline GraphFormat parse_graph_format(std::string_view token) {
  if (token == "edge-list") return GraphFormat::kEdgeList;
  if (token == "dot") return GraphFormat::kDot;
  throw Error("unknown graph format '" + std::string(token) + "'");
}

/// Text rendering with 1-based vertex labels. The edge list has one
/// "u v multiplicity" line per distinct edge; dot repeats parallel edges.
inline std::string export_graph(const RegularMultigraph& g, GraphFormat format) {
  std::ostringstream out;
  const auto edges = g.edges();
  switch (format) {
    case GraphFormat::kEdgeList:
      for (const auto& e : edges) out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.multiplicity << '\n';
      break;
    case GraphFormat::kDot:
      out << "graph G {\n";
      for (Vertex v = 0; v < g.size(); ++v) out << "  " << v + 1 << ";\n";
      for (const auto& e : edges) {
        for (int k = 0; k < e.multiplicity; ++k) out << "  " << e.u + 1 << " -- " << e.v + 1 << ";\n";
      }
      out << "}\n";
      break;
  }
  return out.str();
}

inline std::string export_graph(const RegularMultigraph& g, std::string_view format) {
  return export_graph(g, parse_graph_format(format));
}

}  // namespace expander
