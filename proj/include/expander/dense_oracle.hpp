#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "expander/error.hpp"
#include "expander/graph.hpp"

// Dense symmetric eigensolver used to cross-check the sparse iteration on
// small graphs.

namespace expander {

inline constexpr std::size_t kDenseOracleMaxVertices = 1024;

/// Row-major square matrix.
class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline DenseMatrix adjacency_matrix(const RegularMultigraph& g) {
  DenseMatrix a(g.size());
  for (Vertex u = 0; u < g.size(); ++u) {
    const auto nb = g.neighbors(u);
    const auto mu = g.multiplicities(u);
    for (std::size_t j = 0; j < nb.size(); ++j) a(u, nb[j]) = mu[j];
  }
  return a;
}

struct EigenDecomposition {
  /// Ascending.
  std::vector<double> values;
  /// vectors(i, k) is component i of the eigenvector for values[k].
  DenseMatrix vectors{0};
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline EigenDecomposition jacobi_eigen(DenseMatrix a, bool want_vectors = true, int max_sweeps = 100) {
  const std::size_t n = a.size();
  DenseMatrix v(want_vectors ? n : 0);
  for (std::size_t i = 0; i < v.size(); ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale += a(i, j) * a(i, j);
  scale = std::sqrt(scale);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // tan of the rotation angle, smaller root for stability.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;

        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.reserve(n);
  for (auto i : idx) out.values.push_back(a(i, i));
  if (want_vectors) {
    out.vectors = DenseMatrix(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, idx[k]);
  }
  return out;
}

/// Full adjacency spectrum, ascending.
inline std::vector<double> dense_spectrum_oracle(const RegularMultigraph& g) {
  if (g.size() > kDenseOracleMaxVertices) throw Error("dense oracle limited to 1024 vertices");
  return jacobi_eigen(adjacency_matrix(g), false).values;
}

/// lambda_2 (second largest, signed), lambda_n and their max modulus.
struct OracleExtremes {
  double lambda2;
  double lambdaN;
  double lambda;
};

inline OracleExtremes oracle_extremes(const std::vector<double>& ascending) {
  const std::size_t n = ascending.size();
  if (n < 2) throw Error("spectrum too short");
  const double l2 = ascending[n - 2];
  const double ln = ascending[0];
  return {l2, ln, std::max(std::fabs(l2), std::fabs(ln))};
}

}  // namespace expander
