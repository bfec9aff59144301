#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference that
// the tests compare against bit-for-bit; the OpenMP variants keep the same
// per-element accumulation order so results do not depend on thread count.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mmcoord/graph.hpp"

namespace mmcoord::kernels {

/// Row-compressed sparse matrix; column indices strictly increasing per row.
/// Zero values are allowed and count toward shared-column totals.
struct SparseRows {
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;

  std::size_t rows() const { return offsets.size() - 1; }
  void push_row(const std::vector<std::pair<std::uint32_t, double>>& entries);
};

struct PairSimilarity {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double cosine = 0.0;  // in (0, 1]
  std::uint32_t shared = 0;

  friend bool operator==(const PairSimilarity&, const PairSimilarity&) = default;
};

/// All row pairs with a strictly positive dot product, sorted by (i, j).
std::vector<PairSimilarity> pairwise_cosine_serial(const SparseRows& m);
std::vector<PairSimilarity> pairwise_cosine_omp(const SparseRows& m, int threads = 0);

struct IterativeResult {
  std::vector<double> values;
  std::size_t iterations = 0;
  bool converged = false;
  double eigenvalue = 0.0;  // eigenvector kernels only
};

/// Weighted PageRank with uniform teleport; dangling mass is spread uniformly.
/// Stops when the L1 change drops below `tol`.
IterativeResult pagerank_serial(const WeightedGraph& g, double damping, double tol, std::size_t max_iter = 10000);
IterativeResult pagerank_omp(const WeightedGraph& g, double damping, double tol, std::size_t max_iter = 10000,
                             int threads = 0);

/// Dominant eigenvector of the weighted adjacency restricted to `nodes` (one
/// connected component), via power iteration on A + I. Unit Euclidean norm,
/// non-negative. Stops when ||A c - lambda c|| / lambda < `tol`.
IterativeResult eigenvector_serial(const WeightedGraph& g, const std::vector<std::uint32_t>& nodes, double tol,
                                   std::size_t max_iter = 100000);
IterativeResult eigenvector_omp(const WeightedGraph& g, const std::vector<std::uint32_t>& nodes, double tol,
                                std::size_t max_iter = 100000, int threads = 0);

}  // namespace mmcoord::kernels
