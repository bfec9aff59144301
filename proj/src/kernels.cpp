#include "mmcoord/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmcoord::kernels {

void SparseRows::push_row(const std::vector<std::pair<std::uint32_t, double>>& entries) {
  for (const auto& [c, v] : entries) {
    cols.push_back(c);
    vals.push_back(v);
  }
  offsets.push_back(cols.size());
}

namespace {

std::vector<double> row_norms(const SparseRows& m) {
  std::vector<double> norms(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = m.offsets[r]; k < m.offsets[r + 1]; ++k) s += m.vals[k] * m.vals[k];
    norms[r] = std::sqrt(s);
  }
  return norms;
}

double clamp_cosine(double dot, double ni, double nj) { return std::min(1.0, dot / (ni * nj)); }

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace

std::vector<PairSimilarity> pairwise_cosine_serial(const SparseRows& m) {
  const auto norms = row_norms(m);
  std::vector<PairSimilarity> out;
  const auto n = static_cast<std::uint32_t>(m.rows());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      std::size_t a = m.offsets[i];
      std::size_t b = m.offsets[j];
      double dot = 0.0;
      std::uint32_t shared = 0;
      while (a < m.offsets[i + 1] && b < m.offsets[j + 1]) {
        if (m.cols[a] < m.cols[b]) {
          ++a;
        } else if (m.cols[b] < m.cols[a]) {
          ++b;
        } else {
          dot += m.vals[a] * m.vals[b];
          ++shared;
          ++a;
          ++b;
        }
      }
      if (dot > 0.0) out.push_back({i, j, clamp_cosine(dot, norms[i], norms[j]), shared});
    }
  }
  return out;
}

std::vector<PairSimilarity> pairwise_cosine_omp(const SparseRows& m, int threads) {
  const auto norms = row_norms(m);
  const auto n = static_cast<std::uint32_t>(m.rows());

  // Inverted index: column -> (row, value), rows ascending.
  std::uint32_t ncols = 0;
  for (auto c : m.cols) ncols = std::max(ncols, c + 1);
  std::vector<std::size_t> post_off(ncols + 1, 0);
  for (auto c : m.cols) ++post_off[c + 1];
  for (std::uint32_t c = 0; c < ncols; ++c) post_off[c + 1] += post_off[c];
  std::vector<std::uint32_t> post_row(m.cols.size());
  std::vector<double> post_val(m.cols.size());
  {
    std::vector<std::size_t> cur(post_off.begin(), post_off.end() - 1);
    for (std::uint32_t r = 0; r < n; ++r) {
      for (std::size_t k = m.offsets[r]; k < m.offsets[r + 1]; ++k) {
        post_row[cur[m.cols[k]]] = r;
        post_val[cur[m.cols[k]]++] = m.vals[k];
      }
    }
  }

  std::vector<std::vector<PairSimilarity>> per_row(n);
  const int nthreads = resolve_threads(threads);
#pragma omp parallel num_threads(nthreads)
  {
    std::vector<double> dot(n, 0.0);
    std::vector<std::uint32_t> shared(n, 0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
      const auto i = static_cast<std::uint32_t>(ii);
      // Walking i's columns in ascending order reproduces the merge order of
      // the serial kernel for every pair, so the dot products are identical.
      for (std::size_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
        const auto c = m.cols[k];
        const auto first = std::upper_bound(post_row.begin() + static_cast<std::ptrdiff_t>(post_off[c]),
                                            post_row.begin() + static_cast<std::ptrdiff_t>(post_off[c + 1]), i);
        for (auto it = first; it != post_row.begin() + static_cast<std::ptrdiff_t>(post_off[c + 1]); ++it) {
          const auto j = *it;
          if (shared[j] == 0) touched.push_back(j);
          dot[j] += m.vals[k] * post_val[static_cast<std::size_t>(it - post_row.begin())];
          ++shared[j];
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = per_row[i];
      for (auto j : touched) {
        if (dot[j] > 0.0) row.push_back({i, j, clamp_cosine(dot[j], norms[i], norms[j]), shared[j]});
        dot[j] = 0.0;
        shared[j] = 0;
      }
      touched.clear();
    }
  }

  std::vector<PairSimilarity> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return out;
}

namespace {

template <bool Parallel>
IterativeResult pagerank_impl(const WeightedGraph& g, double damping, double tol, std::size_t max_iter,
                              int threads) {
  const std::size_t n = g.num_nodes();
  IterativeResult res;
  if (n == 0) return res;
  std::vector<double> strength(n);
  for (std::size_t u = 0; u < n; ++u) strength[u] = g.strength(u);
  std::vector<double> pr(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  const double teleport = (1.0 - damping) / static_cast<double>(n);
  [[maybe_unused]] const int nthreads = resolve_threads(threads);

  while (res.iterations < max_iter) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (strength[u] == 0.0) dangling += pr[u];
    }
    const double base = teleport + damping * dangling / static_cast<double>(n);
    const auto sn = static_cast<std::int64_t>(n);
    if constexpr (Parallel) {
#pragma omp parallel for num_threads(nthreads) schedule(static)
      for (std::int64_t uu = 0; uu < sn; ++uu) {
        const auto u = static_cast<std::size_t>(uu);
        const auto nb = g.neighbors(u);
        const auto ws = g.weights(u);
        double acc = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) acc += pr[nb[k]] * ws[k] / strength[nb[k]];
        next[u] = base + damping * acc;
      }
    } else {
      for (std::int64_t uu = 0; uu < sn; ++uu) {
        const auto u = static_cast<std::size_t>(uu);
        const auto nb = g.neighbors(u);
        const auto ws = g.weights(u);
        double acc = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) acc += pr[nb[k]] * ws[k] / strength[nb[k]];
        next[u] = base + damping * acc;
      }
    }
    double diff = 0.0;
    for (std::size_t u = 0; u < n; ++u) diff += std::abs(next[u] - pr[u]);
    pr.swap(next);
    ++res.iterations;
    if (diff < tol) {
      res.converged = true;
      break;
    }
  }
  double sum = 0.0;
  for (double v : pr) sum += v;
  for (double& v : pr) v /= sum;
  res.values = std::move(pr);
  return res;
}

template <bool Parallel>
IterativeResult eigenvector_impl(const WeightedGraph& g, const std::vector<std::uint32_t>& nodes, double tol,
                                 std::size_t max_iter, int threads) {
  const std::size_t k = nodes.size();
  IterativeResult res;
  if (k == 0) return res;
  if (k == 1) {
    res.values = {1.0};
    res.converged = true;
    return res;
  }
  // global index -> position in `nodes`
  std::vector<std::int64_t> pos(g.num_nodes(), -1);
  for (std::size_t p = 0; p < k; ++p) pos[nodes[p]] = static_cast<std::int64_t>(p);

  std::vector<double> x(k, 1.0 / std::sqrt(static_cast<double>(k)));
  std::vector<double> ax(k);
  [[maybe_unused]] const int nthreads = resolve_threads(threads);
  const auto sk = static_cast<std::int64_t>(k);

  auto multiply = [&](std::int64_t p) {
    const auto u = nodes[static_cast<std::size_t>(p)];
    const auto nb = g.neighbors(u);
    const auto ws = g.weights(u);
    double acc = 0.0;
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const auto q = pos[nb[e]];
      if (q >= 0) acc += ws[e] * x[static_cast<std::size_t>(q)];
    }
    ax[static_cast<std::size_t>(p)] = acc;
  };

  while (true) {
    if constexpr (Parallel) {
#pragma omp parallel for num_threads(nthreads) schedule(static)
      for (std::int64_t p = 0; p < sk; ++p) multiply(p);
    } else {
      for (std::int64_t p = 0; p < sk; ++p) multiply(p);
    }
    double lambda = 0.0;
    for (std::size_t p = 0; p < k; ++p) lambda += x[p] * ax[p];
    double resid = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double r = ax[p] - lambda * x[p];
      resid += r * r;
    }
    res.eigenvalue = lambda;
    if (lambda > 0.0 && std::sqrt(resid) / lambda < tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    // shifted step: y = (A + I) x
    double norm = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      ax[p] += x[p];
      norm += ax[p] * ax[p];
    }
    norm = std::sqrt(norm);
    for (std::size_t p = 0; p < k; ++p) x[p] = ax[p] / norm;
    ++res.iterations;
  }
  res.values = std::move(x);
  return res;
}

}  // namespace

IterativeResult pagerank_serial(const WeightedGraph& g, double damping, double tol, std::size_t max_iter) {
  return pagerank_impl<false>(g, damping, tol, max_iter, 1);
}

IterativeResult pagerank_omp(const WeightedGraph& g, double damping, double tol, std::size_t max_iter, int threads) {
  return pagerank_impl<true>(g, damping, tol, max_iter, threads);
}

IterativeResult eigenvector_serial(const WeightedGraph& g, const std::vector<std::uint32_t>& nodes, double tol,
                                   std::size_t max_iter) {
  return eigenvector_impl<false>(g, nodes, tol, max_iter, 1);
}

IterativeResult eigenvector_omp(const WeightedGraph& g, const std::vector<std::uint32_t>& nodes, double tol,
                                std::size_t max_iter, int threads) {
  return eigenvector_impl<true>(g, nodes, tol, max_iter, threads);
}

}  // namespace mmcoord::kernels
