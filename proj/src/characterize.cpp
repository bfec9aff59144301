#include "mmcoord/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "mmcoord/kernels.hpp"

namespace mmcoord {

std::array<double, kNumCommunityMetrics> CommunityMetrics::vector() const {
  return {static_cast<double>(size), density, avg_degree, avg_weight, avg_clustering, conductance.value_or(0.0),
          assortativity};
}

double local_clustering(const WeightedGraph& g, std::size_t i) {
  const auto nb = g.neighbors(i);
  const std::size_t d = nb.size();
  if (d < 2) return 0.0;
  std::size_t closed = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      if (g.has_edge(nb[a], nb[b])) ++closed;
    }
  }
  return static_cast<double>(closed) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
}

CommunityMetrics community_metrics(const WeightedGraph& g, const std::vector<ActorId>& members) {
  if (members.empty()) throw DataError("empty community");
  std::vector<std::uint32_t> local;
  local.reserve(members.size());
  for (const auto a : members) {
    const auto idx = g.local_index(a);
    if (!idx) throw DataError("community member is not a node of the graph");
    local.push_back(static_cast<std::uint32_t>(*idx));
  }
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end()), local.end());

  // Induced subgraph over positions 0..s-1.
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> inner;
  std::size_t cut = 0;
  std::size_t vol_s = 0;
  std::size_t vol_total = 0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) vol_total += g.degree(i);
  for (std::uint32_t p = 0; p < local.size(); ++p) {
    const auto u = local[p];
    vol_s += g.degree(u);
    const auto nb = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const auto it = std::lower_bound(local.begin(), local.end(), nb[e]);
      if (it != local.end() && *it == nb[e]) {
        if (nb[e] > u) inner.emplace_back(p, static_cast<std::uint32_t>(it - local.begin()), ws[e]);
      } else {
        ++cut;
      }
    }
  }
  const auto sub = WeightedGraph::from_edges(local.size(), inner);

  CommunityMetrics m;
  m.size = local.size();
  const double s = static_cast<double>(m.size);
  const double e_in = static_cast<double>(inner.size());
  m.density = m.size >= 2 ? 2.0 * e_in / (s * (s - 1.0)) : 0.0;
  m.avg_degree = 2.0 * e_in / s;
  double wsum = 0.0;
  for (const auto& [u, v, w] : inner) wsum += w;
  m.avg_weight = inner.empty() ? 0.0 : wsum / e_in;
  double csum = 0.0;
  for (std::size_t i = 0; i < sub.num_nodes(); ++i) csum += local_clustering(sub, i);
  m.avg_clustering = csum / s;

  const std::size_t vol_rest = vol_total - vol_s;
  const std::size_t denom = std::min(vol_s, vol_rest);
  if (m.size < g.num_nodes() && denom > 0) m.conductance = static_cast<double>(cut) / static_cast<double>(denom);

  // Newman degree assortativity over the induced edges.
  if (!inner.empty()) {
    double sum_jk = 0.0, sum_half = 0.0, sum_sq = 0.0;
    for (const auto& [u, v, w] : inner) {
      const double j = static_cast<double>(sub.degree(u));
      const double k = static_cast<double>(sub.degree(v));
      sum_jk += j * k;
      sum_half += 0.5 * (j + k);
      sum_sq += 0.5 * (j * j + k * k);
    }
    const double mean_half = sum_half / e_in;
    const double num = sum_jk / e_in - mean_half * mean_half;
    const double den = sum_sq / e_in - mean_half * mean_half;
    if (den > 1e-12) {
      m.assortativity = std::clamp(num / den, -1.0, 1.0);
      m.assortativity_defined = true;
    }
  }
  return m;
}

NodeMetricsReport node_metrics(const WeightedGraph& g, double damping, KernelMode mode, int threads) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw DataError("node metrics on an empty graph");
  if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping must be in (0, 1)");
  NodeMetricsReport rep;
  rep.nodes.resize(n);

  const bool parallel = mode == KernelMode::Parallel;
  const auto pr = parallel ? kernels::pagerank_omp(g, damping, 1e-12, 10000, threads)
                           : kernels::pagerank_serial(g, damping, 1e-12);

  const auto comps = connected_components(g);
  std::size_t dominant = 0;
  for (std::size_t c = 1; c < comps.size(); ++c) {
    if (comps[c].size() > comps[dominant].size()) dominant = c;
  }
  rep.eigenvector_partial = comps.size() > 1;
  const auto ev = parallel ? kernels::eigenvector_omp(g, comps[dominant], 1e-10, 100000, threads)
                           : kernels::eigenvector_serial(g, comps[dominant], 1e-10);
  rep.eigenvalue = ev.eigenvalue;
  rep.converged = pr.converged && ev.converged;

  for (std::size_t i = 0; i < n; ++i) {
    auto& nm = rep.nodes[i];
    nm.degree_centrality = n > 1 ? static_cast<double>(g.degree(i)) / static_cast<double>(n - 1) : 0.0;
    nm.local_clustering = local_clustering(g, i);
    nm.pagerank = pr.values[i];
  }
  for (std::size_t p = 0; p < comps[dominant].size(); ++p) {
    rep.nodes[comps[dominant][p]].eigenvector_centrality = ev.values[p];
  }
  return rep;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DataError("cosine of a zero vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double metric_cosine(const CommunityMetrics& a, const CommunityMetrics& b) {
  const auto va = a.vector();
  const auto vb = b.vector();
  return cosine(va, vb);
}

PcaResult pca_project(const std::vector<std::array<double, kNumCommunityMetrics>>& vectors) {
  const std::size_t n = vectors.size();
  if (n < 3) throw DataError("PCA needs at least 3 vectors");
  PcaResult res;
  std::vector<double> mean(kNumCommunityMetrics, 0.0), sd(kNumCommunityMetrics, 0.0);
  for (std::size_t f = 0; f < kNumCommunityMetrics; ++f) {
    for (const auto& v : vectors) mean[f] += v[f];
    mean[f] /= static_cast<double>(n);
    for (const auto& v : vectors) sd[f] += (v[f] - mean[f]) * (v[f] - mean[f]);
    sd[f] = std::sqrt(sd[f] / static_cast<double>(n - 1));
    const double scale = std::max(1.0, std::abs(mean[f]));
    if (sd[f] > 1e-12 * scale) {
      res.kept_features.push_back(f);
    } else {
      res.warnings.push_back("dropped zero-variance feature " + std::string(kCommunityMetricNames[f]));
    }
  }
  const std::size_t p = res.kept_features.size();
  if (p == 0) throw DataError("PCA: every feature has zero variance");

  Eigen::MatrixXd z(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      const auto f = res.kept_features[c];
      z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (vectors[r][f] - mean[f]) / sd[f];
    }
  }
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd evals = solver.eigenvalues().reverse();
  Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();

  const double trace = cov.trace();
  for (Eigen::Index k = 0; k < evals.size(); ++k) res.explained_ratio.push_back(std::max(0.0, evals(k)) / trace);

  const Eigen::Index dims = std::min<Eigen::Index>(2, static_cast<Eigen::Index>(p));
  for (Eigen::Index k = 0; k < dims; ++k) {
    Eigen::Index arg = 0;
    for (Eigen::Index f = 1; f < evecs.rows(); ++f) {
      if (std::abs(evecs(f, k)) > std::abs(evecs(arg, k)) + 1e-12) arg = f;
    }
    if (evecs(arg, k) < 0.0) evecs.col(k) *= -1.0;
  }
  const Eigen::MatrixXd proj = z * evecs.leftCols(dims);
  res.coords.resize(n, {0.0, 0.0});
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < dims; ++k) res.coords[r][static_cast<std::size_t>(k)] = proj(static_cast<Eigen::Index>(r), k);
  }
  return res;
}

std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

TestResult brunner_munzel(std::span<const double> x, std::span<const double> y) {
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  if (nx < 2 || ny < 2) throw DataError("Brunner-Munzel needs at least two observations per sample");
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("Brunner-Munzel on non-finite data");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("Brunner-Munzel on non-finite data");
  }

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto rc = midranks(pooled);
  const auto rx = midranks(x);
  const auto ry = midranks(y);

  const double fx = static_cast<double>(nx);
  const double fy = static_cast<double>(ny);
  auto mean = [](auto first, auto last) { return std::accumulate(first, last, 0.0) / static_cast<double>(last - first); };
  const double rcx_mean = mean(rc.begin(), rc.begin() + static_cast<std::ptrdiff_t>(nx));
  const double rcy_mean = mean(rc.begin() + static_cast<std::ptrdiff_t>(nx), rc.end());
  const double rx_mean = mean(rx.begin(), rx.end());
  const double ry_mean = mean(ry.begin(), ry.end());

  double sx = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double d = rc[i] - rx[i] - rcx_mean + rx_mean;
    sx += d * d;
  }
  sx /= fx - 1.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < ny; ++i) {
    const double d = rc[nx + i] - ry[i] - rcy_mean + ry_mean;
    sy += d * d;
  }
  sy /= fy - 1.0;

  const double var = fx * sx + fy * sy;
  if (!(var > 0.0)) throw DataError("Brunner-Munzel variance estimate is zero (complete separation or all ties)");

  TestResult t;
  t.n_x = nx;
  t.n_y = ny;
  t.statistic = fx * fy * (rcy_mean - rcx_mean) / ((fx + fy) * std::sqrt(var));
  t.df = var * var / ((fx * sx) * (fx * sx) / (fx - 1.0) + (fy * sy) * (fy * sy) / (fy - 1.0));
  const boost::math::students_t dist(t.df);
  const double lower = boost::math::cdf(dist, -std::abs(t.statistic));
  t.p_value = std::min(1.0, 2.0 * lower);
  return t;
}

std::string_view significance_band(double p) {
  if (p <= 0.001) return "***";
  if (p <= 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

}  // namespace mmcoord
