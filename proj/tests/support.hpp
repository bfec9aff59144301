#pragma once

// Fixtures and brute-force oracles shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "mmcoord/community.hpp"
#include "mmcoord/graph.hpp"
#include "mmcoord/netbuild.hpp"

namespace testsupport {

using mmcoord::ActorId;
using mmcoord::LayerGraph;
using Edge = std::tuple<std::uint32_t, std::uint32_t, double>;

inline LayerGraph layer_from(const std::vector<Edge>& edges, mmcoord::Action layer = mmcoord::Action::RTW) {
  LayerGraph g;
  g.layer = layer;
  for (const auto& [u, v, w] : edges) g.set_edge(u, v, mmcoord::EdgeAttr{w, 1, 1});
  return g;
}

/// Erdos-Renyi graph on n nodes with edge probability p and weights from
/// {0.25, 0.5, ..., 1} (dyadic, so sums are exact).
inline std::vector<Edge> random_edges(std::mt19937_64& rng, std::uint32_t n, double p) {
  std::bernoulli_distribution keep(p);
  std::uniform_int_distribution<int> quarter(1, 4);
  std::vector<Edge> out;
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      if (keep(rng)) out.emplace_back(u, v, quarter(rng) * 0.25);
    }
  }
  return out;
}

/// Dense Newman-Girvan modularity straight from the definition.
inline double dense_modularity(std::size_t n, const std::vector<Edge>& edges, const std::vector<std::uint32_t>& c,
                               double gamma) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [u, v, w] : edges) {
    a[u][v] += w;
    a[v][u] += w;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (c[i] == c[j]) q += a[i][j] - gamma * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

/// Calls f on every set partition of {0..n-1} as a restricted growth string.
inline void for_each_set_partition(std::size_t n, const std::function<void(const std::vector<std::uint32_t>&)>& f) {
  std::vector<std::uint32_t> rgs(n, 0);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t max_label) {
    if (i == n) {
      f(rgs);
      return;
    }
    for (std::uint32_t c = 0; c <= max_label + 1; ++c) {
      rgs[i] = c;
      rec(i + 1, std::max(max_label, c));
    }
  };
  if (n == 0) {
    f(rgs);
    return;
  }
  rec(1, 0);
}

/// Maximum of dense_modularity over all set partitions, and how many partitions attain it.
inline std::pair<double, std::size_t> brute_force_optimum(std::size_t n, const std::vector<Edge>& edges,
                                                          double gamma) {
  double best = -1e300;
  std::size_t count = 0;
  for_each_set_partition(n, [&](const std::vector<std::uint32_t>& c) {
    const double q = dense_modularity(n, edges, c, gamma);
    if (q > best + 1e-12) {
      best = q;
      count = 1;
    } else if (std::abs(q - best) <= 1e-12) {
      ++count;
    }
  });
  return {best, count};
}

/// Random sorted subset of {0..universe-1}, non-empty.
inline std::vector<ActorId> random_members(std::mt19937_64& rng, std::uint32_t universe) {
  std::bernoulli_distribution keep(0.4);
  std::vector<ActorId> out;
  for (std::uint32_t v = 0; v < universe; ++v) {
    if (keep(rng)) out.push_back(v);
  }
  if (out.empty()) out.push_back(std::uniform_int_distribution<std::uint32_t>(0, universe - 1)(rng));
  return out;
}

/// Random partition of `nodes` into at most k labels, canonicalized.
inline mmcoord::Partition random_partition(std::mt19937_64& rng, const std::vector<ActorId>& nodes, std::uint32_t k) {
  std::uniform_int_distribution<std::uint32_t> pick(0, k - 1);
  std::map<ActorId, mmcoord::CommunityId> raw;
  for (const auto v : nodes) raw[v] = pick(rng);
  mmcoord::Partition p;
  p.assignment = mmcoord::canonicalize(raw);
  return p;
}

}  // namespace testsupport
