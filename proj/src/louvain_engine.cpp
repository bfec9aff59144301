#include "louvain_engine.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mmcoord::detail {

double problem_modularity(const ModularityProblem& p, const std::vector<std::uint32_t>& membership) {
  if (p.two_mu <= 0.0) return 0.0;
  const std::size_t L = p.n_layers;
  std::uint32_t k = 0;
  for (auto c : membership) k = std::max(k, c + 1);
  std::vector<double> tot(static_cast<std::size_t>(k) * L, 0.0);
  double in = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto ci = membership[i];
    in += p.self_loop[i];
    for (const auto& [j, w] : p.adj[i]) {
      if (membership[j] == ci) in += w;
    }
    for (std::size_t s = 0; s < L; ++s) tot[ci * L + s] += p.strength[i * L + s];
  }
  double null = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t s = 0; s < L; ++s) {
      if (p.two_m[s] > 0.0) null += tot[c * L + s] * tot[c * L + s] / p.two_m[s];
    }
  }
  return (in - p.gamma * null) / p.two_mu;
}

namespace {

// Fisher-Yates with a plain modulo draw; std::shuffle's output is
// implementation-defined and would make runs differ across standard libraries.
void seeded_shuffle(std::vector<std::uint32_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

struct MoveResult {
  std::vector<std::uint32_t> membership;
  bool moved = false;
};

MoveResult local_moving(const ModularityProblem& p, std::mt19937_64& rng, double tolerance) {
  const std::size_t n = p.n;
  const std::size_t L = p.n_layers;
  MoveResult res;
  res.membership.resize(n);
  std::iota(res.membership.begin(), res.membership.end(), 0u);
  auto& memb = res.membership;

  std::vector<double> tot(p.strength);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::uint32_t> free_ids;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  seeded_shuffle(order, rng);

  std::vector<double> neigh_w(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> neigh;

  auto penalty = [&](std::size_t i, std::size_t c) {
    double pen = 0.0;
    for (std::size_t s = 0; s < L; ++s) {
      if (p.two_m[s] > 0.0) pen += p.strength[i * L + s] * tot[c * L + s] / p.two_m[s];
    }
    return p.gamma * pen;
  };

  while (true) {
    double sweep_gain = 0.0;
    std::size_t moves = 0;
    for (const auto i : order) {
      const auto c_old = memb[i];
      for (const auto& [j, w] : p.adj[i]) {
        const auto c = memb[j];
        if (!seen[c]) {
          seen[c] = 1;
          neigh.push_back(c);
        }
        neigh_w[c] += w;
      }
      for (std::size_t s = 0; s < L; ++s) tot[c_old * L + s] -= p.strength[i * L + s];
      --size[c_old];

      const double gain_old = neigh_w[c_old] - penalty(i, c_old);
      auto best = c_old;
      double best_gain = gain_old;
      for (const auto c : neigh) {
        if (c == c_old) continue;
        const double g = neigh_w[c] - penalty(i, c);
        if (g > best_gain) {
          best = c;
          best_gain = g;
        }
      }
      bool to_empty = false;
      if (size[c_old] > 0 && best_gain < 0.0 && !free_ids.empty()) {
        best = free_ids.back();
        best_gain = 0.0;
        to_empty = true;
      }

      const double delta_q = 2.0 * (best_gain - gain_old) / p.two_mu;
      if (best != c_old && delta_q > 1e-15) {
        if (to_empty) free_ids.pop_back();
        memb[i] = best;
        sweep_gain += delta_q;
        ++moves;
        if (size[c_old] == 0) free_ids.push_back(c_old);
      }
      const auto c_new = memb[i];
      for (std::size_t s = 0; s < L; ++s) tot[c_new * L + s] += p.strength[i * L + s];
      ++size[c_new];

      for (const auto c : neigh) {
        neigh_w[c] = 0.0;
        seen[c] = 0;
      }
      neigh.clear();
    }
    if (moves > 0) res.moved = true;
    if (moves == 0 || sweep_gain < tolerance) break;
  }
  return res;
}

// Dense relabel in order of first appearance; returns the community count.
std::uint32_t renumber(std::vector<std::uint32_t>& membership) {
  std::vector<std::int64_t> map(membership.size(), -1);
  std::uint32_t next = 0;
  for (auto& c : membership) {
    if (map[c] < 0) map[c] = next++;
    c = static_cast<std::uint32_t>(map[c]);
  }
  return next;
}

ModularityProblem aggregate(const ModularityProblem& p, const std::vector<std::uint32_t>& membership,
                            std::uint32_t k) {
  ModularityProblem out;
  out.n = k;
  out.n_layers = p.n_layers;
  out.two_m = p.two_m;
  out.two_mu = p.two_mu;
  out.gamma = p.gamma;
  out.self_loop.assign(k, 0.0);
  out.strength.assign(static_cast<std::size_t>(k) * p.n_layers, 0.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> raw(k);
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto ci = membership[i];
    out.self_loop[ci] += p.self_loop[i];
    for (const auto& [j, w] : p.adj[i]) {
      const auto cj = membership[j];
      if (cj == ci) {
        out.self_loop[ci] += w;
      } else {
        raw[ci].emplace_back(cj, w);
      }
    }
    for (std::size_t s = 0; s < p.n_layers; ++s) out.strength[ci * p.n_layers + s] += p.strength[i * p.n_layers + s];
  }
  out.adj.resize(k);
  for (std::uint32_t c = 0; c < k; ++c) {
    auto& r = raw[c];
    std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [cj, w] : r) {
      if (!out.adj[c].empty() && out.adj[c].back().first == cj) {
        out.adj[c].back().second += w;
      } else {
        out.adj[c].emplace_back(cj, w);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> run_louvain(const ModularityProblem& p, std::uint64_t seed, double tolerance,
                                       std::vector<double>* levels) {
  std::vector<std::uint32_t> assignment(p.n);
  std::iota(assignment.begin(), assignment.end(), 0u);
  if (levels) levels->push_back(problem_modularity(p, assignment));

  std::mt19937_64 rng(seed);
  ModularityProblem current = p;
  while (true) {
    auto moved = local_moving(current, rng, tolerance);
    if (!moved.moved) break;
    const auto k = renumber(moved.membership);
    for (auto& c : assignment) c = moved.membership[c];
    const bool shrank = k < current.n;
    current = aggregate(current, moved.membership, k);
    if (levels) {
      std::vector<std::uint32_t> singletons(k);
      std::iota(singletons.begin(), singletons.end(), 0u);
      levels->push_back(problem_modularity(current, singletons));
    }
    if (!shrank) break;
  }
  return assignment;
}

}  // namespace mmcoord::detail
