#pragma once

// Louvain over a graph whose null model is split into layers: two nodes only
// pay the gamma * k_i * k_j / 2m_s penalty for the layers they both carry
// strength in. A plain graph is the one-layer case; the multislice supra-graph
// uses one layer per slice and adds the omega couplings as ordinary edges.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace mmcoord::detail {

struct ModularityProblem {
  std::size_t n = 0;
  std::size_t n_layers = 1;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // symmetric, no self entries
  std::vector<double> self_loop;  // contribution of i to sum_ij A_ij delta with j == i
  std::vector<double> strength;   // n * n_layers null-model strengths
  std::vector<double> two_m;      // per layer
  double two_mu = 0.0;
  double gamma = 1.0;
};

double problem_modularity(const ModularityProblem& p, const std::vector<std::uint32_t>& membership);

/// Returns one label per node (not canonical) and appends the modularity of
/// every level to `levels`.
std::vector<std::uint32_t> run_louvain(const ModularityProblem& p, std::uint64_t seed, double tolerance,
                                       std::vector<double>* levels);

}  // namespace mmcoord::detail
