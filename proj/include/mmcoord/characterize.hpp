#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmcoord/graph.hpp"
#include "mmcoord/netbuild.hpp"

namespace mmcoord {

inline constexpr std::size_t kNumCommunityMetrics = 7;
inline constexpr std::array<std::string_view, kNumCommunityMetrics> kCommunityMetricNames = {
    "size", "density", "avg_degree", "avg_weight", "avg_clustering", "conductance", "assortativity"};

struct CommunityMetrics {
  std::size_t size = 0;
  double density = 0.0;
  double avg_degree = 0.0;
  double avg_weight = 0.0;
  double avg_clustering = 0.0;
  std::optional<double> conductance;  // empty when vol(S) = 0 or S = V
  double assortativity = 0.0;
  bool assortativity_defined = false;  // false: zero degree variance or no edges, value recorded as 0

  /// Feature vector in kCommunityMetricNames order; undefined entries are 0.
  std::array<double, kNumCommunityMetrics> vector() const;
};

/// Metrics of the community induced by `members` (must be nodes of `g`).
/// Conductance uses unweighted volumes over the whole graph.
CommunityMetrics community_metrics(const WeightedGraph& g, const std::vector<ActorId>& members);

inline constexpr std::size_t kNumNodeMetrics = 4;
inline constexpr std::array<std::string_view, kNumNodeMetrics> kNodeMetricNames = {
    "degree_centrality", "eigenvector_centrality", "local_clustering", "pagerank"};

struct NodeMetrics {
  double degree_centrality = 0.0;
  double eigenvector_centrality = 0.0;
  double local_clustering = 0.0;
  double pagerank = 0.0;

  std::array<double, kNumNodeMetrics> vector() const {
    return {degree_centrality, eigenvector_centrality, local_clustering, pagerank};
  }
};

struct NodeMetricsReport {
  std::vector<NodeMetrics> nodes;  // by local index of the graph
  double eigenvalue = 0.0;
  /// Set when the graph has several components: nodes outside the largest
  /// one get eigenvector centrality 0.
  bool eigenvector_partial = false;
  bool converged = true;
};


NodeMetricsReport node_metrics(const WeightedGraph& g, double damping = 0.85, KernelMode mode = KernelMode::Parallel,
                               int threads = 0);

/// Unweighted closed-triangle ratio; 0 below degree 2.
double local_clustering(const WeightedGraph& g, std::size_t i);

double metric_cosine(const CommunityMetrics& a, const CommunityMetrics& b);
double cosine(std::span<const double> a, std::span<const double> b);

struct PcaResult {
  std::vector<std::array<double, 2>> coords;
  std::vector<double> explained_ratio;  // every component, non-increasing
  std::vector<std::size_t> kept_features;
  std::vector<std::string> warnings;
};

/// z-scores each feature (dropping zero-variance ones), then projects onto the
/// top two eigenvectors of the correlation matrix. Each component's
/// largest-magnitude loading is made positive.
PcaResult pca_project(const std::vector<std::array<double, kNumCommunityMetrics>>& vectors);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
};

/// Two-sided Brunner-Munzel test with midranks and a t approximation.
/// Throws DataError when a sample has fewer than two values or the variance
/// estimate is zero.
TestResult brunner_munzel(std::span<const double> x, std::span<const double> y);

/// ns, *, ** or *** for p >= 0.05, < 0.05, <= 0.01, <= 0.001.
std::string_view significance_band(double p);

/// Midranks (1-based) with ties averaged.
std::vector<double> midranks(std::span<const double> v);

}  // namespace mmcoord
