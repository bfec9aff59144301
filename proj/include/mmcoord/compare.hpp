#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmcoord/community.hpp"
#include "mmcoord/netbuild.hpp"

namespace mmcoord {

using Members = std::vector<ActorId>;  // ascending, non-empty

/// Communities of one approach, keeping their ids from the source partition.
struct CommunitySet {
  std::string approach;
  std::vector<CommunityId> ids;
  std::vector<Members> members;

  std::size_t size() const { return members.size(); }
  static CommunitySet from_partition(const Partition& p, std::string approach);
  /// Keeps communities with more than `min_size` members.
  CommunitySet larger_than(std::size_t min_size) const;
};

/// Harmonic mean of |A∩B|/|A| and |A∩B|/|B|; 0 when disjoint.
double harmonic_overlap(const Members& a, const Members& b);

/// Rows are the communities of B (k'), columns those of A (k).
struct OverlapMatrix {
  CommunitySet a;
  CommunitySet b;
  std::vector<double> cells;  // row-major, rows = b

  std::size_t rows() const { return b.size(); }
  std::size_t cols() const { return a.size(); }
  double at(std::size_t row_b, std::size_t col_a) const { return cells[row_b * cols() + col_a]; }
  /// o^{AB}_{ij} with i indexing A and j indexing B.
  double overlap(std::size_t i_a, std::size_t j_b) const { return at(j_b, i_a); }
};

OverlapMatrix overlap_matrix(const CommunitySet& a, const CommunitySet& b, std::size_t min_size = 0);

/// Rectangular assignment maximizing the summed score (Kuhn-Munkres on the
/// negated, zero-padded square matrix). Returns, for every row, the assigned
/// column or -1.
std::vector<int> max_weight_assignment(const std::vector<double>& score, std::size_t rows, std::size_t cols);

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in A, index in B), A ascending
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
  double total = 0.0;  // summed in pair order
};

MatchResult hungarian_match(const OverlapMatrix& o);

enum class Label { Lost, Common, Gained };
std::string_view to_string(Label l);

struct CommunityLabels {
  double theta = 0.5;
  std::vector<Label> a;  // Lost or Common
  std::vector<Label> b;  // Gained or Common

  std::size_t lost() const;
  std::size_t common_a() const;
  std::size_t common_b() const;
  std::size_t gained() const;
};

CommunityLabels label_communities(const OverlapMatrix& o, const MatchResult& m, double theta);

/// Node-level labels over every member of a community on either side. A node
/// that satisfies several cases takes the first in the order common, lost in a
/// matched pair, gained in a matched pair, lost unmatched, gained unmatched.
std::map<ActorId, Label> label_nodes(const CommunitySet& a, const CommunitySet& b, const MatchResult& m);

/// 2 I(X;Y) / (H(X) + H(Y)) over the nodes both partitions cover, after
/// dropping communities with at most `min_size` members. Returns 0 when both
/// entropies vanish.
double nmi(const Partition& p1, const Partition& p2, std::size_t min_size = 0);

/// |V^i ∩ V^j| / |V^i|
double actor_coverage(const MultiplexNetwork& net, Action layer_i, Action layer_j);
/// |E^i ∩ E^j| / |E^i|, edges as unordered endpoint pairs.
double edge_coverage(const MultiplexNetwork& net, Action layer_i, Action layer_j);
/// Pearson correlation of unweighted degrees over V^i ∩ V^j; empty when fewer
/// than two common actors or either degree vector is constant.
std::optional<double> pearson_degree_correlation(const MultiplexNetwork& net, Action layer_i, Action layer_j);

}  // namespace mmcoord
