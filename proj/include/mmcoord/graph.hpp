#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmcoord/core.hpp"

namespace mmcoord {

/// Sorted, de-duplicated actor names. An ActorId is an index into `names`, so
/// id order is lexicographic name order.
class ActorRegistry {
 public:
  ActorRegistry() = default;
  explicit ActorRegistry(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(ActorId id) const { return names_.at(id); }
  std::optional<ActorId> find(std::string_view name) const;
  ActorId id(std::string_view name) const;  // throws DataError when unknown
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

/// Unordered endpoint pair stored with a < b.
struct EdgeKey {
  ActorId a = 0;
  ActorId b = 0;

  static EdgeKey of(ActorId u, ActorId v) { return u < v ? EdgeKey{u, v} : EdgeKey{v, u}; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeAttr {
  double weight = 0.0;
  std::uint32_t co_actions = 0;
  std::uint32_t window_count = 0;

  friend bool operator==(const EdgeAttr&, const EdgeAttr&) = default;
};

/// Undirected weighted graph of one layer (or a flattened network) over the
/// shared actor id space. No self-loops; every edge endpoint is a node.
struct LayerGraph {
  Action layer = Action::RTW;
  std::set<ActorId> nodes;
  std::map<EdgeKey, EdgeAttr> edges;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }
  bool has_edge(ActorId u, ActorId v) const { return edges.count(EdgeKey::of(u, v)) > 0; }

  /// Inserts or overwrites; adds both endpoints to `nodes`.
  void set_edge(ActorId u, ActorId v, EdgeAttr attr);
  /// Drops nodes that no edge touches.
  void prune_isolated();
  /// Throws InvariantError when a structural invariant is violated.
  void check_invariants(bool weights_in_unit_interval) const;

  friend bool operator==(const LayerGraph&, const LayerGraph&) = default;
};

/// Compact adjacency (CSR) over local indices 0..n-1, used by the detection
/// and metric kernels. Local index order follows ActorId order.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  static WeightedGraph from_layer(const LayerGraph& g);
  /// Builds from an explicit edge list over nodes 0..n-1 (test fixtures).
  static WeightedGraph from_edges(std::size_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges);

  std::size_t num_nodes() const { return ids_.size(); }
  std::size_t num_edges() const { return targets_.size() / 2; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> weights(std::size_t i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  double strength(std::size_t i) const;
  /// Sum of edge weights, each undirected edge counted once.
  double total_weight() const;
  ActorId actor(std::size_t i) const { return ids_[i]; }
  const std::vector<ActorId>& actors() const { return ids_; }
  std::optional<std::size_t> local_index(ActorId id) const;
  bool has_edge(std::size_t i, std::size_t j) const;

 private:
  std::vector<ActorId> ids_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
};

/// Connected components as lists of local indices, ordered by smallest member.
std::vector<std::vector<std::uint32_t>> connected_components(const WeightedGraph& g);

}  // namespace mmcoord
