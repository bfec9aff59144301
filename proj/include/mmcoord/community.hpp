#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmcoord/graph.hpp"
#include "mmcoord/netbuild.hpp"

namespace mmcoord {

/// Community assignment over the nodes of one graph (a layer or a flattened
/// network). Ids are dense from 0, ordered by decreasing size then by the
/// smallest member.
struct Partition {
  std::string scope;
  std::map<ActorId, CommunityId> assignment;
  double gamma = 1.0;

  std::size_t num_communities() const;
  /// Member lists indexed by community id, members ascending.
  std::vector<std::vector<ActorId>> communities() const;
};

/// A node of the supra-graph: one actor's presence in one layer.
struct LayerNode {
  ActorId actor = 0;
  Action layer = Action::RTW;
  friend auto operator<=>(const LayerNode&, const LayerNode&) = default;
};

struct MultiplexPartition {
  std::map<LayerNode, CommunityId> assignment;
  std::vector<Action> layers;
  double gamma = 1.0;
  double omega = 0.1;

  std::size_t num_communities() const;
  /// Actor sets per community id (union over layers).
  std::vector<std::vector<ActorId>> actor_communities() const;
};

enum class FlattenStrategy { NotWeighted, EdgeCount, Sum, Intersection };

std::string_view to_string(FlattenStrategy s);

struct FlattenedGraph {
  FlattenStrategy strategy = FlattenStrategy::Sum;
  LayerGraph graph;
};

/// Newman-Girvan weighted modularity with resolution gamma; 0 for an edgeless graph.
double modularity(const LayerGraph& g, const Partition& p, double gamma);
double modularity(const WeightedGraph& g, const std::vector<CommunityId>& membership, double gamma);

struct LouvainOptions {
  double gamma = 1.0;
  std::uint64_t seed = 42;
  /// A local-moving sweep that gains less than this ends the phase.
  double tolerance = 1e-10;
};

/// Modularity of the partition after each aggregation level; entry 0 is the
/// singleton partition.
struct LouvainTrace {
  std::vector<double> level_modularity;
};

/// Local moving + aggregation. Node visit order is shuffled with the seed.
Partition louvain(const LayerGraph& g, const LouvainOptions& opts, LouvainTrace* trace = nullptr);
/// Same, on local indices; returns the canonical membership per node.
std::vector<CommunityId> louvain(const WeightedGraph& g, const LouvainOptions& opts, LouvainTrace* trace = nullptr);

/// Union of layer nodes and edges, weighted 1 (nw), by layer count (ec) or by
/// summed layer weights (sum).
FlattenedGraph flatten_union(const MultiplexNetwork& net, FlattenStrategy strategy);
/// Edges present in every layer, weighted by the sum of their layer weights.
FlattenedGraph flatten_intersection(const MultiplexNetwork& net);

/// Multislice modularity with categorical (all-to-all) coupling of each
/// actor's layer nodes. The normalization includes the coupling weight.
double multislice_modularity(const MultiplexNetwork& net, const MultiplexPartition& p, double gamma, double omega);

/// Louvain over the supra-graph of (actor, layer) nodes with intra-layer
/// null models and inter-layer couplings of weight omega.
MultiplexPartition generalized_louvain(const MultiplexNetwork& net, double omega, const LouvainOptions& opts,
                                       LouvainTrace* trace = nullptr);

/// C|_l: the layer-l part of every multiplex community, relabelled densely.
Partition restrict_to_layer(const MultiplexPartition& p, Action layer);

/// Groups items by label and renumbers: decreasing size, then smallest key.
template <typename Key>
std::map<Key, CommunityId> canonicalize(const std::map<Key, CommunityId>& assignment);

void write_partition(const std::filesystem::path& path, const Partition& p, const ActorRegistry& registry);
void write_partition(const std::filesystem::path& path, const MultiplexPartition& p, const ActorRegistry& registry);
Partition read_partition(const std::filesystem::path& path, const ActorRegistry& registry);
MultiplexPartition read_multiplex_partition(const std::filesystem::path& path, const ActorRegistry& registry);

}  // namespace mmcoord

#include "mmcoord/community_impl.hpp"
