#include "mmcoord/community.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "louvain_engine.hpp"

namespace mmcoord {

std::size_t Partition::num_communities() const {
  CommunityId k = 0;
  for (const auto& [a, c] : assignment) k = std::max(k, c + 1);
  return k;
}

std::vector<std::vector<ActorId>> Partition::communities() const {
  std::vector<std::vector<ActorId>> out(num_communities());
  for (const auto& [a, c] : assignment) out[c].push_back(a);
  return out;
}

std::size_t MultiplexPartition::num_communities() const {
  CommunityId k = 0;
  for (const auto& [node, c] : assignment) k = std::max(k, c + 1);
  return k;
}

std::vector<std::vector<ActorId>> MultiplexPartition::actor_communities() const {
  std::vector<std::vector<ActorId>> out(num_communities());
  for (const auto& [node, c] : assignment) {
    auto& members = out[c];
    if (members.empty() || members.back() != node.actor) members.push_back(node.actor);
  }
  for (auto& m : out) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  return out;
}

std::string_view to_string(FlattenStrategy s) {
  switch (s) {
    case FlattenStrategy::NotWeighted: return "nw";
    case FlattenStrategy::EdgeCount: return "ec";
    case FlattenStrategy::Sum: return "sum";
    case FlattenStrategy::Intersection: return "intersection";
  }
  return "?";
}

double modularity(const WeightedGraph& g, const std::vector<CommunityId>& membership, double gamma) {
  if (membership.size() != g.num_nodes()) throw DataError("partition does not cover the graph");
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;
  CommunityId k = 0;
  for (auto c : membership) k = std::max(k, c + 1);
  std::vector<double> internal(k, 0.0);
  std::vector<double> degree(k, 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto nb = g.neighbors(i);
    const auto ws = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      degree[membership[i]] += ws[e];
      if (nb[e] > i && membership[nb[e]] == membership[i]) internal[membership[i]] += ws[e];
    }
  }
  double q = 0.0;
  for (CommunityId c = 0; c < k; ++c) {
    const double frac = degree[c] / (2.0 * m);
    q += internal[c] / m - gamma * frac * frac;
  }
  return q;
}

double modularity(const LayerGraph& g, const Partition& p, double gamma) {
  const auto wg = WeightedGraph::from_layer(g);
  std::vector<CommunityId> membership(wg.num_nodes());
  for (std::size_t i = 0; i < wg.num_nodes(); ++i) {
    const auto it = p.assignment.find(wg.actor(i));
    if (it == p.assignment.end()) throw DataError("partition does not cover the graph");
    membership[i] = it->second;
  }
  return modularity(wg, membership, gamma);
}

namespace {

detail::ModularityProblem single_layer_problem(const WeightedGraph& g, double gamma) {
  detail::ModularityProblem p;
  p.n = g.num_nodes();
  p.n_layers = 1;
  p.gamma = gamma;
  p.adj.resize(p.n);
  p.self_loop.assign(p.n, 0.0);
  p.strength.assign(p.n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto nb = g.neighbors(i);
    const auto ws = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      p.adj[i].emplace_back(nb[e], ws[e]);
      p.strength[i] += ws[e];
    }
    two_m += p.strength[i];
  }
  p.two_m = {two_m};
  p.two_mu = two_m;
  return p;
}

}  // namespace

std::vector<CommunityId> louvain(const WeightedGraph& g, const LouvainOptions& opts, LouvainTrace* trace) {
  if (g.num_nodes() == 0) throw DataError("louvain on an empty graph");
  const auto problem = single_layer_problem(g, opts.gamma);
  const auto raw = detail::run_louvain(problem, opts.seed, opts.tolerance, trace ? &trace->level_modularity : nullptr);
  std::map<std::uint32_t, CommunityId> by_index;
  for (std::uint32_t i = 0; i < raw.size(); ++i) by_index.emplace(i, raw[i]);
  const auto canon = canonicalize(by_index);
  std::vector<CommunityId> out(raw.size());
  for (const auto& [i, c] : canon) out[i] = c;
  return out;
}

Partition louvain(const LayerGraph& g, const LouvainOptions& opts, LouvainTrace* trace) {
  const auto wg = WeightedGraph::from_layer(g);
  const auto membership = louvain(wg, opts, trace);
  Partition p;
  p.scope = std::string(layer_name(g.layer));
  p.gamma = opts.gamma;
  for (std::size_t i = 0; i < wg.num_nodes(); ++i) p.assignment.emplace(wg.actor(i), membership[i]);
  return p;
}

FlattenedGraph flatten_union(const MultiplexNetwork& net, FlattenStrategy strategy) {
  if (strategy == FlattenStrategy::Intersection) return flatten_intersection(net);
  FlattenedGraph out;
  out.strategy = strategy;
  // layers are visited in the fixed action order, so sums are reproducible
  for (const auto& [layer, g] : net.layers) {
    out.graph.nodes.insert(g.nodes.begin(), g.nodes.end());
    for (const auto& [key, attr] : g.edges) {
      auto [it, inserted] = out.graph.edges.try_emplace(key, EdgeAttr{0.0, 0, 0});
      auto& acc = it->second;
      switch (strategy) {
        case FlattenStrategy::NotWeighted: acc.weight = 1.0; break;
        case FlattenStrategy::EdgeCount: acc.weight += 1.0; break;
        default: acc.weight += attr.weight; break;
      }
      acc.co_actions += attr.co_actions;
      acc.window_count += attr.window_count;
    }
  }
  return out;
}

FlattenedGraph flatten_intersection(const MultiplexNetwork& net) {
  if (net.layers.size() < 2) throw ConfigError("intersection flattening needs at least two layers");
  FlattenedGraph out;
  out.strategy = FlattenStrategy::Intersection;
  const auto& first = net.layers.begin()->second;
  for (const auto& [key, attr] : first.edges) {
    bool everywhere = true;
    EdgeAttr acc{0.0, 0, 0};
    for (const auto& [layer, g] : net.layers) {
      const auto it = g.edges.find(key);
      if (it == g.edges.end()) {
        everywhere = false;
        break;
      }
      acc.weight += it->second.weight;
      acc.co_actions += it->second.co_actions;
      acc.window_count += it->second.window_count;
    }
    if (everywhere) out.graph.set_edge(key.a, key.b, acc);
  }
  return out;
}

namespace {

std::size_t layer_slot(const std::vector<Action>& layers, Action a) {
  return static_cast<std::size_t>(std::find(layers.begin(), layers.end(), a) - layers.begin());
}

}  // namespace

double multislice_modularity(const MultiplexNetwork& net, const MultiplexPartition& p, double gamma, double omega) {
  std::size_t expected = 0;
  for (const auto& [layer, g] : net.layers) {
    for (const auto actor : g.nodes) {
      if (!p.assignment.count(LayerNode{actor, layer})) throw DataError("partition misses a layer node");
      ++expected;
    }
  }
  if (expected != p.assignment.size()) throw DataError("partition covers nodes outside the network");

  double intra = 0.0;
  double two_mu = 0.0;
  for (const auto& [layer, g] : net.layers) {
    std::map<CommunityId, double> internal;
    std::map<CommunityId, double> degree;
    double two_m = 0.0;
    for (const auto& [key, attr] : g.edges) {
      const auto ca = p.assignment.at(LayerNode{key.a, layer});
      const auto cb = p.assignment.at(LayerNode{key.b, layer});
      if (ca == cb) internal[ca] += 2.0 * attr.weight;
      degree[ca] += attr.weight;
      degree[cb] += attr.weight;
      two_m += 2.0 * attr.weight;
    }
    two_mu += two_m;
    for (const auto& [c, w] : internal) intra += w;
    if (two_m > 0.0) {
      for (const auto& [c, d] : degree) intra -= gamma * d * d / two_m;
    }
  }

  // Categorical coupling: every ordered pair of an actor's layer nodes.
  double coupling = 0.0;
  auto it = p.assignment.begin();
  while (it != p.assignment.end()) {
    const ActorId actor = it->first.actor;
    std::vector<CommunityId> labels;
    for (; it != p.assignment.end() && it->first.actor == actor; ++it) labels.push_back(it->second);
    const auto na = static_cast<double>(labels.size());
    two_mu += omega * na * (na - 1.0);
    for (std::size_t s = 0; s < labels.size(); ++s) {
      for (std::size_t r = 0; r < labels.size(); ++r) {
        if (s != r && labels[s] == labels[r]) coupling += omega;
      }
    }
  }
  if (two_mu <= 0.0) return 0.0;
  return (intra + coupling) / two_mu;
}

MultiplexPartition generalized_louvain(const MultiplexNetwork& net, double omega, const LouvainOptions& opts,
                                       LouvainTrace* trace) {
  if (net.layers.empty()) throw DataError("generalized louvain on an empty network");
  const std::vector<Action> layers = net.layer_ids();
  const std::size_t L = layers.size();

  std::map<LayerNode, std::uint32_t> index;
  for (const auto& [layer, g] : net.layers) {
    for (const auto actor : g.nodes) index.emplace(LayerNode{actor, layer}, 0);
  }
  if (index.empty()) throw DataError("generalized louvain on an empty network");
  std::vector<LayerNode> nodes;
  nodes.reserve(index.size());
  for (auto& [node, idx] : index) {
    idx = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(node);
  }

  detail::ModularityProblem p;
  p.n = nodes.size();
  p.n_layers = L;
  p.gamma = opts.gamma;
  p.adj.resize(p.n);
  p.self_loop.assign(p.n, 0.0);
  p.strength.assign(p.n * L, 0.0);
  p.two_m.assign(L, 0.0);
  for (const auto& [layer, g] : net.layers) {
    const std::size_t s = layer_slot(layers, layer);
    for (const auto& [key, attr] : g.edges) {
      const auto u = index.at(LayerNode{key.a, layer});
      const auto v = index.at(LayerNode{key.b, layer});
      p.adj[u].emplace_back(v, attr.weight);
      p.adj[v].emplace_back(u, attr.weight);
      p.strength[u * L + s] += attr.weight;
      p.strength[v * L + s] += attr.weight;
      p.two_m[s] += 2.0 * attr.weight;
    }
  }
  double coupling_total = 0.0;
  for (std::size_t i = 0; i < p.n;) {
    std::size_t j = i;
    while (j < p.n && nodes[j].actor == nodes[i].actor) ++j;
    const auto na = static_cast<double>(j - i);
    coupling_total += omega * na * (na - 1.0);
    if (omega > 0.0) {
      for (std::size_t a = i; a < j; ++a) {
        for (std::size_t b = i; b < j; ++b) {
          if (a != b) p.adj[a].emplace_back(static_cast<std::uint32_t>(b), omega);
        }
      }
    }
    i = j;
  }
  for (auto& row : p.adj) {
    std::stable_sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  p.two_mu = coupling_total;
  for (double t : p.two_m) p.two_mu += t;

  const auto raw = detail::run_louvain(p, opts.seed, opts.tolerance, trace ? &trace->level_modularity : nullptr);
  std::map<LayerNode, CommunityId> assignment;
  for (std::size_t i = 0; i < p.n; ++i) assignment.emplace(nodes[i], raw[i]);

  MultiplexPartition out;
  out.assignment = canonicalize(assignment);
  out.layers = layers;
  out.gamma = opts.gamma;
  out.omega = omega;
  return out;
}

Partition restrict_to_layer(const MultiplexPartition& p, Action layer) {
  if (std::find(p.layers.begin(), p.layers.end(), layer) == p.layers.end()) {
    throw ConfigError("layer " + std::string(layer_name(layer)) + " not in multiplex partition");
  }
  std::map<ActorId, CommunityId> restricted;
  for (const auto& [node, c] : p.assignment) {
    if (node.layer == layer) restricted.emplace(node.actor, c);
  }
  Partition out;
  out.scope = "MULTI|" + std::string(layer_name(layer));
  out.gamma = p.gamma;
  out.assignment = canonicalize(restricted);
  return out;
}

void write_partition(const std::filesystem::path& path, const Partition& p, const ActorRegistry& registry) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [actor, c] : p.assignment) out << registry.name(actor) << '\t' << c << '\n';
}

void write_partition(const std::filesystem::path& path, const MultiplexPartition& p, const ActorRegistry& registry) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [node, c] : p.assignment) {
    out << registry.name(node.actor) << '\t' << to_token(node.layer) << '\t' << c << '\n';
  }
}

Partition read_partition(const std::filesystem::path& path, const ActorRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read partition " + path.string());
  Partition p;
  p.scope = path.stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string user;
    CommunityId c = 0;
    if (!(fields >> user >> c)) throw DataError("malformed partition record in " + path.string());
    p.assignment.emplace(registry.id(user), c);
  }
  return p;
}

MultiplexPartition read_multiplex_partition(const std::filesystem::path& path, const ActorRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read partition " + path.string());
  MultiplexPartition p;
  std::set<Action> layers;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string user, layer;
    CommunityId c = 0;
    if (!(fields >> user >> layer >> c)) throw DataError("malformed partition record in " + path.string());
    const auto a = parse_action(layer);
    if (!a) throw DataError("unknown layer '" + layer + "' in " + path.string());
    layers.insert(*a);
    p.assignment.emplace(LayerNode{registry.id(user), *a}, c);
  }
  p.layers.assign(layers.begin(), layers.end());
  return p;
}

}  // namespace mmcoord
