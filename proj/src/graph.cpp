#include "mmcoord/graph.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace mmcoord {

ActorRegistry::ActorRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

std::optional<ActorId> ActorRegistry::find(std::string_view name) const {
  const auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<ActorId>(it - names_.begin());
}

ActorId ActorRegistry::id(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw DataError("unknown actor '" + std::string(name) + "'");
}

void LayerGraph::set_edge(ActorId u, ActorId v, EdgeAttr attr) {
  if (u == v) throw InvariantError("self-loop on actor " + std::to_string(u));
  nodes.insert(u);
  nodes.insert(v);
  edges[EdgeKey::of(u, v)] = attr;
}

void LayerGraph::prune_isolated() {
  std::set<ActorId> touched;
  for (const auto& [key, attr] : edges) {
    touched.insert(key.a);
    touched.insert(key.b);
  }
  nodes = std::move(touched);
}

void LayerGraph::check_invariants(bool weights_in_unit_interval) const {
  for (const auto& [key, attr] : edges) {
    if (key.a >= key.b) throw InvariantError("edge key not ordered or self-loop");
    if (!nodes.count(key.a) || !nodes.count(key.b)) throw InvariantError("edge endpoint missing from node set");
    if (!(attr.weight > 0.0)) throw InvariantError("non-positive edge weight");
    if (weights_in_unit_interval && attr.weight > 1.0) throw InvariantError("edge weight above 1");
    if (attr.co_actions < 1) throw InvariantError("edge without co-actions");
  }
}

WeightedGraph WeightedGraph::from_layer(const LayerGraph& g) {
  WeightedGraph out;
  out.ids_.assign(g.nodes.begin(), g.nodes.end());
  const std::size_t n = out.ids_.size();
  auto local = [&](ActorId id) {
    return static_cast<std::uint32_t>(std::lower_bound(out.ids_.begin(), out.ids_.end(), id) - out.ids_.begin());
  };
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [key, attr] : g.edges) {
    ++deg[local(key.a)];
    ++deg[local(key.b)];
  }
  out.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) out.offsets_[i + 1] = out.offsets_[i] + deg[i];
  out.targets_.resize(out.offsets_[n]);
  out.weights_.resize(out.offsets_[n]);
  std::vector<std::size_t> cursor(out.offsets_.begin(), out.offsets_.end() - 1);
  // map iteration is (a, b) ascending, so each adjacency row ends up sorted
  for (const auto& [key, attr] : g.edges) {
    const auto u = local(key.a);
    const auto v = local(key.b);
    out.targets_[cursor[u]] = v;
    out.weights_[cursor[u]++] = attr.weight;
    out.targets_[cursor[v]] = u;
    out.weights_[cursor[v]++] = attr.weight;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> perm(out.degree(i));
    std::iota(perm.begin(), perm.end(), out.offsets_[i]);
    std::sort(perm.begin(), perm.end(), [&](auto x, auto y) { return out.targets_[x] < out.targets_[y]; });
    std::vector<std::uint32_t> t;
    std::vector<double> w;
    for (auto p : perm) {
      t.push_back(out.targets_[p]);
      w.push_back(out.weights_[p]);
    }
    std::copy(t.begin(), t.end(), out.targets_.begin() + static_cast<std::ptrdiff_t>(out.offsets_[i]));
    std::copy(w.begin(), w.end(), out.weights_.begin() + static_cast<std::ptrdiff_t>(out.offsets_[i]));
  }
  return out;
}

WeightedGraph WeightedGraph::from_edges(std::size_t n,
                                        const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges) {
  LayerGraph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.insert(static_cast<ActorId>(i));
  for (const auto& [u, v, w] : edges) g.set_edge(u, v, EdgeAttr{w, 1, 1});
  return from_layer(g);
}

double WeightedGraph::strength(std::size_t i) const {
  double s = 0.0;
  for (double w : weights(i)) s += w;
  return s;
}

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    const auto nb = neighbors(i);
    const auto ws = weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] > i) s += ws[k];
    }
  }
  return s;
}

std::optional<std::size_t> WeightedGraph::local_index(ActorId id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

bool WeightedGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

std::vector<std::vector<std::uint32_t>> connected_components(const WeightedGraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::uint32_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(s)};
    comp[s] = c;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      out[c].push_back(u);
      for (auto v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
      }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

}  // namespace mmcoord
