#include "mmcoord/filternet.hpp"

#include <algorithm>
#include <vector>

namespace mmcoord {

WeightRule WeightRule::fixed(double v) {
  if (!(v > 0.0 && v <= 1.0)) throw ConfigError("fixed weight threshold must be in (0, 1]");
  return WeightRule{Kind::Fixed, v};
}

LayerGraph filter_by_actions(const LayerGraph& g, std::uint32_t th_a) {
  if (th_a < 1) throw ConfigError("action threshold must be >= 1");
  LayerGraph out;
  out.layer = g.layer;
  for (const auto& [key, attr] : g.edges) {
    if (attr.co_actions >= th_a) out.edges.emplace(key, attr);
  }
  out.prune_isolated();
  return out;
}

namespace {

std::size_t nodes_at_threshold(const LayerGraph& g, std::uint32_t th) {
  std::set<ActorId> nodes;
  for (const auto& [key, attr] : g.edges) {
    if (attr.co_actions >= th) {
      nodes.insert(key.a);
      nodes.insert(key.b);
    }
  }
  return nodes.size();
}

}  // namespace

std::uint32_t auto_threshold(const LayerGraph& g, std::size_t max_nodes) {
  if (max_nodes < 1) throw ConfigError("max_nodes must be >= 1");
  std::vector<std::uint32_t> candidates;
  for (const auto& [key, attr] : g.edges) candidates.push_back(attr.co_actions);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  if (nodes_at_threshold(g, 1) <= max_nodes) return 1;
  // Every threshold in (previous distinct value, c] keeps the same edges as c,
  // so the smallest feasible one is the previous distinct value plus one.
  std::uint32_t prev = 0;
  for (const auto c : candidates) {
    if (nodes_at_threshold(g, c) <= max_nodes) return std::max<std::uint32_t>(prev + 1, 1);
    prev = c;
  }
  return prev + 1;
}

std::optional<double> lower_median_weight(const LayerGraph& g) {
  if (g.edges.empty()) return std::nullopt;
  std::vector<double> w;
  w.reserve(g.edges.size());
  for (const auto& [key, attr] : g.edges) w.push_back(attr.weight);
  const std::size_t mid = (w.size() - 1) / 2;
  std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid), w.end());
  return w[mid];
}

WeightFilterResult filter_by_weight(const LayerGraph& g, const WeightRule& rule) {
  std::optional<double> threshold;
  if (rule.kind == WeightRule::Kind::Fixed) {
    threshold = rule.value;
  } else {
    threshold = lower_median_weight(g);
  }
  if (g.edges.empty()) return {g, std::nullopt};
  LayerGraph out;
  out.layer = g.layer;
  for (const auto& [key, attr] : g.edges) {
    if (attr.weight >= *threshold) out.edges.emplace(key, attr);
  }
  out.prune_isolated();
  return {std::move(out), threshold};
}

LayerGraph filter_layer(const LayerGraph& g, const FilterConfig& cfg, FilterReport* report) {
  FilterReport r;
  r.layer = g.layer;
  r.nodes_before = g.num_nodes();
  r.edges_before = g.num_edges();
  r.th_a = cfg.action_threshold ? *cfg.action_threshold : auto_threshold(g, cfg.max_nodes);
  LayerGraph by_actions = filter_by_actions(g, r.th_a);
  r.nodes_after_actions = by_actions.num_nodes();
  r.edges_after_actions = by_actions.num_edges();
  auto by_weight = filter_by_weight(by_actions, cfg.weight_rule);
  r.th_w = by_weight.threshold;
  if (by_actions.edges.empty()) r.warning = "no edges left before the weight filter";
  r.nodes_after_weight = by_weight.graph.num_nodes();
  r.edges_after_weight = by_weight.graph.num_edges();
  if (report) *report = r;
  return std::move(by_weight.graph);
}

}  // namespace mmcoord
