#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "mmcoord/graph.hpp"

namespace mmcoord {

struct WeightRule {
  enum class Kind { Median, Fixed } kind = Kind::Median;
  double value = 0.0;  // Fixed only, in (0, 1]

  static WeightRule median() { return {}; }
  static WeightRule fixed(double v);
};

struct FilterConfig {
  /// Fixed co-action threshold; when empty, auto_threshold(max_nodes) picks it.
  std::optional<std::uint32_t> action_threshold;
  std::size_t max_nodes = 20000;
  WeightRule weight_rule;
};

/// Keeps edges with co_actions >= th_a, then drops isolated nodes.
LayerGraph filter_by_actions(const LayerGraph& g, std::uint32_t th_a);

/// Smallest th_a whose action-filtered graph has at most `max_nodes` nodes.
std::uint32_t auto_threshold(const LayerGraph& g, std::size_t max_nodes);

/// Lower median of the edge weights; nullopt on an edgeless graph.
std::optional<double> lower_median_weight(const LayerGraph& g);

struct WeightFilterResult {
  LayerGraph graph;
  std::optional<double> threshold;  // empty when the input had no edges
};

/// Keeps edges with weight >= threshold (median or fixed), then drops
/// isolated nodes. An edgeless input is returned unchanged.
WeightFilterResult filter_by_weight(const LayerGraph& g, const WeightRule& rule);

struct FilterReport {
  Action layer = Action::RTW;
  std::size_t nodes_before = 0, edges_before = 0;
  std::uint32_t th_a = 1;
  std::size_t nodes_after_actions = 0, edges_after_actions = 0;
  std::optional<double> th_w;
  std::size_t nodes_after_weight = 0, edges_after_weight = 0;
  std::string warning;
};

/// Both stages in order, with the counts for the filter report.
LayerGraph filter_layer(const LayerGraph& g, const FilterConfig& cfg, FilterReport* report = nullptr);

}  // namespace mmcoord
