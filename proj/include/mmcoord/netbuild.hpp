#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mmcoord/graph.hpp"
#include "mmcoord/ingest.hpp"

namespace mmcoord {

struct Window {
  double start = 0.0;
  double width = 0.0;
  std::size_t index = 0;
  bool closed_end = false;  // the final window also admits t == end()

  double end() const { return start + width; }
  bool contains(double t) const { return t >= start && (t < end() || (closed_end && t == end())); }
};

/// Windows start at t_min, t_min + shift, ...; the count is
/// floor((span - width) / shift) + 1 when span >= width, else 1.
std::vector<Window> window_slices(const TimeSpan& span, double width, double shift);

enum class IdfScope { Window, Global };

struct UserVector {
  ActorId actor = 0;
  Action layer = Action::RTW;
  std::size_t window = 0;
  /// item -> tf * idf, sorted by item; zero entries are kept so shared-item
  /// counts see items nulled by idf.
  std::vector<std::pair<std::string, double>> entries;
};

/// Document frequencies for IdfScope::Global: actors active in the layer and,
/// per item, how many of them used it anywhere in the log.
struct GlobalIdf {
  std::size_t active_actors = 0;
  std::map<std::string, std::size_t> df;
};

GlobalIdf global_idf(const EventLog& log, const ActorRegistry& actors, Action layer);

/// One vector per actor with at least one `layer` event inside the window.
/// tf is the raw count, idf = ln(N / df) with N and df taken from the window's
/// active actors (or from `global` when given).
std::vector<UserVector> build_user_vectors(const EventLog& log, const ActorRegistry& actors, Action layer,
                                           const Window& window, const GlobalIdf* global = nullptr);

enum class KernelMode { Serial, Parallel };

/// Cosine similarity edges between vectors that share at least one item and
/// have non-zero similarity. co_actions counts shared distinct items.
LayerGraph layer_window_graph(const std::vector<UserVector>& vectors, Action layer,
                              KernelMode mode = KernelMode::Parallel, int threads = 0);

/// Mean weight over the windows containing an edge; co_actions and
/// window_count are summed; nodes are unioned.
LayerGraph merge_windows(const std::vector<LayerGraph>& graphs);

/// Running form of merge_windows for window-by-window accumulation.
class WindowMerger {
 public:
  explicit WindowMerger(Action layer) : layer_(layer) {}
  void add(const LayerGraph& g);
  LayerGraph finish() const;

 private:
  Action layer_;
  bool seen_ = false;
  std::set<ActorId> nodes_;
  std::map<EdgeKey, std::pair<double, EdgeAttr>> acc_;  // weight sum, counts
};

struct MultiplexNetwork {
  ActorRegistry registry;
  ActorSet actors;
  std::map<Action, LayerGraph> layers;

  const LayerGraph& layer(Action a) const;
  std::vector<Action> layer_ids() const;
};

struct BuildOptions {
  double width = 6 * 3600.0;
  double shift = 5 * 3600.0;
  IdfScope idf = IdfScope::Window;
  std::vector<Action> layers{kAllActions.begin(), kAllActions.end()};
  int threads = 0;
};

struct BuildStats {
  std::size_t windows = 0;
  std::size_t events_outside_windows = 0;
  std::size_t events_from_unselected_users = 0;
};

MultiplexNetwork build_multiplex(const EventLog& log, const ActorSet& actors, const BuildOptions& opts,
                                 BuildStats* stats = nullptr);

/// `user_a  user_b  weight  co_actions  window_count`, sorted by names.
void write_edge_list(const std::filesystem::path& path, const LayerGraph& g, const ActorRegistry& registry);
LayerGraph read_edge_list(const std::filesystem::path& path, Action layer, const ActorRegistry& registry);

}  // namespace mmcoord
