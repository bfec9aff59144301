#include "mmcoord/netbuild.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mmcoord/kernels.hpp"

namespace mmcoord {

std::vector<Window> window_slices(const TimeSpan& span, double width, double shift) {
  if (!(width > 0.0)) throw ConfigError("window width must be positive");
  if (!(shift > 0.0)) throw ConfigError("window shift must be positive");
  const double len = span.length();
  std::size_t count = 1;
  if (len >= width) count = static_cast<std::size_t>(std::floor((len - width) / shift)) + 1;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(Window{span.t_min + static_cast<double>(k) * shift, width, k, k + 1 == count});
  }
  return out;
}

namespace {

// Events in [window.start, window.end] (the end bound is refined by contains()).
std::pair<std::size_t, std::size_t> window_range(const EventLog& log, const Window& w) {
  const auto& ev = log.events;
  auto lo = std::lower_bound(ev.begin(), ev.end(), w.start,
                             [](const ActionEvent& e, double t) { return e.timestamp < t; });
  auto hi = std::upper_bound(lo, ev.end(), w.end(), [](double t, const ActionEvent& e) { return t < e.timestamp; });
  return {static_cast<std::size_t>(lo - ev.begin()), static_cast<std::size_t>(hi - ev.begin())};
}

}  // namespace

GlobalIdf global_idf(const EventLog& log, const ActorRegistry& actors, Action layer) {
  std::map<ActorId, std::set<std::string>> items;
  for (const auto& e : log.events) {
    if (e.action != layer) continue;
    if (auto id = actors.find(e.user)) items[*id].insert(e.item);
  }
  GlobalIdf out;
  out.active_actors = items.size();
  for (const auto& [actor, set] : items) {
    for (const auto& item : set) ++out.df[item];
  }
  return out;
}

std::vector<UserVector> build_user_vectors(const EventLog& log, const ActorRegistry& actors, Action layer,
                                           const Window& window, const GlobalIdf* global) {
  const auto [lo, hi] = window_range(log, window);
  std::map<ActorId, std::map<std::string, std::size_t>> tf;
  for (std::size_t k = lo; k < hi; ++k) {
    const auto& e = log.events[k];
    if (e.action != layer || !window.contains(e.timestamp)) continue;
    if (auto id = actors.find(e.user)) ++tf[*id][e.item];
  }

  std::map<std::string, std::size_t> local_df;
  for (const auto& [actor, counts] : tf) {
    for (const auto& [item, c] : counts) ++local_df[item];
  }
  const double n_docs = static_cast<double>(global ? global->active_actors : tf.size());
  auto idf = [&](const std::string& item) {
    const std::size_t df = global ? global->df.at(item) : local_df.at(item);
    return std::log(n_docs / static_cast<double>(df));
  };

  std::vector<UserVector> out;
  for (const auto& [actor, counts] : tf) {
    UserVector v{actor, layer, window.index, {}};
    bool any_nonzero = false;
    for (const auto& [item, c] : counts) {
      const double w = static_cast<double>(c) * idf(item);
      any_nonzero = any_nonzero || w > 0.0;
      v.entries.emplace_back(item, w);
    }
    if (any_nonzero) out.push_back(std::move(v));
  }
  return out;
}

LayerGraph layer_window_graph(const std::vector<UserVector>& vectors, Action layer, KernelMode mode, int threads) {
  std::vector<std::string> items;
  for (const auto& v : vectors) {
    for (const auto& [item, w] : v.entries) items.push_back(item);
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  kernels::SparseRows rows;
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (const auto& v : vectors) {
    if (v.layer != layer) throw InvariantError("user vector from a different layer");
    entries.clear();
    for (const auto& [item, w] : v.entries) {
      const auto col = std::lower_bound(items.begin(), items.end(), item) - items.begin();
      entries.emplace_back(static_cast<std::uint32_t>(col), w);
    }
    rows.push_row(entries);
  }

  const auto pairs = mode == KernelMode::Serial ? kernels::pairwise_cosine_serial(rows)
                                                 : kernels::pairwise_cosine_omp(rows, threads);
  LayerGraph g;
  g.layer = layer;
  for (const auto& p : pairs) {
    g.set_edge(vectors[p.i].actor, vectors[p.j].actor, EdgeAttr{p.cosine, p.shared, 1});
  }
  return g;
}

void WindowMerger::add(const LayerGraph& g) {
  if (g.layer != layer_) throw InvariantError("merging graphs from different layers");
  seen_ = true;
  nodes_.insert(g.nodes.begin(), g.nodes.end());
  for (const auto& [key, attr] : g.edges) {
    auto& [wsum, acc] = acc_[key];
    wsum += attr.weight;
    acc.co_actions += attr.co_actions;
    acc.window_count += std::max<std::uint32_t>(attr.window_count, 1);
  }
}

LayerGraph WindowMerger::finish() const {
  LayerGraph out;
  out.layer = layer_;
  out.nodes = nodes_;
  for (const auto& [key, entry] : acc_) {
    const auto& [wsum, acc] = entry;
    out.edges.emplace(key, EdgeAttr{wsum / static_cast<double>(acc.window_count), acc.co_actions, acc.window_count});
  }
  return out;
}

LayerGraph merge_windows(const std::vector<LayerGraph>& graphs) {
  if (graphs.empty()) return LayerGraph{};
  WindowMerger merger(graphs.front().layer);
  for (const auto& g : graphs) merger.add(g);
  return merger.finish();
}

const LayerGraph& MultiplexNetwork::layer(Action a) const {
  const auto it = layers.find(a);
  if (it == layers.end()) throw ConfigError("layer " + std::string(layer_name(a)) + " not in network");
  return it->second;
}

std::vector<Action> MultiplexNetwork::layer_ids() const {
  std::vector<Action> out;
  for (const auto& [a, g] : layers) out.push_back(a);
  return out;
}

MultiplexNetwork build_multiplex(const EventLog& log, const ActorSet& actors, const BuildOptions& opts,
                                 BuildStats* stats) {
  MultiplexNetwork net;
  net.registry = ActorRegistry(std::vector<std::string>(actors.actors.begin(), actors.actors.end()));
  net.actors = actors;
  BuildStats local;

  const auto span = log.time_span();
  std::vector<Window> windows;
  if (span) windows = window_slices(*span, opts.width, opts.shift);
  local.windows = windows.size();

  std::set<Action> wanted(opts.layers.begin(), opts.layers.end());
  for (const auto& e : log.events) {
    if (!wanted.count(e.action)) continue;
    if (!net.registry.find(e.user)) ++local.events_from_unselected_users;
    if (!windows.empty() && e.timestamp > windows.back().end()) {
      ++local.events_outside_windows;
    }
  }

  constexpr std::size_t kBatch = 64;
  for (const Action layer : opts.layers) {
    std::optional<GlobalIdf> gidf;
    if (opts.idf == IdfScope::Global) gidf = global_idf(log, net.registry, layer);
    WindowMerger merger(layer);
    for (std::size_t first = 0; first < windows.size(); first += kBatch) {
      const std::size_t count = std::min(kBatch, windows.size() - first);
      std::vector<LayerGraph> batch(count);
      // Coarse-grained parallelism over windows; the per-window kernel stays serial.
#pragma omp parallel for schedule(dynamic) num_threads(opts.threads > 0 ? opts.threads : 1)
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
        const auto& w = windows[first + static_cast<std::size_t>(k)];
        const auto vectors = build_user_vectors(log, net.registry, layer, w, gidf ? &*gidf : nullptr);
        batch[static_cast<std::size_t>(k)] = layer_window_graph(vectors, layer, KernelMode::Serial);
      }
      for (const auto& g : batch) merger.add(g);
    }
    net.layers.emplace(layer, merger.finish());
  }
  if (stats) *stats = local;
  return net;
}

void write_edge_list(const std::filesystem::path& path, const LayerGraph& g, const ActorRegistry& registry) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  // ids are already in name order, so map order is the sorted output order
  for (const auto& [key, attr] : g.edges) {
    out << registry.name(key.a) << '\t' << registry.name(key.b) << '\t' << fmt::format("{}", attr.weight) << '\t'
        << attr.co_actions << '\t' << attr.window_count << '\n';
  }
}

LayerGraph read_edge_list(const std::filesystem::path& path, Action layer, const ActorRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read edge list " + path.string());
  LayerGraph g;
  g.layer = layer;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string a, b;
    double w = 0.0;
    std::uint32_t co = 0, wc = 0;
    if (!(fields >> a >> b >> w >> co >> wc)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed edge record");
    }
    g.set_edge(registry.id(a), registry.id(b), EdgeAttr{w, co, wc});
  }
  return g;
}

}  // namespace mmcoord
