#include "mmcoord/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "mmcoord/characterize.hpp"
#include "mmcoord/community.hpp"
#include "mmcoord/compare.hpp"

namespace mmcoord {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------- config

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + "." + it.key() + "'");
    }
  }
}

template <typename T>
T value_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

Action action_from(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("'" + where + "' must name a layer");
  const auto a = parse_action(v.get<std::string>());
  if (!a) throw ConfigError("unknown layer '" + v.get<std::string>() + "' in " + where);
  return *a;
}

template <typename T>
std::array<T, kNumActions> per_layer(const json& v, const std::string& where) {
  std::array<T, kNumActions> out{};
  try {
    if (v.is_number()) {
      out.fill(v.get<T>());
    } else if (v.is_object()) {
      for (auto it = v.begin(); it != v.end(); ++it) {
        const auto a = parse_action(it.key());
        if (!a) throw ConfigError("unknown layer '" + it.key() + "' in " + where);
        out[index_of(*a)] = it.value().get<T>();
      }
    } else {
      throw ConfigError("'" + where + "' must be a number or a per-layer object");
    }
  } catch (const json::exception&) {
    throw ConfigError("'" + where + "' has the wrong type");
  }
  return out;
}

std::array<bool, kNumActions> layer_flags(const json& v, const std::string& where) {
  std::array<bool, kNumActions> out{};
  if (v.is_string() && to_lower(v.get<std::string>()) == "all") {
    out.fill(true);
    return out;
  }
  if (!v.is_array()) throw ConfigError("'" + where + "' must be \"all\" or a list of layers");
  for (const auto& e : v) out[index_of(action_from(e, where))] = true;
  return out;
}

std::optional<fs::path> existing_path(const json& obj, const char* key, const std::string& where, const fs::path& base,
                                      json& spec) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  if (!obj.at(key).is_string()) throw ConfigError("'" + where + "." + key + "' must be a path");
  const std::string raw = obj.at(key).get<std::string>();
  spec[where + "." + key] = raw;
  fs::path p(raw);
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw ConfigError("referenced file does not exist: " + p.string());
  return p;
}

std::string canonical_scope(const std::string& s) {
  if (const auto a = parse_action(s)) return std::string(layer_name(*a));
  std::string up;
  for (const char c : s) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  static const std::set<std::string> known{"UNFL-NW", "UNFL-EC", "UNFL-SUM", "INTFL", "MULTI"};
  if (!known.count(up)) throw ConfigError("unknown scope '" + s + "'");
  return up;
}

SynthConfig synth_from_json(const json& s) {
  const std::string w = "synth";
  check_keys(s, w,
             {"n_users", "communities", "activity", "noise_rate", "community_pool", "global_pool", "start", "span_hours",
              "seed"});
  SynthConfig c;
  c.n_users = value_or<std::size_t>(s, "n_users", c.n_users, w);
  if (s.contains("communities")) {
    if (!s.at("communities").is_array()) throw ConfigError("'synth.communities' must be a list");
    for (const auto& e : s.at("communities")) {
      check_keys(e, "synth.communities[]", {"size", "layers", "strength"});
      PlantedCommunity pc;
      pc.size = value_or<std::size_t>(e, "size", 0, "synth.communities[]");
      pc.active = layer_flags(e.value("layers", json("all")), "synth.communities[].layers");
      pc.strength = per_layer<double>(e.value("strength", json(0.0)), "synth.communities[].strength");
      c.communities.push_back(pc);
    }
  }
  c.activity = per_layer<double>(s.value("activity", json(0.0)), "synth.activity");
  c.noise_rate = value_or<double>(s, "noise_rate", 0.0, w);
  c.community_pool = per_layer<std::size_t>(s.value("community_pool", json(20)), "synth.community_pool");
  c.global_pool = per_layer<std::size_t>(s.value("global_pool", json(5000)), "synth.global_pool");
  c.start = value_or<double>(s, "start", c.start, w);
  c.span = value_or<double>(s, "span_hours", c.span / 3600.0, w) * 3600.0;
  if (!s.contains("seed")) throw ConfigError("'synth.seed' is mandatory");
  c.seed = value_or<std::uint64_t>(s, "seed", 0, w);
  return c;
}

json synth_to_json(const SynthConfig& c) {
  json comms = json::array();
  for (const auto& pc : c.communities) {
    comms.push_back({{"size", pc.size}, {"active", pc.active}, {"strength", pc.strength}});
  }
  return {{"n_users", c.n_users},       {"communities", comms},       {"activity", c.activity},
          {"noise_rate", c.noise_rate}, {"community_pool", c.community_pool}, {"global_pool", c.global_pool},
          {"start", c.start},           {"span", c.span},             {"width", c.width},
          {"shift", c.shift},           {"seed", c.seed}};
}

}  // namespace

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
  check_keys(doc, "config",
             {"input", "stoplists", "selection", "network", "filter", "detection", "comparison", "characterize", "synth",
              "output"});
  RunConfig cfg;
  const json empty = json::object();
  auto section = [&](const char* name) -> const json& { return doc.contains(name) ? doc.at(name) : empty; };

  const auto& input = section("input");
  check_keys(input, "input", {"events", "schema"});
  cfg.events = existing_path(input, "events", "input", base_dir, cfg.path_spec);
  cfg.schema = parse_schema(value_or<std::string>(input, "schema", "jsonl", "input"));

  const auto& stop = section("stoplists");
  check_keys(stop, "stoplists", {"builtin", "hashtags", "mentions", "domains"});
  cfg.builtin_stoplists = value_or<bool>(stop, "builtin", false, "stoplists");
  cfg.stop_hashtags = existing_path(stop, "hashtags", "stoplists", base_dir, cfg.path_spec);
  cfg.stop_mentions = existing_path(stop, "mentions", "stoplists", base_dir, cfg.path_spec);
  cfg.stop_domains = existing_path(stop, "domains", "stoplists", base_dir, cfg.path_spec);

  const auto& sel = section("selection");
  check_keys(sel, "selection", {"fraction"});
  cfg.fraction = value_or<double>(sel, "fraction", cfg.fraction, "selection");
  if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0)) throw ConfigError("selection.fraction must be in (0, 1]");

  const auto& net = section("network");
  check_keys(net, "network", {"width_hours", "shift_hours", "idf", "layers"});
  cfg.build.width = value_or<double>(net, "width_hours", 6.0, "network") * 3600.0;
  cfg.build.shift = value_or<double>(net, "shift_hours", 5.0, "network") * 3600.0;
  if (!(cfg.build.width > 0.0 && cfg.build.shift > 0.0)) throw ConfigError("window width and shift must be positive");
  const auto idf = to_lower(value_or<std::string>(net, "idf", "window", "network"));
  if (idf == "window") {
    cfg.build.idf = IdfScope::Window;
  } else if (idf == "global") {
    cfg.build.idf = IdfScope::Global;
  } else {
    throw ConfigError("network.idf must be 'window' or 'global'");
  }
  if (net.contains("layers")) {
    const auto flags = layer_flags(net.at("layers"), "network.layers");
    cfg.build.layers.clear();
    for (const auto a : kAllActions) {
      if (flags[index_of(a)]) cfg.build.layers.push_back(a);
    }
    if (cfg.build.layers.empty()) throw ConfigError("network.layers is empty");
  }

  const auto& filt = section("filter");
  check_keys(filt, "filter", {"action_threshold", "max_nodes", "weight_threshold"});
  if (filt.contains("action_threshold") && !filt.at("action_threshold").is_null()) {
    const auto th = value_or<std::int64_t>(filt, "action_threshold", 1, "filter");
    if (th < 1) throw ConfigError("filter.action_threshold must be >= 1");
    cfg.filter.action_threshold = static_cast<std::uint32_t>(th);
  }
  cfg.filter.max_nodes = value_or<std::size_t>(filt, "max_nodes", cfg.filter.max_nodes, "filter");
  if (filt.contains("weight_threshold") && !filt.at("weight_threshold").is_null()) {
    const auto& wt = filt.at("weight_threshold");
    if (wt.is_string() && to_lower(wt.get<std::string>()) == "median") {
      cfg.filter.weight_rule = WeightRule::median();
    } else if (wt.is_number()) {
      cfg.filter.weight_rule = WeightRule::fixed(wt.get<double>());
    } else {
      throw ConfigError("filter.weight_threshold must be \"median\" or a number in (0, 1]");
    }
  }

  const auto& det = section("detection");
  check_keys(det, "detection", {"gamma", "omega", "seed", "modes", "mono_layer"});
  cfg.gamma = value_or<double>(det, "gamma", cfg.gamma, "detection");
  cfg.omega = value_or<double>(det, "omega", cfg.omega, "detection");
  if (!(cfg.gamma > 0.0)) throw ConfigError("detection.gamma must be positive");
  if (!(cfg.omega >= 0.0)) throw ConfigError("detection.omega must be >= 0");
  cfg.seed = value_or<std::uint64_t>(det, "seed", cfg.seed, "detection");
  if (det.contains("mono_layer")) cfg.mono_layer = action_from(det.at("mono_layer"), "detection.mono_layer");
  if (det.contains("modes")) {
    cfg.modes = value_or<std::vector<std::string>>(det, "modes", {}, "detection");
    for (auto& m : cfg.modes) {
      m = to_lower(m);
      if (std::find(kDetectModes.begin(), kDetectModes.end(), m) == kDetectModes.end()) {
        throw ConfigError("unknown detection mode '" + m + "'");
      }
    }
  }

  const auto& cmp = section("comparison");
  check_keys(cmp, "comparison", {"theta", "min_size", "pairs"});
  cfg.theta = value_or<double>(cmp, "theta", cfg.theta, "comparison");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw ConfigError("comparison.theta must be in [0, 1]");
  cfg.min_size = value_or<std::size_t>(cmp, "min_size", cfg.min_size, "comparison");
  if (cmp.contains("pairs")) {
    const auto pairs = value_or<std::vector<std::vector<std::string>>>(cmp, "pairs", {}, "comparison");
    for (const auto& p : pairs) {
      if (p.size() != 2) throw ConfigError("comparison.pairs entries are [reference, other]");
      cfg.comparisons.emplace_back(canonical_scope(p[0]), canonical_scope(p[1]));
    }
  }

  const auto& ch = section("characterize");
  check_keys(ch, "characterize", {"damping"});
  cfg.damping = value_or<double>(ch, "damping", cfg.damping, "characterize");
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) throw ConfigError("characterize.damping must be in (0, 1)");

  if (doc.contains("synth")) {
    cfg.synth = synth_from_json(doc.at("synth"));
    cfg.synth->width = cfg.build.width;
    cfg.synth->shift = cfg.build.shift;
    cfg.synth->validate();
  }

  const auto& out = section("output");
  check_keys(out, "output", {"dir"});
  if (out.contains("dir")) {
    fs::path p(value_or<std::string>(out, "dir", "out", "output"));
    cfg.out = p.is_relative() ? base_dir / p : p;
  } else {
    cfg.out = base_dir / "out";
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc, fs::absolute(path).parent_path());
}

json RunConfig::canonical() const {
  json layers = json::array();
  for (const auto a : build.layers) layers.push_back(std::string(layer_name(a)));
  json pairs = json::array();
  for (const auto& [r, o] : comparisons) pairs.push_back({r, o});
  json filt{{"max_nodes", filter.max_nodes},
            {"action_threshold", filter.action_threshold ? json(*filter.action_threshold) : json(nullptr)},
            {"weight_rule", filter.weight_rule.kind == WeightRule::Kind::Median ? json("median")
                                                                                 : json(filter.weight_rule.value)}};
  return {{"paths", path_spec},
          {"schema", schema == EventSchema::Jsonl ? "jsonl" : "tsv"},
          {"builtin_stoplists", builtin_stoplists},
          {"fraction", fraction},
          {"width", build.width},
          {"shift", build.shift},
          {"idf", build.idf == IdfScope::Window ? "window" : "global"},
          {"layers", layers},
          {"filter", filt},
          {"gamma", gamma},
          {"omega", omega},
          {"seed", seed},
          {"mono_layer", std::string(layer_name(mono_layer))},
          {"modes", modes},
          {"theta", theta},
          {"min_size", min_size},
          {"pairs", pairs},
          {"damping", damping},
          {"synth", synth ? synth_to_json(*synth) : json(nullptr)}};
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a64(canonical().dump())); }

// ---------------------------------------------------------------- output helpers

namespace {

json meta(const RunConfig& cfg) {
  return {{"record", "meta"}, {"tool", "mmcoord"}, {"version", std::string(kVersion)}, {"config_hash", cfg.hash()}};
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

class JsonlWriter {
 public:
  JsonlWriter(const fs::path& path, const RunConfig& cfg) : f_(open_out(path)) { write(meta(cfg)); }
  void write(const json& rec) { f_ << rec.dump() << '\n'; }

 private:
  std::ofstream f_;
};

std::ofstream open_tsv(const fs::path& path, const RunConfig& cfg) {
  auto f = open_out(path);
  f << "# mmcoord " << kVersion << " config " << cfg.hash() << '\n';
  return f;
}

std::string num(double v) { return fmt::format("{}", v); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

fs::path events_path(const RunConfig& cfg) {
  if (cfg.events) return *cfg.events;
  if (cfg.synth) return cfg.out / "synth" / "events.jsonl";
  throw ConfigError("no input events configured (set input.events or a synth section)");
}

StopLists stoplists(const RunConfig& cfg) {
  StopLists s = StopLists::from_files(cfg.stop_hashtags, cfg.stop_mentions, cfg.stop_domains);
  if (cfg.builtin_stoplists) {
    const auto b = StopLists::election_2019();
    s.hashtags.insert(b.hashtags.begin(), b.hashtags.end());
    s.mentions.insert(b.mentions.begin(), b.mentions.end());
    s.url_domains.insert(b.url_domains.begin(), b.url_domains.end());
  }
  return s;
}

double mean_weight(const LayerGraph& g) {
  if (g.edges.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [k, a] : g.edges) s += a.weight;
  return s / static_cast<double>(g.edges.size());
}

fs::path build_dir(const RunConfig& cfg) { return cfg.out / "build"; }

MultiplexNetwork load_network(const RunConfig& cfg) {
  const auto dir = build_dir(cfg);
  const auto names = dir / "actors.txt";
  if (!fs::exists(names)) throw DataError("no built network under " + dir.string() + " (run build first)");
  MultiplexNetwork net;
  net.registry = ActorRegistry(read_list_file(names));
  for (const auto a : cfg.build.layers) {
    net.layers.emplace(a, read_edge_list(dir / "layers" / (std::string(layer_name(a)) + ".tsv"), a, net.registry));
  }
  return net;
}

LayerGraph scope_graph(const MultiplexNetwork& net, const std::string& scope) {
  if (const auto a = parse_action(scope)) return net.layer(*a);
  if (scope == "UNFL-NW") return flatten_union(net, FlattenStrategy::NotWeighted).graph;
  if (scope == "UNFL-EC") return flatten_union(net, FlattenStrategy::EdgeCount).graph;
  if (scope == "UNFL-SUM") return flatten_union(net, FlattenStrategy::Sum).graph;
  if (scope == "INTFL") return flatten_intersection(net).graph;
  throw ConfigError("scope " + scope + " has no single graph");
}

fs::path partition_path(const RunConfig& cfg, const std::string& scope) {
  return cfg.out / "detect" / "partitions" / (scope + ".tsv");
}

}  // namespace

// ---------------------------------------------------------------- synth

json cmd_synth(const RunConfig& cfg) {
  if (!cfg.synth) throw ConfigError("config has no synth section");
  const auto gen = generate(*cfg.synth);
  const auto dir = cfg.out / "synth";
  fs::create_directories(dir);
  write_events_jsonl(dir / "events.jsonl", gen.log);
  write_truth(dir / "truth.tsv", gen.truth, cfg.synth->n_users);
  json summary{{"record", "synth"},
               {"events", gen.log.size()},
               {"users", cfg.synth->n_users},
               {"planted_users", gen.truth.community_of.size()},
               {"communities", cfg.synth->communities.size()}};
  JsonlWriter w(dir / "summary.jsonl", cfg);
  w.write(summary);
  return summary;
}

// ---------------------------------------------------------------- build

json cmd_build(const RunConfig& cfg) {
  const auto parsed = parse_events(events_path(cfg), cfg.schema);
  const EventLog kept = apply_stoplists(parsed.log, stoplists(cfg));
  ActorSet actors;
  if (!kept.empty()) actors = select_users(kept, cfg.fraction);
  BuildStats stats;
  const MultiplexNetwork raw = build_multiplex(kept, actors, cfg.build, &stats);

  MultiplexNetwork net;
  net.registry = raw.registry;
  net.actors = raw.actors;
  std::vector<FilterReport> reports;
  for (const auto a : cfg.build.layers) {
    FilterReport rep;
    net.layers.emplace(a, filter_layer(raw.layer(a), cfg.filter, &rep));
    reports.push_back(rep);
  }

  const auto dir = build_dir(cfg);
  fs::create_directories(dir / "layers");
  {
    auto f = open_out(dir / "actors.txt");
    for (const auto& n : net.registry.names()) f << n << '\n';
  }
  for (const auto a : cfg.build.layers) {
    write_edge_list(dir / "layers" / (std::string(layer_name(a)) + ".tsv"), net.layer(a), net.registry);
  }
  {
    auto f = open_tsv(dir / "rejects.tsv", cfg);
    f << "line\treason\n";
    for (const auto& r : parsed.rejects) f << r.line << '\t' << r.reason << '\n';
  }

  json input{{"record", "input"},
             {"lines_read", parsed.lines_read},
             {"rejected", parsed.rejects.size()},
             {"events", parsed.log.size()},
             {"events_after_stoplists", kept.size()},
             {"selected_users", net.registry.size()},
             {"windows", stats.windows},
             {"events_outside_windows", stats.events_outside_windows},
             {"events_from_unselected_users", stats.events_from_unselected_users}};
  JsonlWriter fr(dir / "filter_report.jsonl", cfg);
  fr.write(input);
  json layers = json::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& rep = reports[k];
    const auto& g = net.layer(cfg.build.layers[k]);
    json rec{{"record", "layer"},
             {"layer", std::string(layer_name(cfg.build.layers[k]))},
             {"nodes_raw", rep.nodes_before},
             {"edges_raw", rep.edges_before},
             {"th_a", rep.th_a},
             {"nodes_after_actions", rep.nodes_after_actions},
             {"edges_after_actions", rep.edges_after_actions},
             {"th_w", opt(rep.th_w)},
             {"nodes", g.num_nodes()},
             {"edges", g.num_edges()},
             {"mean_weight", mean_weight(g)}};
    if (!rep.warning.empty()) rec["warning"] = rep.warning;
    fr.write(rec);
    layers.push_back(rec);
  }

  JsonlWriter cov(dir / "coverage.jsonl", cfg);
  for (const auto li : cfg.build.layers) {
    for (const auto lj : cfg.build.layers) {
      if (li == lj) continue;
      json rec{{"record", "coverage"}, {"from", std::string(layer_name(li))}, {"to", std::string(layer_name(lj))}};
      rec["actor_coverage"] = net.layer(li).nodes.empty() ? json(nullptr) : json(actor_coverage(net, li, lj));
      rec["edge_coverage"] = net.layer(li).edges.empty() ? json(nullptr) : json(edge_coverage(net, li, lj));
      rec["degree_pearson"] = opt(pearson_degree_correlation(net, li, lj));
      cov.write(rec);
    }
  }
  return {{"record", "build"}, {"input", input}, {"layers", layers}};
}

// ---------------------------------------------------------------- detect

json cmd_detect(const RunConfig& cfg, const std::vector<std::string>& modes) {
  const auto net = load_network(cfg);
  std::vector<std::string> scopes;
  auto add = [&](const std::string& s) {
    if (std::find(scopes.begin(), scopes.end(), s) == scopes.end()) scopes.push_back(s);
  };
  for (const auto& raw : modes) {
    const auto m = to_lower(raw);
    if (m == "mono") {
      add(std::string(layer_name(cfg.mono_layer)));
    } else if (m == "indi") {
      for (const auto a : cfg.build.layers) add(std::string(layer_name(a)));
    } else if (m == "unfl-nw" || m == "unfl-ec" || m == "unfl-sum" || m == "intfl" || m == "multi") {
      add(canonical_scope(m));
    } else {
      throw ConfigError("unknown detection mode '" + raw + "'");
    }
  }

  const LouvainOptions opts{cfg.gamma, cfg.seed};
  fs::create_directories(cfg.out / "detect" / "partitions");
  JsonlWriter sum(cfg.out / "detect" / "summary.jsonl", cfg);
  json records = json::array();
  for (const auto& scope : scopes) {
    json rec{{"record", "scope"}, {"scope", scope}};
    if (scope == "MULTI") {
      std::size_t layer_nodes = 0;
      for (const auto& [a, g] : net.layers) layer_nodes += g.num_nodes();
      MultiplexPartition mp;
      mp.layers = net.layer_ids();
      mp.gamma = cfg.gamma;
      mp.omega = cfg.omega;
      if (layer_nodes > 0) mp = generalized_louvain(net, cfg.omega, opts);
      write_partition(partition_path(cfg, scope), mp, net.registry);
      rec["layer_nodes"] = layer_nodes;
      rec["communities"] = mp.num_communities();
      std::size_t above = 0;
      for (const auto& c : mp.actor_communities()) above += c.size() > cfg.min_size ? 1 : 0;
      rec["communities_above_min"] = above;
      rec["modularity"] = layer_nodes > 0 ? multislice_modularity(net, mp, cfg.gamma, cfg.omega) : 0.0;
    } else {
      const auto g = scope_graph(net, scope);
      Partition p;
      p.gamma = cfg.gamma;
      if (g.num_nodes() > 0) p = louvain(g, opts);
      p.scope = scope;
      write_partition(partition_path(cfg, scope), p, net.registry);
      std::size_t above = 0;
      for (const auto& c : p.communities()) above += c.size() > cfg.min_size ? 1 : 0;
      rec["nodes"] = g.num_nodes();
      rec["edges"] = g.num_edges();
      rec["mean_weight"] = mean_weight(g);
      rec["communities"] = p.num_communities();
      rec["communities_above_min"] = above;
      rec["modularity"] = modularity(g, p, cfg.gamma);
    }
    sum.write(rec);
    records.push_back(rec);
  }
  return {{"record", "detect"}, {"scopes", records}};
}

// ---------------------------------------------------------------- compare

namespace {

struct Side {
  std::string scope;
  std::string graph_id;
  Partition part;
  LayerGraph graph;
};

Side load_side(const RunConfig& cfg, const MultiplexNetwork& net, const std::string& scope,
               const std::string& counterpart) {
  Side s;
  s.scope = scope;
  if (scope == "MULTI") {
    const auto layer = parse_action(counterpart);
    if (!layer) throw ConfigError("scope mismatch: MULTI is compared through its restriction to a layer, not " + counterpart);
    const auto mp = read_multiplex_partition(partition_path(cfg, scope), net.registry);
    s.part = restrict_to_layer(mp, *layer);
    s.graph = net.layer(*layer);
    s.graph_id = std::string(layer_name(*layer));
  } else {
    s.part = read_partition(partition_path(cfg, scope), net.registry);
    s.graph = scope_graph(net, scope);
    s.graph_id = scope;
  }
  return s;
}

struct Comparison {
  Side a;  // other
  Side b;  // reference
  OverlapMatrix o;
  MatchResult m;
  CommunityLabels labels;
  std::map<ActorId, Label> nodes;
  std::optional<double> nmi_value;
};

Comparison run_comparison(const RunConfig& cfg, const MultiplexNetwork& net, const std::string& ref,
                          const std::string& other) {
  Comparison c;
  c.b = load_side(cfg, net, ref, other);
  c.a = load_side(cfg, net, other, ref);
  c.o = overlap_matrix(CommunitySet::from_partition(c.a.part, other), CommunitySet::from_partition(c.b.part, ref),
                       cfg.min_size);
  c.m = hungarian_match(c.o);
  c.labels = label_communities(c.o, c.m, cfg.theta);
  c.nodes = label_nodes(c.o.a, c.o.b, c.m);
  try {
    c.nmi_value = nmi(c.a.part, c.b.part, cfg.min_size);
  } catch (const DataError&) {
    c.nmi_value.reset();
  }
  return c;
}

std::string pair_dir_name(const std::string& ref, const std::string& other) { return ref + "_vs_" + other; }

}  // namespace

json cmd_compare(const RunConfig& cfg, const std::string& ref_raw, const std::string& other_raw) {
  const auto ref = canonical_scope(ref_raw);
  const auto other = canonical_scope(other_raw);
  const auto net = load_network(cfg);
  const auto c = run_comparison(cfg, net, ref, other);
  const auto dir = cfg.out / "compare" / pair_dir_name(ref, other);

  {
    auto f = open_tsv(dir / "overlap.tsv", cfg);
    f << ref << '\\' << other;
    for (const auto id : c.o.a.ids) f << '\t' << id;
    f << '\n';
    for (std::size_t r = 0; r < c.o.rows(); ++r) {
      f << c.o.b.ids[r];
      for (std::size_t col = 0; col < c.o.cols(); ++col) f << '\t' << num(c.o.at(r, col));
      f << '\n';
    }
  }

  std::vector<std::optional<std::size_t>> partner_a(c.o.cols()), partner_b(c.o.rows());
  for (const auto& [i, j] : c.m.pairs) {
    partner_a[i] = j;
    partner_b[j] = i;
  }
  {
    JsonlWriter w(dir / "community_labels.jsonl", cfg);
    for (std::size_t i = 0; i < c.o.cols(); ++i) {
      w.write({{"side", "A"},
               {"approach", other},
               {"community", c.o.a.ids[i]},
               {"size", c.o.a.members[i].size()},
               {"label", std::string(to_string(c.labels.a[i]))},
               {"matched", partner_a[i] ? json(c.o.b.ids[*partner_a[i]]) : json(nullptr)},
               {"overlap", partner_a[i] ? json(c.o.overlap(i, *partner_a[i])) : json(nullptr)}});
    }
    for (std::size_t j = 0; j < c.o.rows(); ++j) {
      w.write({{"side", "B"},
               {"approach", ref},
               {"community", c.o.b.ids[j]},
               {"size", c.o.b.members[j].size()},
               {"label", std::string(to_string(c.labels.b[j]))},
               {"matched", partner_b[j] ? json(c.o.a.ids[*partner_b[j]]) : json(nullptr)},
               {"overlap", partner_b[j] ? json(c.o.overlap(*partner_b[j], j)) : json(nullptr)}});
    }
  }
  std::size_t n_lost = 0, n_common = 0, n_gained = 0;
  {
    auto f = open_tsv(dir / "node_labels.tsv", cfg);
    f << "user\tlabel\n";
    for (const auto& [v, l] : c.nodes) {
      f << net.registry.name(v) << '\t' << to_string(l) << '\n';
      n_lost += l == Label::Lost;
      n_common += l == Label::Common;
      n_gained += l == Label::Gained;
    }
  }
  json summary{{"record", "comparison"},
               {"ref", ref},
               {"other", other},
               {"ref_scope", c.b.part.scope},
               {"other_scope", c.a.part.scope},
               {"theta", cfg.theta},
               {"min_size", cfg.min_size},
               {"k", c.o.cols()},
               {"k_prime", c.o.rows()},
               {"lost", c.labels.lost()},
               {"common_a", c.labels.common_a()},
               {"common_b", c.labels.common_b()},
               {"gained", c.labels.gained()},
               {"nodes_lost", n_lost},
               {"nodes_common", n_common},
               {"nodes_gained", n_gained},
               {"matched_overlap_total", c.m.total},
               {"nmi", opt(c.nmi_value)},
               {"nmi_normalization", "arithmetic"}};
  JsonlWriter w(dir / "summary.jsonl", cfg);
  w.write(summary);
  return summary;
}

// ---------------------------------------------------------------- characterize

json cmd_characterize(const RunConfig& cfg, const std::string& ref_raw, const std::string& other_raw) {
  const auto ref = canonical_scope(ref_raw);
  const auto other = canonical_scope(other_raw);
  const auto net = load_network(cfg);
  const auto c = run_comparison(cfg, net, ref, other);
  const auto dir = cfg.out / "characterize" / pair_dir_name(ref, other);
  const auto wa = WeightedGraph::from_layer(c.a.graph);
  const auto wb = WeightedGraph::from_layer(c.b.graph);

  std::vector<CommunityMetrics> ma, mb;
  for (const auto& mem : c.o.a.members) ma.push_back(community_metrics(wa, mem));
  for (const auto& mem : c.o.b.members) mb.push_back(community_metrics(wb, mem));

  {
    JsonlWriter w(dir / "community_metrics.jsonl", cfg);
    auto emit = [&](const char* side, const std::string& approach, CommunityId id, const CommunityMetrics& m) {
      w.write({{"side", side},
               {"approach", approach},
               {"community", id},
               {"size", m.size},
               {"density", m.density},
               {"avg_degree", m.avg_degree},
               {"avg_weight", m.avg_weight},
               {"avg_clustering", m.avg_clustering},
               {"conductance", opt(m.conductance)},
               {"assortativity", m.assortativity},
               {"assortativity_defined", m.assortativity_defined}});
    };
    for (std::size_t i = 0; i < ma.size(); ++i) emit("A", other, c.o.a.ids[i], ma[i]);
    for (std::size_t j = 0; j < mb.size(); ++j) emit("B", ref, c.o.b.ids[j], mb[j]);
  }

  // Matched pairs, with the common ones numbered for the starplot and PCA keys.
  std::vector<std::pair<std::size_t, std::size_t>> common_pairs;
  std::optional<double> mean_cos;
  {
    auto f = open_tsv(dir / "cosine.tsv", cfg);
    f << "a_community\tb_community\toverlap\tlabel\tcosine\n";
    double sum = 0.0;
    for (const auto& [i, j] : c.m.pairs) {
      const double cs = metric_cosine(ma[i], mb[j]);
      f << c.o.a.ids[i] << '\t' << c.o.b.ids[j] << '\t' << num(c.o.overlap(i, j)) << '\t'
        << to_string(c.labels.a[i]) << '\t' << num(cs) << '\n';
      if (c.labels.a[i] == Label::Common) {
        common_pairs.emplace_back(i, j);
        sum += cs;
      }
    }
    if (!common_pairs.empty()) mean_cos = sum / static_cast<double>(common_pairs.size());
  }

  {
    std::array<double, kNumCommunityMetrics> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    auto widen = [&](const CommunityMetrics& m) {
      const auto v = m.vector();
      for (std::size_t k = 0; k < v.size(); ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    };
    for (const auto& m : ma) widen(m);
    for (const auto& m : mb) widen(m);
    auto f = open_tsv(dir / "starplot.tsv", cfg);
    f << "pair\tside\tcommunity";
    for (const auto n : kCommunityMetricNames) f << '\t' << n;
    f << '\n';
    auto row = [&](std::size_t pair, const char* side, CommunityId id, const CommunityMetrics& m) {
      f << pair << '\t' << side << '\t' << id;
      const auto v = m.vector();
      for (std::size_t k = 0; k < v.size(); ++k) f << '\t' << num(hi[k] > lo[k] ? (v[k] - lo[k]) / (hi[k] - lo[k]) : 0.0);
      f << '\n';
    };
    for (std::size_t p = 0; p < common_pairs.size(); ++p) {
      row(p, "A", c.o.a.ids[common_pairs[p].first], ma[common_pairs[p].first]);
      row(p, "B", c.o.b.ids[common_pairs[p].second], mb[common_pairs[p].second]);
    }
  }

  json warnings = json::array();
  json explained = json::array();
  {
    std::vector<std::array<double, kNumCommunityMetrics>> vecs;
    for (const auto& m : ma) vecs.push_back(m.vector());
    for (const auto& m : mb) vecs.push_back(m.vector());
    auto f = open_tsv(dir / "pca.tsv", cfg);
    f << "community_id\tlayer\tpc1\tpc2\tcluster_color_key\n";
    std::vector<std::string> keys(vecs.size(), "-");
    for (std::size_t p = 0; p < common_pairs.size(); ++p) {
      keys[common_pairs[p].first] = fmt::format("pair{}", p);
      keys[ma.size() + common_pairs[p].second] = fmt::format("pair{}", p);
    }
    if (vecs.size() < 3) {
      warnings.push_back("PCA skipped: fewer than 3 communities");
    } else {
      try {
        const auto pca = pca_project(vecs);
        for (const auto& wmsg : pca.warnings) warnings.push_back(wmsg);
        for (const double r : pca.explained_ratio) explained.push_back(r);
        for (std::size_t k = 0; k < vecs.size(); ++k) {
          const bool is_a = k < ma.size();
          const auto id = is_a ? c.o.a.ids[k] : c.o.b.ids[k - ma.size()];
          f << id << '\t' << (is_a ? other : ref) << '\t' << num(pca.coords[k][0]) << '\t' << num(pca.coords[k][1])
            << '\t' << keys[k] << '\n';
        }
      } catch (const DataError& e) {
        warnings.push_back(std::string("PCA skipped: ") + e.what());
      }
    }
  }

  // Node metrics on the graph each label derives from: lost -> A, common and gained -> B.
  std::optional<NodeMetricsReport> na, nb;
  auto needs = [&](Label l) {
    return std::any_of(c.nodes.begin(), c.nodes.end(), [l](const auto& kv) { return kv.second == l; });
  };
  if (needs(Label::Lost)) na = node_metrics(wa, cfg.damping, KernelMode::Parallel, cfg.build.threads);
  if (needs(Label::Common) || needs(Label::Gained)) nb = node_metrics(wb, cfg.damping, KernelMode::Parallel, cfg.build.threads);

  constexpr std::array<Label, 3> kGroups{Label::Lost, Label::Common, Label::Gained};
  std::array<std::array<std::vector<double>, kNumNodeMetrics>, 3> samples;
  {
    auto f = open_tsv(dir / "node_metrics.tsv", cfg);
    f << "user\tlabel\tgraph";
    for (const auto n : kNodeMetricNames) f << '\t' << n;
    f << '\n';
    for (const auto& [v, l] : c.nodes) {
      const bool on_a = l == Label::Lost;
      const auto& g = on_a ? wa : wb;
      const auto& rep = on_a ? na : nb;
      const auto idx = g.local_index(v);
      if (!idx) throw InvariantError("labelled node missing from its graph");
      const auto vals = rep->nodes[*idx].vector();
      f << net.registry.name(v) << '\t' << to_string(l) << '\t' << (on_a ? c.a.graph_id : c.b.graph_id);
      const auto gi = static_cast<std::size_t>(std::find(kGroups.begin(), kGroups.end(), l) - kGroups.begin());
      for (std::size_t k = 0; k < vals.size(); ++k) {
        f << '\t' << num(vals[k]);
        samples[gi][k].push_back(vals[k]);
      }
      f << '\n';
    }
  }
  {
    JsonlWriter w(dir / "tests.jsonl", cfg);
    constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs{{{0, 1}, {1, 2}, {0, 2}}};
    for (std::size_t k = 0; k < kNumNodeMetrics; ++k) {
      for (const auto& [x, y] : kPairs) {
        json rec{{"record", "test"},
                 {"metric", std::string(kNodeMetricNames[k])},
                 {"x", std::string(to_string(kGroups[x]))},
                 {"y", std::string(to_string(kGroups[y]))},
                 {"n_x", samples[x][k].size()},
                 {"n_y", samples[y][k].size()}};
        try {
          const auto t = brunner_munzel(samples[x][k], samples[y][k]);
          rec["statistic"] = t.statistic;
          rec["df"] = t.df;
          rec["p_value"] = t.p_value;
          rec["band"] = std::string(significance_band(t.p_value));
        } catch (const DataError& e) {
          rec["error"] = e.what();
        }
        w.write(rec);
      }
    }
  }

  json summary{{"record", "characterize"},
               {"ref", ref},
               {"other", other},
               {"communities_a", ma.size()},
               {"communities_b", mb.size()},
               {"common_pairs", common_pairs.size()},
               {"mean_cosine_common", opt(mean_cos)},
               {"pca_explained_ratio", explained},
               {"eigenvector_partial_a", na ? json(na->eigenvector_partial) : json(nullptr)},
               {"eigenvector_partial_b", nb ? json(nb->eigenvector_partial) : json(nullptr)},
               {"warnings", warnings}};
  JsonlWriter w(dir / "summary.jsonl", cfg);
  w.write(summary);
  return summary;
}

// ---------------------------------------------------------------- report

namespace {

std::vector<std::pair<std::string, std::string>> default_comparisons(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto has = [&](const char* m) { return std::find(cfg.modes.begin(), cfg.modes.end(), m) != cfg.modes.end(); };
  const std::string mono(layer_name(cfg.mono_layer));
  if (has("indi")) {
    for (const auto a : cfg.build.layers) {
      if (a != cfg.mono_layer) out.emplace_back(mono, std::string(layer_name(a)));
    }
  }
  for (const char* multi : {"unfl-sum", "multi"}) {
    if (!has(multi) || !has("indi")) continue;
    for (const auto a : cfg.build.layers) out.emplace_back(canonical_scope(multi), std::string(layer_name(a)));
  }
  return out;
}

}  // namespace

json cmd_report(const RunConfig& cfg) {
  std::vector<json> stages;
  if (cfg.synth && !cfg.events) stages.push_back(cmd_synth(cfg));
  stages.push_back(cmd_build(cfg));
  stages.push_back(cmd_detect(cfg, cfg.modes));
  const auto pairs = cfg.comparisons.empty() ? default_comparisons(cfg) : cfg.comparisons;
  for (const auto& [r, o] : pairs) {
    stages.push_back(cmd_compare(cfg, r, o));
    stages.push_back(cmd_characterize(cfg, r, o));
  }
  JsonlWriter w(cfg.out / "report.jsonl", cfg);
  w.write({{"record", "config"}, {"config", cfg.canonical()}});
  for (const auto& s : stages) w.write(s);
  return {{"record", "report"}, {"stages", stages.size()}};
}

}  // namespace mmcoord
