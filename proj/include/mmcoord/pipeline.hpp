#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmcoord/filternet.hpp"
#include "mmcoord/netbuild.hpp"
#include "mmcoord/synth.hpp"

namespace mmcoord {

/// Every setting of a batch run. Relative paths resolve against the config
/// file's directory.
struct RunConfig {
  std::optional<std::filesystem::path> events;
  EventSchema schema = EventSchema::Jsonl;

  bool builtin_stoplists = false;
  std::optional<std::filesystem::path> stop_hashtags;
  std::optional<std::filesystem::path> stop_mentions;
  std::optional<std::filesystem::path> stop_domains;

  double fraction = 0.05;
  BuildOptions build;
  FilterConfig filter;

  double gamma = 1.0;
  double omega = 0.1;
  std::uint64_t seed = 42;
  Action mono_layer = Action::RTW;
  std::vector<std::string> modes{"indi", "unfl-nw", "unfl-ec", "unfl-sum", "multi", "intfl"};

  double theta = 0.5;
  std::size_t min_size = 0;
  /// (reference B, other A) scope pairs.
  std::vector<std::pair<std::string, std::string>> comparisons;

  double damping = 0.85;

  std::optional<SynthConfig> synth;

  std::filesystem::path out = "out";

  /// Paths as written in the config file, so the hash does not depend on
  /// where the file lives.
  nlohmann::json path_spec = nlohmann::json::object();

  /// Canonical form of every setting that affects outputs (not `out`, not
  /// thread counts); the config hash is taken over its serialization.
  nlohmann::json canonical() const;
  /// 16 hex digits of FNV-1a 64 over canonical().dump().
  std::string hash() const;
};

/// Throws ConfigError on unknown keys, bad values or missing referenced files.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

inline const std::vector<std::string> kDetectModes{"mono", "indi", "unfl-nw", "unfl-ec", "unfl-sum", "multi", "intfl"};

/// Each command writes under cfg.out and returns a summary record.
nlohmann::json cmd_synth(const RunConfig& cfg);
nlohmann::json cmd_build(const RunConfig& cfg);
nlohmann::json cmd_detect(const RunConfig& cfg, const std::vector<std::string>& modes);
nlohmann::json cmd_compare(const RunConfig& cfg, const std::string& ref, const std::string& other);
nlohmann::json cmd_characterize(const RunConfig& cfg, const std::string& ref, const std::string& other);
/// synth (when configured without an input log), build, detect, then every
/// configured comparison and characterization; writes report.jsonl.
nlohmann::json cmd_report(const RunConfig& cfg);

}  // namespace mmcoord
