#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmcoord/ingest.hpp"

namespace mmcoord {

struct PlantedCommunity {
  std::size_t size = 0;
  std::array<bool, kNumActions> active{};
  /// Expected community-pool events per member per window, per layer.
  std::array<double, kNumActions> strength{};
};

struct SynthConfig {
  std::size_t n_users = 100;
  std::vector<PlantedCommunity> communities;
  /// Background events per user per window, per layer, drawn from the global pool.
  std::array<double, kNumActions> activity{};
  /// Probability that a planted event draws from the global pool instead.
  double noise_rate = 0.0;
  std::array<std::size_t, kNumActions> community_pool{};
  std::array<std::size_t, kNumActions> global_pool{};
  double start = 1573516800.0;  // 2019-11-12T00:00:00Z
  double span = 48 * 3600.0;
  double width = 6 * 3600.0;
  double shift = 5 * 3600.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent sizes, negative rates or pools too
  /// small for the requested strength.
  void validate() const;
};

struct GroundTruth {
  /// user -> community index; users absent from the map are noise.
  std::map<std::string, std::size_t> community_of;
  std::vector<std::array<bool, kNumActions>> active;
};

struct SynthOutput {
  EventLog log;
  GroundTruth truth;
};

/// Deterministic for a given config (seed included). Activity is planted
/// window by window with timestamps uniform inside each window's stride.
SynthOutput generate(const SynthConfig& cfg);

/// Users are named u00000, u00001, ... so name order is index order.
std::string synth_user_name(std::size_t index);

/// One JSON object per line with user, action, item and integer ts.
void write_events_jsonl(const std::filesystem::path& path, const EventLog& log);
/// `user<TAB>community` with `noise` for unplanted users.
void write_truth(const std::filesystem::path& path, const GroundTruth& truth, std::size_t n_users);

}  // namespace mmcoord
