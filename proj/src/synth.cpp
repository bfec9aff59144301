#include "mmcoord/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "mmcoord/netbuild.hpp"

namespace mmcoord {

void SynthConfig::validate() const {
  std::size_t planted = 0;
  for (const auto& c : communities) {
    if (c.size < 2) throw ConfigError("planted communities need at least 2 members");
    planted += c.size;
  }
  if (planted > n_users) throw ConfigError("community sizes exceed n_users");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw ConfigError("noise_rate must be in [0, 1]");
  if (!(span > 0.0 && width > 0.0 && shift > 0.0)) throw ConfigError("span, width and shift must be positive");
  for (std::size_t l = 0; l < kNumActions; ++l) {
    if (!(activity[l] >= 0.0)) throw ConfigError("activity rates must be >= 0");
    if (activity[l] > 0.0 && global_pool[l] == 0) throw ConfigError("background activity needs a global pool");
    for (const auto& c : communities) {
      if (!(c.strength[l] >= 0.0)) throw ConfigError("coordination strength must be >= 0");
      if (!c.active[l] || c.strength[l] == 0.0) continue;
      // Draws within one window are distinct pool items.
      if (static_cast<double>(community_pool[l]) < std::ceil(c.strength[l])) {
        throw ConfigError(fmt::format("{} community pool ({}) is smaller than the {} distinct items per window",
                                      layer_name(kAllActions[l]), community_pool[l], std::ceil(c.strength[l])));
      }
      if (noise_rate > 0.0 && global_pool[l] == 0) throw ConfigError("noise needs a global pool");
    }
  }
}

std::string synth_user_name(std::size_t index) { return fmt::format("u{:05d}", index); }

namespace {

std::string pool_item(Action layer, std::optional<std::size_t> community, std::size_t k) {
  const std::string tag = community ? fmt::format("c{}", *community) : std::string("g");
  switch (layer) {
    case Action::RTW: return fmt::format("rt-{}-{}", tag, k);
    case Action::RPL: return fmt::format("rp-{}-{}", tag, k);
    case Action::MEN: return fmt::format("acct_{}_{}", tag, k);
    case Action::HST: return fmt::format("tag{}x{}", tag, k);
    case Action::URL: return fmt::format("{}-{}.synth.test", tag, k);
  }
  return {};
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  SynthOutput out;

  // Members are interleaved over user indices so community id is not a name prefix.
  std::vector<std::optional<std::size_t>> owner(cfg.n_users);
  {
    std::vector<std::size_t> order(cfg.n_users);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t next = 0;
    for (std::size_t c = 0; c < cfg.communities.size(); ++c) {
      for (std::size_t k = 0; k < cfg.communities[c].size; ++k) owner[order[next++]] = c;
    }
  }
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    if (owner[u]) out.truth.community_of.emplace(synth_user_name(u), *owner[u]);
  }
  for (const auto& c : cfg.communities) out.truth.active.push_back(c.active);

  const auto windows = window_slices(TimeSpan{cfg.start, cfg.start + cfg.span}, cfg.width, cfg.shift);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto emit = [&](std::size_t user, Action layer, std::string item, const Window& w) {
    const double stride = w.index + 1 == windows.size() ? w.width : std::min(cfg.shift, w.width);
    const double ts = std::floor(w.start + unit(rng) * stride);
    out.log.events.push_back({synth_user_name(user), layer, std::move(item), std::min(ts, w.end())});
  };

  for (const auto& w : windows) {
    for (std::size_t l = 0; l < kNumActions; ++l) {
      const Action layer = kAllActions[l];
      for (std::size_t u = 0; u < cfg.n_users; ++u) {
        if (cfg.activity[l] > 0.0) {
          std::poisson_distribution<int> bg(cfg.activity[l]);
          std::uniform_int_distribution<std::size_t> pick(0, cfg.global_pool[l] - 1);
          for (int e = bg(rng); e > 0; --e) emit(u, layer, pool_item(layer, std::nullopt, pick(rng)), w);
        }
        if (!owner[u]) continue;
        const auto c = *owner[u];
        const auto& pc = cfg.communities[c];
        if (!pc.active[l] || pc.strength[l] == 0.0) continue;
        std::poisson_distribution<int> planted(pc.strength[l]);
        std::vector<std::size_t> pool(cfg.community_pool[l]);
        const auto draws = std::min<std::size_t>(static_cast<std::size_t>(planted(rng)), pool.size());
        for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = k;
        // Partial Fisher-Yates: distinct community items for this window.
        for (std::size_t k = 0; k < draws; ++k) {
          std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
          std::swap(pool[k], pool[pick(rng)]);
          if (cfg.noise_rate > 0.0 && unit(rng) < cfg.noise_rate) {
            std::uniform_int_distribution<std::size_t> g(0, cfg.global_pool[l] - 1);
            emit(u, layer, pool_item(layer, std::nullopt, g(rng)), w);
          } else {
            emit(u, layer, pool_item(layer, c, pool[k]), w);
          }
        }
      }
    }
  }
  out.log.sort();
  return out;
}

void write_events_jsonl(const std::filesystem::path& path, const EventLog& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  for (const auto& e : log.events) {
    nlohmann::json rec{{"user", e.user},
                       {"action", std::string(to_token(e.action))},
                       {"item", e.item},
                       {"ts", static_cast<long long>(e.timestamp)}};
    f << rec.dump() << '\n';
  }
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth, std::size_t n_users) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto name = synth_user_name(u);
    const auto it = truth.community_of.find(name);
    f << name << '\t' << (it == truth.community_of.end() ? std::string("noise") : std::to_string(it->second)) << '\n';
  }
}

}  // namespace mmcoord
