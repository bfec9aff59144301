#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mmcoord/pipeline.hpp"

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
};

mmcoord::RunConfig resolve(const Globals& g) {
  auto cfg = mmcoord::load_config(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    if (cfg.synth) cfg.synth->seed = *g.seed;
  }
  if (g.jobs) {
    if (*g.jobs < 1) throw mmcoord::ConfigError("--jobs must be >= 1");
    cfg.build.threads = *g.jobs;
  }
  if (g.out) cfg.out = *g.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal coordinated-behaviour detection toolkit"};
  app.set_version_flag("--version", std::string(mmcoord::kVersion));
  app.require_subcommand(1);

  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", g.seed, "Overrides detection and synth seeds");
    sub->add_option("--jobs", g.jobs, "Worker thread cap");
    sub->add_option("--out", g.out, "Output directory");
  };

  auto* build = app.add_subcommand("build", "Build and filter the per-layer coordination networks");
  auto* detect = app.add_subcommand("detect", "Detect communities");
  auto* compare = app.add_subcommand("compare", "Compare two approaches");
  auto* characterize = app.add_subcommand("characterize", "Community and node metrics for a comparison");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic event log with planted communities");
  auto* report = app.add_subcommand("report", "Run the whole pipeline");
  for (auto* s : {build, detect, compare, characterize, synth, report}) add_globals(s);

  std::vector<std::string> modes;
  detect->add_option("--mode", modes, "mono, indi, unfl-nw, unfl-ec, unfl-sum, multi or intfl (default: config)");
  std::string ref, other;
  for (auto* s : {compare, characterize}) {
    s->add_option("--ref", ref, "Reference approach B (e.g. MULTI)");
    s->add_option("--other", other, "Other approach A (e.g. RTW)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve(g);
    nlohmann::json result;
    auto pairs = [&]() {
      if (ref.empty() != other.empty()) throw mmcoord::ConfigError("--ref and --other go together");
      if (!ref.empty()) return std::vector<std::pair<std::string, std::string>>{{ref, other}};
      if (cfg.comparisons.empty()) throw mmcoord::ConfigError("no comparison given (--ref/--other or comparison.pairs)");
      return cfg.comparisons;
    };
    if (*build) {
      result = mmcoord::cmd_build(cfg);
    } else if (*detect) {
      result = mmcoord::cmd_detect(cfg, modes.empty() ? cfg.modes : modes);
    } else if (*compare) {
      for (const auto& [r, o] : pairs()) result = mmcoord::cmd_compare(cfg, r, o);
    } else if (*characterize) {
      for (const auto& [r, o] : pairs()) result = mmcoord::cmd_characterize(cfg, r, o);
    } else if (*synth) {
      result = mmcoord::cmd_synth(cfg);
    } else if (*report) {
      result = mmcoord::cmd_report(cfg);
    }
    std::cout << result.dump() << '\n';
    return 0;
  } catch (const mmcoord::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const mmcoord::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const mmcoord::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
}
