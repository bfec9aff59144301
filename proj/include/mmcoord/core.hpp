#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mmcoord {

inline constexpr std::string_view kVersion = "0.3.1";

/// Co-action types. Each one becomes a layer of the multiplex network.
enum class Action : std::uint8_t { RTW = 0, RPL = 1, MEN = 2, HST = 3, URL = 4 };

inline constexpr std::size_t kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::RTW, Action::RPL, Action::MEN, Action::HST, Action::URL};

inline constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }

/// Lowercase token used in event files and output filenames.
std::string_view to_token(Action a);
/// Uppercase layer name used in reports.
std::string_view layer_name(Action a);
/// Accepts either the token or the layer name, case-insensitive.
std::optional<Action> parse_action(std::string_view s);

using ActorId = std::uint32_t;
using CommunityId = std::uint32_t;

// Error categories map onto CLI exit codes 1, 2 and 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace mmcoord
