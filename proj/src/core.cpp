#include "mmcoord/core.hpp"

#include <algorithm>
#include <cctype>

namespace mmcoord {

namespace {
constexpr std::array<std::string_view, kNumActions> kTokens = {"rtw", "rpl", "men", "hst", "url"};
constexpr std::array<std::string_view, kNumActions> kNames = {"RTW", "RPL", "MEN", "HST", "URL"};
}  // namespace

std::string_view to_token(Action a) { return kTokens[index_of(a)]; }

std::string_view layer_name(Action a) { return kNames[index_of(a)]; }

std::optional<Action> parse_action(std::string_view s) {
  const std::string lower = to_lower(s);
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (lower == kTokens[i]) return kAllActions[i];
  }
  return std::nullopt;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace mmcoord
