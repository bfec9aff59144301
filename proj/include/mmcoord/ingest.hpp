#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mmcoord/core.hpp"

namespace mmcoord {

struct ActionEvent {
  std::string user;
  Action action = Action::RTW;
  std::string item;
  double timestamp = 0.0;  // UTC seconds

  friend bool operator==(const ActionEvent&, const ActionEvent&) = default;
};

struct TimeSpan {
  double t_min = 0.0;
  double t_max = 0.0;
  double length() const { return t_max - t_min; }
};

/// Events sorted by (timestamp, user, action, item).
struct EventLog {
  std::vector<ActionEvent> events;

  /// Empty when the log has no events.
  std::optional<TimeSpan> time_span() const;
  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  void sort();
};

struct RecordError {
  std::size_t line = 0;
  std::string reason;
};

struct ParsedEvents {
  EventLog log;
  std::vector<RecordError> rejects;
  std::size_t lines_read = 0;
};

enum class EventSchema { Jsonl, Tsv };

EventSchema parse_schema(std::string_view id);

/// Reads one record per line. Record-level problems end up in `rejects` with
/// their line number; an unreadable file throws DataError.
ParsedEvents parse_events(const std::filesystem::path& path, EventSchema schema = EventSchema::Jsonl);
ParsedEvents parse_events(std::istream& in, EventSchema schema = EventSchema::Jsonl);

/// ISO-8601 (`2019-11-12T08:30:00Z`, optional fraction and offset) or epoch
/// seconds. Throws DataError when neither form parses.
double parse_timestamp(std::string_view s);

/// Lowercased host with scheme, credentials, port, path, query, fragment and a
/// leading "www." removed. Bare hosts are accepted so the function is idempotent.
std::string extract_domain(std::string_view url);

struct StopLists {
  std::set<std::string> hashtags;     // stored lowercased
  std::set<std::string> mentions;
  std::set<std::string> url_domains;  // stored lowercased

  bool stops_hashtag(std::string_view tag) const;
  bool stops_mention(std::string_view user) const;
  bool stops_domain(std::string_view domain) const;

  static StopLists from_files(const std::optional<std::filesystem::path>& hashtags,
                              const std::optional<std::filesystem::path>& mentions,
                              const std::optional<std::filesystem::path>& domains);
  /// Collection hashtags, party/leader accounts and non-target domains of the
  /// 2019 UK election collection.
  static StopLists election_2019();
};

/// Reads a one-entry-per-line list. Blank lines and comments (`#` then
/// whitespace or end of line) are skipped, so `#tag` is an entry.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

EventLog apply_stoplists(const EventLog& log, const StopLists& stop);

struct ActorSet {
  std::set<std::string> actors;
  std::array<std::set<std::string>, kNumActions> per_action_top;
};

/// Per action, the ceil(fraction * active users) users with the most events of
/// that type, ties broken by the lexicographically smaller id. `actors` is the
/// union over actions.
ActorSet select_users(const EventLog& log, double fraction);

}  // namespace mmcoord
