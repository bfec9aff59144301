#include "mmcoord/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace mmcoord {

std::optional<TimeSpan> EventLog::time_span() const {
  if (events.empty()) return std::nullopt;
  // sorted by timestamp
  return TimeSpan{events.front().timestamp, events.back().timestamp};
}

void EventLog::sort() {
  std::sort(events.begin(), events.end(), [](const ActionEvent& a, const ActionEvent& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.user != b.user) return a.user < b.user;
    if (a.action != b.action) return a.action < b.action;
    return a.item < b.item;
  });
}

EventSchema parse_schema(std::string_view id) {
  const std::string lower = to_lower(id);
  if (lower == "jsonl") return EventSchema::Jsonl;
  if (lower == "tsv") return EventSchema::Tsv;
  throw ConfigError("unknown event schema '" + std::string(id) + "' (expected jsonl or tsv)");
}

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's algorithm).
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool read_int(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += digits;
  out = v;
  return true;
}

std::optional<double> parse_iso8601(std::string_view s) {
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_int(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_int(s, pos, 2, month) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_int(s, pos, 2, day)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  double fraction = 0.0;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    ++pos;
    if (!read_int(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':') return std::nullopt;
    if (!read_int(s, pos, 2, minute)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!read_int(s, pos, 2, second)) return std::nullopt;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        double scale = 0.1;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
          fraction += (s[pos] - '0') * scale;
          scale /= 10.0;
          ++pos;
        }
        if (pos == start) return std::nullopt;
      }
    }
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  }
  long long offset_seconds = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      int oh = 0, om = 0;
      if (!read_int(s, pos, 2, oh)) return std::nullopt;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size() && !read_int(s, pos, 2, om)) return std::nullopt;
      offset_seconds = sign * (oh * 3600LL + om * 60LL);
    }
  }
  if (pos != s.size()) return std::nullopt;
  const long long days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const long long secs = days * 86400LL + hour * 3600LL + minute * 60LL + second - offset_seconds;
  return static_cast<double>(secs) + fraction;
}

std::string normalize_item(Action action, std::string_view raw) {
  std::string item = trim(raw);
  switch (action) {
    case Action::HST:
      if (!item.empty() && item.front() == '#') item.erase(0, 1);
      return to_lower(item);
    case Action::MEN:
      if (!item.empty() && item.front() == '@') item.erase(0, 1);
      return item;
    case Action::URL:
      return extract_domain(item);
    default:
      return item;
  }
}

struct RawRecord {
  std::string user;
  std::string action;
  std::string item;
  std::string ts;
};

RawRecord read_jsonl_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw DataError("not a JSON object");
  RawRecord rec;
  auto str_field = [&](const char* name) -> std::string {
    const auto it = j.find(name);
    if (it == j.end()) throw DataError(std::string("missing field '") + name + "'");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (it->is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << it->get<double>();
      return os.str();
    }
    throw DataError(std::string("field '") + name + "' is not a string or number");
  };
  rec.user = str_field("user");
  rec.action = str_field("action");
  rec.item = str_field("item");
  rec.ts = str_field("ts");
  return rec;
}

RawRecord read_tsv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 4) throw DataError("expected 4 tab-separated fields, got " + std::to_string(fields.size()));
  return RawRecord{fields[0], fields[1], fields[2], fields[3]};
}

}  // namespace

double parse_timestamp(std::string_view raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw DataError("empty timestamp");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(value)) return value;
  if (auto iso = parse_iso8601(s)) return *iso;
  throw DataError("unparseable timestamp '" + s + "'");
}

std::string extract_domain(std::string_view url) {
  std::string s = to_lower(trim(url));
  if (s.empty()) throw DataError("empty URL");
  if (s.find_first_of(" \t\"<>\\") != std::string::npos) throw DataError("unparseable URL '" + s + "'");

  if (const auto sep = s.find("://"); sep != std::string::npos) {
    const std::string_view scheme(s.data(), sep);
    const bool scheme_ok = !scheme.empty() && std::all_of(scheme.begin(), scheme.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
    });
    if (!scheme_ok) throw DataError("unparseable URL '" + s + "'");
    s.erase(0, sep + 3);
  } else if (s.rfind("//", 0) == 0) {
    s.erase(0, 2);
  }

  s = s.substr(0, s.find_first_of("/?#"));
  if (const auto at = s.rfind('@'); at != std::string::npos) s.erase(0, at + 1);
  if (const auto colon = s.rfind(':'); colon != std::string::npos) {
    const std::string_view port(s.data() + colon + 1, s.size() - colon - 1);
    if (!std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw DataError("unparseable URL '" + std::string(url) + "'");
    }
    s.erase(colon);
  }
  while (!s.empty() && s.back() == '.') s.pop_back();
  while (s.rfind("www.", 0) == 0) s.erase(0, 4);

  if (s.empty()) throw DataError("URL without host '" + std::string(url) + "'");
  bool prev_dot = true;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok || (c == '.' && prev_dot)) throw DataError("unparseable URL '" + std::string(url) + "'");
    prev_dot = c == '.';
  }
  return s;
}

ParsedEvents parse_events(std::istream& in, EventSchema schema) {
  ParsedEvents out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.lines_read;
    try {
      const RawRecord rec = schema == EventSchema::Jsonl ? read_jsonl_record(line) : read_tsv_record(line);
      ActionEvent ev;
      ev.user = trim(rec.user);
      if (ev.user.empty()) throw DataError("empty user");
      const auto action = parse_action(trim(rec.action));
      if (!action) throw DataError("unknown action token '" + rec.action + "'");
      ev.action = *action;
      ev.item = normalize_item(ev.action, rec.item);
      if (ev.item.empty()) throw DataError("empty item");
      ev.timestamp = parse_timestamp(rec.ts);
      out.log.events.push_back(std::move(ev));
    } catch (const DataError& e) {
      out.rejects.push_back({line_no, e.what()});
    }
  }
  out.log.sort();
  return out;
}

ParsedEvents parse_events(const std::filesystem::path& path, EventSchema schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read event file " + path.string());
  return parse_events(in, schema);
}

bool StopLists::stops_hashtag(std::string_view tag) const { return hashtags.count(to_lower(tag)) > 0; }

bool StopLists::stops_mention(std::string_view user) const { return mentions.count(std::string(user)) > 0; }

bool StopLists::stops_domain(std::string_view domain) const { return url_domains.count(to_lower(domain)) > 0; }

std::vector<std::string> read_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read list file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = trim(line);
    // "#Tag" is an entry; a comment needs whitespace (or nothing) after '#'.
    if (entry.empty() || (entry.front() == '#' && (entry.size() == 1 || std::isspace(static_cast<unsigned char>(entry[1])))))
      continue;
    out.push_back(entry);
  }
  return out;
}

StopLists StopLists::from_files(const std::optional<std::filesystem::path>& hashtags,
                                const std::optional<std::filesystem::path>& mentions,
                                const std::optional<std::filesystem::path>& domains) {
  StopLists s;
  if (hashtags) {
    for (auto& h : read_list_file(*hashtags)) {
      if (!h.empty() && h.front() == '#') h.erase(0, 1);
      s.hashtags.insert(to_lower(h));
    }
  }
  if (mentions) {
    for (auto& m : read_list_file(*mentions)) {
      if (!m.empty() && m.front() == '@') m.erase(0, 1);
      s.mentions.insert(m);
    }
  }
  if (domains) {
    for (const auto& d : read_list_file(*domains)) s.url_domains.insert(to_lower(d));
  }
  return s;
}

StopLists StopLists::election_2019() {
  StopLists s;
  for (const char* h : {"GE2019", "GeneralElection19", "GeneralElection2019", "VoteLabour", "VoteLabour2019",
                        "ForTheMany", "ForTheManyNotTheFew", "ChangeIsComing", "RealChange", "VoteConservative",
                        "VoteConservative2019", "BackBoris", "GetBrexitDone"}) {
    s.hashtags.insert(to_lower(h));
  }
  for (const char* m : {"jeremycorbyn", "UKLabour", "BorisJohnson", "Conservatives"}) s.mentions.insert(m);
  for (const char* d : {"twitter.com", "cards.twitter.com", "youtube.com", "instagram.com", "open.spotify.com",
                        "google.com", "reddit.com", "play.google.com", "bing.com", "google.co.uk"}) {
    s.url_domains.insert(d);
  }
  return s;
}

EventLog apply_stoplists(const EventLog& log, const StopLists& stop) {
  EventLog out;
  out.events.reserve(log.events.size());
  for (const auto& ev : log.events) {
    const bool drop = (ev.action == Action::HST && stop.stops_hashtag(ev.item)) ||
                      (ev.action == Action::MEN && stop.stops_mention(ev.item)) ||
                      (ev.action == Action::URL && stop.stops_domain(ev.item));
    if (!drop) out.events.push_back(ev);
  }
  return out;
}

ActorSet select_users(const EventLog& log, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("user-selection fraction must be in (0, 1], got " + std::to_string(fraction));
  }
  if (log.empty()) throw DataError("cannot select users from an empty event log");

  std::array<std::map<std::string, std::size_t>, kNumActions> counts;
  for (const auto& ev : log.events) ++counts[index_of(ev.action)][ev.user];

  ActorSet out;
  for (std::size_t l = 0; l < kNumActions; ++l) {
    std::vector<std::pair<std::string, std::size_t>> ranked(counts[l].begin(), counts[l].end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ranked.size()) - 1e-9));
    for (std::size_t i = 0; i < std::min(take, ranked.size()); ++i) {
      out.per_action_top[l].insert(ranked[i].first);
      out.actors.insert(ranked[i].first);
    }
  }
  return out;
}

}  // namespace mmcoord
