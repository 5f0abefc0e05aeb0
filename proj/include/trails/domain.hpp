#pragma once

// Core value types: tweets, users, keyword rules, investigation config and
// the 10-minute interval grid.

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trails/text.hpp"

namespace trails {

/// Error category, mapped to HTTP status codes by the service layer.
enum class ErrorKind { invalid_argument, not_found, conflict, validation, io, empty_story };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

using TweetId = std::uint64_t;
using UserId = std::uint64_t;

/// UTC instant at second precision.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;

  [[nodiscard]] Timestamp plus(std::int64_t s) const { return Timestamp{seconds + s}; }
};

/// Parses "YYYY-MM-DDTHH:MM:SS[.fff][Z|±HH:MM]" (also accepts a space
/// instead of 'T'); fractional seconds are dropped.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  s = text::trim(s);
  auto digits = [&](std::size_t at, std::size_t n, int& out) {
    if (at + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char c = s[at + i];
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    out = v;
    return true;
  };
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!digits(0, 4, y) || s.size() < 19 || s[4] != '-' || !digits(5, 2, mo) || s[7] != '-' ||
      !digits(8, 2, d) || (s[10] != 'T' && s[10] != ' ') || !digits(11, 2, h) || s[13] != ':' ||
      !digits(14, 2, mi) || s[16] != ':' || !digits(17, 2, sec)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!digits(pos + 1, 2, oh) || !digits(pos + 4, 2, om)) return std::nullopt;
      offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return Timestamp{days * 86400 + h * 3600 + mi * 60 + sec - offset};
}

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_iso8601(Timestamp t) {
  std::int64_t days = t.seconds / 86400;
  std::int64_t rem = t.seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(rem / 3600), int(rem / 60 % 60),
                int(rem % 60));
  return buf;
}

struct UserRef {
  UserId user_id = 0;
  std::string screen_name;
  std::int64_t followers_count = 0;
  bool verified = false;
  std::string description;
  Timestamp account_created_at;

  bool operator==(const UserRef&) const = default;
};

struct TweetRecord {
  TweetId tweet_id = 0;
  Timestamp created_at;
  std::string text;
  UserRef author;
  std::int64_t retweet_count = 0;
  std::optional<TweetId> retweet_of;
  std::vector<std::string> urls;
  std::vector<std::string> hashtags;
  std::optional<std::string> lang;

  [[nodiscard]] bool is_retweet() const { return retweet_of.has_value(); }

  bool operator==(const TweetRecord&) const = default;
};

enum class KeywordRole { required, optional, excluded };
enum class RequiredMode { all, at_least_one };

inline std::string_view to_string(KeywordRole r) {
  switch (r) {
    case KeywordRole::required: return "required";
    case KeywordRole::optional: return "optional";
    case KeywordRole::excluded: return "excluded";
  }
  return "?";
}

inline std::string_view to_string(RequiredMode m) {
  return m == RequiredMode::all ? "all" : "at_least_one";
}

struct KeywordSpec {
  std::string term;
  KeywordRole role = KeywordRole::optional;

  bool operator==(const KeywordSpec&) const = default;
};

struct TimeWindow {
  Timestamp start;
  Timestamp end;

  [[nodiscard]] bool contains(Timestamp t) const { return start <= t && t <= end; }
  bool operator==(const TimeWindow&) const = default;
};

inline constexpr std::int64_t kMaxTweetsPerTerm = 18000;
inline constexpr std::size_t kDefaultMaxSearchTerms = 10;

/// The user-steered filter state of one investigation.
struct InvestigationConfig {
  TweetId investigative_tweet_id = 0;
  std::vector<std::string> search_terms;
  std::vector<KeywordSpec> keywords;
  RequiredMode required_mode = RequiredMode::all;
  std::int64_t optional_threshold = 0;
  std::optional<TimeWindow> time_window;
  std::int64_t max_tweets_per_term = kMaxTweetsPerTerm;
  std::vector<std::string> negation_add;
  std::vector<std::string> negation_remove;
  // Extra keyword series drawn on the timeline.
  std::vector<std::string> timeline_keywords;

  [[nodiscard]] std::vector<std::string> terms_with_role(KeywordRole role) const {
    std::vector<std::string> out;
    for (const auto& k : keywords) {
      if (k.role == role) out.push_back(k.term);
    }
    return out;
  }

  bool operator==(const InvestigationConfig&) const = default;
};

/// Throws Error(validation) describing the first violated invariant.
inline void validate(const InvestigationConfig& c,
                     std::size_t max_search_terms = kDefaultMaxSearchTerms) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::validation, msg); };
  if (c.search_terms.size() > max_search_terms) {
    fail("too many search terms (max " + std::to_string(max_search_terms) + ")");
  }
  for (const auto& t : c.search_terms) {
    if (text::tokenize(t).empty()) fail("empty search term");
  }
  std::vector<std::string> seen;
  std::int64_t optional_count = 0;
  for (const auto& k : c.keywords) {
    const auto norm = text::tokenize(k.term);
    if (norm.empty()) fail("keyword term is empty");
    std::string key;
    for (const auto& t : norm) key += t + ' ';
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      fail("keyword '" + k.term + "' listed more than once");
    }
    seen.push_back(key);
    if (k.role == KeywordRole::optional) ++optional_count;
  }
  if (c.optional_threshold < 0) fail("optional_threshold must be non-negative");
  if (c.optional_threshold > optional_count) {
    fail("optional_threshold " + std::to_string(c.optional_threshold) + " exceeds the " +
         std::to_string(optional_count) + " optional keywords");
  }
  if (c.time_window && !(c.time_window->start < c.time_window->end)) {
    fail("time_window start must precede end");
  }
  if (c.max_tweets_per_term < 1 || c.max_tweets_per_term > kMaxTweetsPerTerm) {
    fail("max_tweets_per_term must be in [1, 18000]");
  }
}

inline constexpr std::int64_t kBinSeconds = 600;

/// Floors a timestamp to the 10-minute grid.
inline Timestamp bin_floor(Timestamp t) {
  std::int64_t r = t.seconds % kBinSeconds;
  if (r < 0) r += kBinSeconds;
  return Timestamp{t.seconds - r};
}

/// One 10-minute bin. `rt` is the retweet total of original tweets written
/// in the bin (it also serves as the bin's activity).
struct Interval {
  std::size_t index = 0;
  Timestamp start;
  std::vector<TweetId> tweet_ids;
  std::int64_t rt = 0;

  [[nodiscard]] static constexpr std::int64_t width() { return kBinSeconds; }
  [[nodiscard]] Timestamp end() const { return start.plus(kBinSeconds); }
  [[nodiscard]] bool contains(Timestamp t) const { return start <= t && t < end(); }
  [[nodiscard]] std::int64_t activity() const { return rt; }
};

// ---------------------------------------------------------------------------
// Record validation

/// Bounds on plausible created_at values for the loaded archive.
struct CorpusEpoch {
  Timestamp min{1142899200};  // 2006-03-21
  Timestamp max{4102444800};  // 2100-01-01
};

struct RecordResult {
  std::optional<TweetRecord> record;
  std::string rejection;  // reason code when record is empty

  [[nodiscard]] bool ok() const { return record.has_value(); }
};

namespace detail {

inline std::optional<std::uint64_t> parse_id(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) return std::nullopt;
    return static_cast<std::uint64_t>(i);
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || s.size() > 20) return std::nullopt;
    std::uint64_t out = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      const std::uint64_t next = out * 10 + std::uint64_t(c - '0');
      if (next / 10 != out) return std::nullopt;
      out = next;
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace detail

/// Validates one raw corpus object. Never throws; rejections carry a short
/// reason code.
inline RecordResult validate_record(const nlohmann::json& raw, const CorpusEpoch& epoch = {}) {
  using nlohmann::json;
  auto reject = [](std::string why) { return RecordResult{std::nullopt, std::move(why)}; };
  if (!raw.is_object()) return reject("not an object");

  TweetRecord rec;
  const auto id_it = raw.find("id");
  if (id_it == raw.end() || id_it->is_null()) return reject("missing id");
  const auto id = detail::parse_id(*id_it);
  if (!id) return reject("bad id");
  rec.tweet_id = *id;

  const auto ts_it = raw.find("created_at");
  if (ts_it == raw.end() || !ts_it->is_string()) return reject("missing timestamp");
  const auto ts = parse_iso8601(ts_it->get_ref<const std::string&>());
  if (!ts) return reject("bad timestamp");
  if (*ts < epoch.min || *ts > epoch.max) return reject("timestamp outside epoch");
  rec.created_at = *ts;

  if (const auto it = raw.find("text"); it != raw.end() && it->is_string()) {
    rec.text = it->get<std::string>();
  } else if (it != raw.end() && !it->is_null()) {
    return reject("bad text");
  }

  const auto user_it = raw.find("user");
  if (user_it == raw.end() || !user_it->is_object()) return reject("missing author");
  const json& u = *user_it;
  const auto uid_it = u.find("id");
  if (uid_it == u.end()) return reject("missing author");
  const auto uid = detail::parse_id(*uid_it);
  if (!uid) return reject("bad author id");
  rec.author.user_id = *uid;
  if (const auto it = u.find("screen_name"); it != u.end() && it->is_string()) {
    rec.author.screen_name = it->get<std::string>();
  }
  if (text::trim(rec.author.screen_name).empty()) return reject("empty screen_name");
  if (const auto it = u.find("followers_count"); it != u.end() && !it->is_null()) {
    if (!it->is_number_integer()) return reject("bad followers_count");
    rec.author.followers_count = it->get<std::int64_t>();
    if (rec.author.followers_count < 0) return reject("negative followers");
  }
  if (const auto it = u.find("verified"); it != u.end() && it->is_boolean()) {
    rec.author.verified = it->get<bool>();
  }
  if (const auto it = u.find("description"); it != u.end() && it->is_string()) {
    rec.author.description = it->get<std::string>();
  }
  if (const auto it = u.find("created_at"); it != u.end() && it->is_string()) {
    const auto at = parse_iso8601(it->get_ref<const std::string&>());
    if (!at) return reject("bad account timestamp");
    rec.author.account_created_at = *at;
  }

  if (const auto it = raw.find("retweet_count"); it != raw.end() && !it->is_null()) {
    if (!it->is_number_integer()) return reject("bad count");
    rec.retweet_count = it->get<std::int64_t>();
    if (rec.retweet_count < 0) return reject("negative count");
  }

  if (const auto it = raw.find("retweeted_status_id"); it != raw.end() && !it->is_null()) {
    const auto of = detail::parse_id(*it);
    if (!of) return reject("bad retweeted_status_id");
    if (*of == rec.tweet_id) return reject("self-retweet");
    rec.retweet_of = *of;
  }

  if (const auto it = raw.find("entities"); it != raw.end() && it->is_object()) {
    if (const auto urls = it->find("urls"); urls != it->end() && urls->is_array()) {
      for (const auto& v : *urls) {
        if (v.is_string()) rec.urls.push_back(v.get<std::string>());
      }
    }
    if (const auto tags = it->find("hashtags"); tags != it->end() && tags->is_array()) {
      for (const auto& v : *tags) {
        if (v.is_string()) {
          std::string tag = text::to_lower(text::trim(v.get<std::string>()));
          if (!tag.empty() && tag.front() == '#') tag.erase(0, 1);
          if (!tag.empty()) rec.hashtags.push_back(std::move(tag));
        }
      }
    }
  }
  if (const auto it = raw.find("lang"); it != raw.end() && it->is_string()) {
    rec.lang = it->get<std::string>();
  }
  return RecordResult{std::move(rec), {}};
}

/// Inverse of validate_record: the corpus line object for a record.
inline nlohmann::json serialize_record(const TweetRecord& r) {
  nlohmann::json j;
  j["id"] = std::to_string(r.tweet_id);
  j["created_at"] = format_iso8601(r.created_at);
  j["text"] = r.text;
  j["retweet_count"] = r.retweet_count;
  j["retweeted_status_id"] =
      r.retweet_of ? nlohmann::json(std::to_string(*r.retweet_of)) : nlohmann::json(nullptr);
  j["user"] = {{"id", std::to_string(r.author.user_id)},
               {"screen_name", r.author.screen_name},
               {"followers_count", r.author.followers_count},
               {"verified", r.author.verified},
               {"description", r.author.description},
               {"created_at", format_iso8601(r.author.account_created_at)}};
  j["entities"] = {{"urls", r.urls}, {"hashtags", r.hashtags}};
  if (r.lang) j["lang"] = *r.lang;
  return j;
}

}  // namespace trails
