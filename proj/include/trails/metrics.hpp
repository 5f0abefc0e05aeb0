#pragma once

// h-index propagation and skepticism scores, story categories, the
// propagation-vs-skepticism scatter export and the tweeted-link bibliography.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "trails/domain.hpp"
#include "trails/negation.hpp"
#include "trails/relevancy.hpp"

namespace trails {

/// Largest h such that at least h of the counts are >= h.
inline std::int64_t h_index(std::vector<std::int64_t> counts) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  std::int64_t h = 0;
  while (h < static_cast<std::int64_t>(counts.size()) && counts[static_cast<std::size_t>(h)] >= h + 1) {
    ++h;
  }
  return h;
}

enum class PropagationLevel { insignificant, low, moderate, high, extensive };

inline PropagationLevel propagation_level(std::int64_t h) {
  if (h <= 16) return PropagationLevel::insignificant;
  if (h <= 32) return PropagationLevel::low;
  if (h <= 64) return PropagationLevel::moderate;
  if (h <= 128) return PropagationLevel::high;
  return PropagationLevel::extensive;
}

inline std::string_view to_string(PropagationLevel l) {
  switch (l) {
    case PropagationLevel::insignificant: return "insignificant";
    case PropagationLevel::low: return "low";
    case PropagationLevel::moderate: return "moderate";
    case PropagationLevel::high: return "high";
    case PropagationLevel::extensive: return "extensive";
  }
  return "?";
}

enum class Category { rumor_true, rumor_false, event_meme, other };
enum class CategorySource { manual, unset };

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::rumor_true: return "rumor_true";
    case Category::rumor_false: return "rumor_false";
    case Category::event_meme: return "event_meme";
    case Category::other: return "other";
  }
  return "?";
}

inline std::optional<Category> parse_category(std::string_view s) {
  if (s == "rumor_true") return Category::rumor_true;
  if (s == "rumor_false") return Category::rumor_false;
  if (s == "event_meme") return Category::event_meme;
  if (s == "other") return Category::other;
  return std::nullopt;
}

/// negation_h / non_negation_h, or "infinite" when only the numerator is
/// nonzero.
struct Skepticism {
  double value = 0.0;
  bool infinite = false;

  static Skepticism ratio(std::int64_t negation_h, std::int64_t non_negation_h) {
    if (non_negation_h > 0) return {double(negation_h) / double(non_negation_h), false};
    if (negation_h == 0) return {0.0, false};
    return {0.0, true};
  }

  bool operator==(const Skepticism&) const = default;
};

struct StoryMetrics {
  std::int64_t propagation_h = 0;
  PropagationLevel propagation_level = PropagationLevel::insignificant;
  std::int64_t negation_h = 0;
  std::int64_t non_negation_h = 0;
  Skepticism skepticism;
  Category category = Category::other;
  CategorySource category_source = CategorySource::unset;

  bool operator==(const StoryMetrics&) const = default;
};

/// Originals are the publications and their retweets the citations, so
/// retweet records never enter the h-index.
inline StoryMetrics compute_metrics(const RelevantSet& relevant, const NegationSplit& split,
                                    std::optional<Category> category = std::nullopt) {
  const std::unordered_set<TweetId> negating(split.negating.begin(), split.negating.end());
  std::vector<std::int64_t> all, neg, non;
  for (const auto& t : relevant.tweets) {
    if (t.is_retweet()) continue;
    all.push_back(t.retweet_count);
    (negating.contains(t.tweet_id) ? neg : non).push_back(t.retweet_count);
  }
  StoryMetrics m;
  m.propagation_h = h_index(std::move(all));
  m.propagation_level = propagation_level(m.propagation_h);
  m.negation_h = h_index(std::move(neg));
  m.non_negation_h = h_index(std::move(non));
  m.skepticism = Skepticism::ratio(m.negation_h, m.non_negation_h);
  if (category) {
    m.category = *category;
    m.category_source = CategorySource::manual;
  }
  return m;
}

enum class CrowdSignal { doubted, undoubted };

struct CrowdSignalParams {
  double skepticism_threshold = 0.5;
};

/// Advisory flag: the audience pushed back on a story that did not travel
/// far. Never a truth verdict.
inline CrowdSignal crowd_signal(const StoryMetrics& m, const CrowdSignalParams& p = {}) {
  const bool skeptical = m.skepticism.infinite || m.skepticism.value >= p.skepticism_threshold;
  const bool contained = m.propagation_level == PropagationLevel::insignificant ||
                         m.propagation_level == PropagationLevel::low;
  return skeptical && contained ? CrowdSignal::doubted : CrowdSignal::undoubted;
}

// ---------------------------------------------------------------------------
// Tweeted link bibliography

/// Lowercases scheme and host, drops the fragment and common tracking
/// parameters.
inline std::string canonicalize_url(std::string_view raw) {
  std::string url(text::trim(raw));
  if (const auto hash = url.find('#'); hash != std::string::npos) url.erase(hash);
  const auto scheme_end = url.find("://");
  std::size_t host_begin = 0;
  if (scheme_end != std::string::npos) {
    for (std::size_t i = 0; i < scheme_end; ++i) {
      url[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(url[i])));
    }
    host_begin = scheme_end + 3;
  }
  const auto host_end = url.find_first_of("/?", host_begin);
  for (std::size_t i = host_begin; i < std::min(host_end, url.size()); ++i) {
    url[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(url[i])));
  }
  const auto q = url.find('?');
  if (q == std::string::npos) return url;
  static const std::set<std::string> tracking = {"fbclid", "gclid",  "igshid", "mc_cid",
                                                 "mc_eid", "ref_src", "ref_url", "yclid"};
  std::string kept;
  std::size_t pos = q + 1;
  while (pos <= url.size()) {
    auto amp = url.find('&', pos);
    if (amp == std::string::npos) amp = url.size();
    const std::string param = url.substr(pos, amp - pos);
    const std::string key = param.substr(0, param.find('='));
    const bool drop = param.empty() || key.rfind("utm_", 0) == 0 || tracking.contains(key);
    if (!drop) kept += (kept.empty() ? "" : "&") + param;
    pos = amp + 1;
  }
  url.erase(q);
  if (!kept.empty()) url += "?" + kept;
  return url;
}

struct LinkEntry {
  std::string canonical_url;
  std::size_t tweet_count = 0;
  std::size_t distinct_user_count = 0;
  std::vector<TweetId> tweet_ids;
};

struct LinkBibliography {
  std::vector<LinkEntry> entries;
};

inline LinkBibliography build_link_bibliography(const RelevantSet& relevant) {
  struct Acc {
    std::vector<TweetId> tweets;
    std::set<UserId> users;
  };
  std::map<std::string, Acc> by_url;
  for (const auto& t : relevant.tweets) {
    std::set<std::string> in_tweet;
    for (const auto& u : t.urls) {
      auto canon = canonicalize_url(u);
      if (!canon.empty()) in_tweet.insert(std::move(canon));
    }
    for (const auto& u : in_tweet) {
      auto& acc = by_url[u];
      acc.tweets.push_back(t.tweet_id);
      acc.users.insert(t.author.user_id);
    }
  }
  LinkBibliography out;
  for (auto& [url, acc] : by_url) {
    out.entries.push_back({url, acc.tweets.size(), acc.users.size(), std::move(acc.tweets)});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const LinkEntry& a, const LinkEntry& b) {
    if (a.tweet_count != b.tweet_count) return a.tweet_count > b.tweet_count;
    if (a.distinct_user_count != b.distinct_user_count) {
      return a.distinct_user_count > b.distinct_user_count;
    }
    return a.canonical_url < b.canonical_url;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Scatter export

struct ScatterRow {
  std::string story_id;
  std::int64_t propagation_h = 0;
  std::optional<double> skepticism;  // empty for the "infinite" sentinel
  Category category = Category::other;
  bool sentinel = false;
};

inline std::vector<ScatterRow> scatter_export(
    std::vector<std::pair<std::string, StoryMetrics>> stories) {
  std::sort(stories.begin(), stories.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ScatterRow> rows;
  rows.reserve(stories.size());
  for (const auto& [id, m] : stories) {
    ScatterRow r{id, m.propagation_h, std::nullopt, m.category, m.skepticism.infinite};
    if (!r.sentinel) r.skepticism = m.skepticism.value;
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

}  // namespace detail

/// Comma-separated table with a header row. Sentinel rows leave the
/// skepticism cell empty and set `sentinel` to 1.
inline void write_scatter_csv(std::ostream& out, const std::vector<ScatterRow>& rows) {
  out << "story_id,propagation_h,propagation_level,skepticism,category,sentinel\n";
  for (const auto& r : rows) {
    out << detail::csv_field(r.story_id) << ',' << r.propagation_h << ','
        << to_string(propagation_level(r.propagation_h)) << ','
        << (r.skepticism ? detail::format_real(*r.skepticism) : std::string()) << ','
        << to_string(r.category) << ',' << (r.sentinel ? 1 : 0) << '\n';
  }
}

}  // namespace trails
