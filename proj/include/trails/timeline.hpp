#pragma once

// Per-bin tweet volume for the whole story, the negation series and
// user-chosen keyword series, plus sortable per-bin listings.

#include <algorithm>
#include <string>
#include <vector>

#include "trails/burst.hpp"
#include "trails/negation.hpp"
#include "trails/relevancy.hpp"

namespace trails {

struct TimelineBin {
  Timestamp interval_start;
  std::int64_t count = 0;
};

struct TimelineSeries {
  std::string label;  // "all", "negation" or the keyword
  std::vector<TimelineBin> bins;
};

/// Series share burst-analysis's grid. Retweets count at their own
/// created_at.
inline std::vector<TimelineSeries> build_timeline(const RelevantSet& relevant,
                                                  const NegationLexicon& lex,
                                                  const std::vector<std::string>& extra_keywords) {
  const auto grid = bin_intervals(relevant);
  const Timestamp origin = grid.front().start;
  auto blank = [&](std::string label) {
    TimelineSeries s{std::move(label), {}};
    s.bins.reserve(grid.size());
    for (const auto& iv : grid) s.bins.push_back({iv.start, 0});
    return s;
  };
  std::vector<TimelineSeries> series;
  series.push_back(blank("all"));
  series.push_back(blank("negation"));
  std::vector<text::Pattern> patterns;
  for (const auto& kw : extra_keywords) {
    text::Pattern p(kw);
    if (p.empty()) continue;
    series.push_back(blank(kw));
    patterns.push_back(std::move(p));
  }
  for (const auto& t : relevant.tweets) {
    const auto bin = static_cast<std::size_t>((t.created_at.seconds - origin.seconds) / kBinSeconds);
    const auto tokens = text::tokenize(t.text);
    ++series[0].bins[bin].count;
    if (lex.matches(tokens)) ++series[1].bins[bin].count;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      if (patterns[k].matches(tokens)) ++series[2 + k].bins[bin].count;
    }
  }
  return series;
}

enum class BinSortKey { retweets, time, original_first };
enum class SortOrder { asc, desc };

/// The tweets of the bin starting at `interval_start`, stably sorted by the
/// chosen key; equal keys fall back to ascending tweet id.
inline std::vector<TweetRecord> list_bin(const RelevantSet& relevant, Timestamp interval_start,
                                         BinSortKey key, SortOrder order) {
  if (relevant.empty() || bin_floor(interval_start) != interval_start) {
    throw Error(ErrorKind::not_found, "unknown bin " + format_iso8601(interval_start));
  }
  const Timestamp first = bin_floor(relevant.tweets.front().created_at);
  const Timestamp last = bin_floor(relevant.tweets.back().created_at);
  if (interval_start < first || interval_start > last) {
    throw Error(ErrorKind::not_found, "unknown bin " + format_iso8601(interval_start));
  }
  std::vector<TweetRecord> out;
  for (const auto& t : relevant.tweets) {
    if (bin_floor(t.created_at) == interval_start) out.push_back(t);
  }
  auto key_of = [key](const TweetRecord& t) -> std::int64_t {
    switch (key) {
      case BinSortKey::retweets: return t.retweet_count;
      case BinSortKey::time: return t.created_at.seconds;
      case BinSortKey::original_first: return t.is_retweet() ? 1 : 0;
    }
    return 0;
  };
  std::stable_sort(out.begin(), out.end(), [&](const TweetRecord& a, const TweetRecord& b) {
    const auto ka = key_of(a), kb = key_of(b);
    if (ka != kb) return order == SortOrder::asc ? ka < kb : ka > kb;
    return a.tweet_id < b.tweet_id;
  });
  return out;
}

}  // namespace trails
