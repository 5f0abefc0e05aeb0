#pragma once

// 10-minute binning, burstiness scoring, breaking-interval detection and the
// propagation dataset (first tweets of the break, colored by similarity).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "trails/domain.hpp"
#include "trails/relevancy.hpp"
#include "trails/text.hpp"

namespace trails {

struct BurstParams {
  double delta_t = 10.0;          // minutes per bin, the time leg of the burst angle
  double theta = 0.9;             // minimum burstiness for a break
  std::int64_t visibility_min = 5;
  double similarity_threshold = 0.8;
  std::size_t max_points = 100;
};

/// Contiguous bins from the first tweet's bin through the last tweet's bin,
/// empty bins included. Retweets are members of the bin they were written in
/// but only originals add to `rt`.
inline std::vector<Interval> bin_intervals(const RelevantSet& relevant) {
  if (relevant.empty()) throw Error(ErrorKind::empty_story, "empty story");
  auto [lo, hi] = std::minmax_element(
      relevant.tweets.begin(), relevant.tweets.end(),
      [](const TweetRecord& a, const TweetRecord& b) { return a.created_at < b.created_at; });
  const Timestamp first = bin_floor(lo->created_at);
  const auto count = static_cast<std::size_t>((bin_floor(hi->created_at).seconds - first.seconds) /
                                              kBinSeconds) + 1;
  std::vector<Interval> bins(count);
  for (std::size_t n = 0; n < count; ++n) {
    bins[n].index = n;
    bins[n].start = first.plus(static_cast<std::int64_t>(n) * kBinSeconds);
  }
  for (const auto& t : relevant.tweets) {
    auto& bin = bins[static_cast<std::size_t>((t.created_at.seconds - first.seconds) / kBinSeconds)];
    bin.tweet_ids.push_back(t.tweet_id);
    if (!t.is_retweet()) bin.rt += t.retweet_count;
  }
  return bins;
}

struct BurstScore {
  std::size_t interval_index = 0;
  double burstiness = 0.0;
  std::int64_t rt = 0;
  double rt_prev = 0.0;  // the series mean for the first interval
};

/// 1 - dt / sqrt(dt^2 + drt^2): one minus the cosine of the angle the
/// activity curve makes with the time axis.
inline double burst_value(double delta_t, double delta_rt) {
  const double h = std::hypot(delta_t, delta_rt);
  if (h == 0.0) return 0.0;
  return std::clamp(1.0 - delta_t / h, 0.0, 1.0);
}

inline double mean_rt(const std::vector<Interval>& intervals) {
  if (intervals.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& iv : intervals) sum += double(iv.rt);
  return sum / double(intervals.size());
}

inline std::vector<BurstScore> burstiness(const std::vector<Interval>& intervals,
                                          double delta_t = BurstParams{}.delta_t) {
  std::vector<BurstScore> scores;
  scores.reserve(intervals.size());
  const double avg = mean_rt(intervals);
  for (std::size_t n = 0; n < intervals.size(); ++n) {
    const double prev = n == 0 ? avg : double(intervals[n - 1].rt);
    scores.push_back({n, burst_value(delta_t, double(intervals[n].rt) - prev), intervals[n].rt,
                      prev});
  }
  return scores;
}

/// First interval that rises above both the series mean and its predecessor
/// with burstiness >= theta. Falls back to the strongest rise, then to the
/// busiest interval.
inline std::size_t find_breaking_interval(const std::vector<BurstScore>& scores,
                                          const std::vector<Interval>& intervals,
                                          double theta = BurstParams{}.theta) {
  if (scores.empty()) throw Error(ErrorKind::empty_story, "no intervals");
  const double avg = mean_rt(intervals);
  for (const auto& s : scores) {
    if (double(s.rt) > avg && double(s.rt) > s.rt_prev && s.burstiness >= theta) {
      return s.interval_index;
    }
  }
  std::optional<std::size_t> best;
  for (const auto& s : scores) {
    if (double(s.rt) > s.rt_prev && (!best || s.burstiness > scores[*best].burstiness)) {
      best = s.interval_index;
    }
  }
  if (best) return *best;
  std::size_t busiest = 0;
  for (const auto& s : scores) {
    if (s.rt > scores[busiest].rt) busiest = s.interval_index;
  }
  return busiest;
}

// ---------------------------------------------------------------------------
// Similarity clustering

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root survives, so representatives are deterministic.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Single-linkage classes over pairs with cosine >= threshold. Class ids are
/// numbered 0, 1, ... in order of first appearance.
inline std::vector<std::size_t> similarity_classes(const std::vector<std::string>& texts,
                                                   double threshold) {
  std::vector<text::TermVector> vecs;
  vecs.reserve(texts.size());
  for (const auto& t : texts) vecs.push_back(text::TermVector::from_text(t));
  DisjointSets sets(texts.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      if (text::cosine(vecs[i], vecs[j]) >= threshold) sets.unite(i, j);
    }
  }
  std::vector<std::size_t> label(texts.size());
  std::vector<std::optional<std::size_t>> by_root(texts.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto& slot = by_root[sets.find(i)];
    if (!slot) slot = next++;
    label[i] = *slot;
  }
  return label;
}

// ---------------------------------------------------------------------------
// Propagation dataset

struct PropagationPoint {
  TweetId tweet_id = 0;
  Timestamp created_at;
  std::int64_t retweet_count = 0;
  std::int64_t followers_count = 0;
  bool verified = false;
  std::size_t color_class = 0;
  UserId user_id = 0;
  std::string screen_name;
  std::string text;
};

/// Earliest point with at least `visibility_min` retweets; on a timestamp
/// tie the more retweeted tweet wins, then the lower id.
inline std::optional<TweetId> find_originator(const std::vector<PropagationPoint>& points,
                                              std::int64_t visibility_min = 5) {
  const PropagationPoint* best = nullptr;
  for (const auto& p : points) {
    if (p.retweet_count < visibility_min) continue;
    if (!best || p.created_at < best->created_at ||
        (p.created_at == best->created_at &&
         (p.retweet_count > best->retweet_count ||
          (p.retweet_count == best->retweet_count && p.tweet_id < best->tweet_id)))) {
      best = &p;
    }
  }
  if (!best) return std::nullopt;
  return best->tweet_id;
}

struct PropagationDataset {
  Interval breaking_interval;
  std::vector<PropagationPoint> points;
  std::optional<TweetId> originator;
};

/// The first `max_points` original tweets written at or after the start of
/// the breaking interval (running past its end when the bin has fewer).
inline PropagationDataset build_propagation_dataset(const RelevantSet& relevant,
                                                    const std::vector<Interval>& intervals,
                                                    std::size_t breaking_index,
                                                    const BurstParams& params = {}) {
  if (breaking_index >= intervals.size()) {
    throw Error(ErrorKind::invalid_argument, "breaking interval out of range");
  }
  PropagationDataset out;
  out.breaking_interval = intervals[breaking_index];
  const Timestamp start = out.breaking_interval.start;
  std::vector<std::string> texts;
  for (const auto& t : relevant.tweets) {  // already chronological
    if (t.is_retweet() || t.created_at < start) continue;
    PropagationPoint p;
    p.tweet_id = t.tweet_id;
    p.created_at = t.created_at;
    p.retweet_count = t.retweet_count;
    p.followers_count = t.author.followers_count;
    p.verified = t.author.verified;
    p.user_id = t.author.user_id;
    p.screen_name = t.author.screen_name;
    p.text = t.text;
    out.points.push_back(std::move(p));
    texts.push_back(t.text);
    if (out.points.size() == params.max_points) break;
  }
  const auto classes = similarity_classes(texts, params.similarity_threshold);
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].color_class = classes[i];
  out.originator = find_originator(out.points, params.visibility_min);
  return out;
}

}  // namespace trails
