#pragma once

// Recomposes upstream results into the investigation report: originator,
// burst, timeline, propagators, negation and main actors.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "trails/burst.hpp"
#include "trails/metrics.hpp"
#include "trails/network.hpp"
#include "trails/timeline.hpp"

namespace trails {

struct SummaryParams {
  double still_spreading_ratio = 0.25;
  std::size_t top_propagators = 5;
};

struct OriginatorInfo {
  TweetId tweet_id = 0;
  std::string screen_name;
  std::int64_t retweet_count = 0;
  Timestamp created_at;
};

struct InvestigationSummary {
  std::optional<OriginatorInfo> originator;
  Timestamp break_time;
  double burst_strength = 0.0;
  bool still_spreading = false;
  std::vector<Actor> top_propagators;
  bool negation_present = false;
  std::optional<Timestamp> first_negation_time;
  StoryMetrics metrics;
  std::string headline_text;
};

namespace detail {

inline std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

inline const TimelineSeries* series(const std::vector<TimelineSeries>& all, std::string_view label) {
  for (const auto& s : all) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

}  // namespace detail

inline std::string render_headline(const InvestigationSummary& s, std::size_t story_size,
                                   const std::vector<TimelineSeries>& timeline) {
  using detail::fmt;
  std::string out;
  if (s.originator) {
    out += fmt("Originator: @%s (tweet %llu, %lld retweets) at %s.\n", s.originator->screen_name.c_str(),
               static_cast<unsigned long long>(s.originator->tweet_id),
               static_cast<long long>(s.originator->retweet_count),
               format_iso8601(s.originator->created_at).c_str());
  } else {
    out += "Originator: no visible originator in the breaking interval.\n";
  }
  out += fmt("Burst: the story broke at %s (burstiness %.4f).\n", format_iso8601(s.break_time).c_str(),
             s.burst_strength);
  if (const auto* all = detail::series(timeline, "all"); all && !all->bins.empty()) {
    const TimelineBin* peak = &all->bins.front();
    for (const auto& b : all->bins) {
      if (b.count > peak->count) peak = &b;
    }
    out += fmt("Timeline: %lld tweets over %zu ten-minute intervals, peaking at %s with %lld; %s.\n",
               static_cast<long long>(story_size), all->bins.size(),
               format_iso8601(peak->interval_start).c_str(), static_cast<long long>(peak->count),
               s.still_spreading ? "still spreading" : "no longer spreading");
  }
  if (s.top_propagators.empty()) {
    out += "Propagators: nobody retweeted the story.\n";
  } else {
    out += "Propagators:";
    for (std::size_t i = 0; i < s.top_propagators.size(); ++i) {
      const auto& a = s.top_propagators[i];
      out += fmt("%s @%s (%zu retweeters)", i ? "," : "", a.screen_name.c_str(), a.distinct_retweeters);
    }
    out += ".\n";
  }
  if (s.negation_present) {
    out += fmt("Negation: first refuting tweets at %s; skepticism %s.\n",
               format_iso8601(*s.first_negation_time).c_str(),
               s.metrics.skepticism.infinite ? "infinite"
                                             : fmt("%.2f", s.metrics.skepticism.value).c_str());
  } else {
    out += "Negation: no refuting tweets found.\n";
  }
  if (!s.top_propagators.empty()) {
    out += "Main actors: @" + s.top_propagators.front().screen_name;
    if (s.top_propagators.size() > 1) out += " and @" + s.top_propagators[1].screen_name;
    out += ".\n";
  }
  out += fmt("Propagation: h-index %lld (%s).\n", static_cast<long long>(s.metrics.propagation_h),
             std::string(to_string(s.metrics.propagation_level)).c_str());
  return out;
}

/// Pure recomposition of upstream artifacts.
inline InvestigationSummary summarize(const RelevantSet& relevant,
                                      const PropagationDataset& propagation,
                                      const std::vector<BurstScore>& scores,
                                      const std::vector<TimelineSeries>& timeline,
                                      const RetweetGraph& retweets, const StoryMetrics& metrics,
                                      const SummaryParams& params = {}) {
  InvestigationSummary s;
  if (propagation.originator) {
    for (const auto& p : propagation.points) {
      if (p.tweet_id == *propagation.originator) {
        s.originator = OriginatorInfo{p.tweet_id, p.screen_name, p.retweet_count, p.created_at};
      }
    }
  }
  s.break_time = propagation.breaking_interval.start;
  if (propagation.breaking_interval.index < scores.size()) {
    s.burst_strength = scores[propagation.breaking_interval.index].burstiness;
  }
  if (const auto* all = detail::series(timeline, "all"); all && !all->bins.empty()) {
    std::int64_t peak = 0;
    for (const auto& b : all->bins) peak = std::max(peak, b.count);
    s.still_spreading =
        peak > 0 && double(all->bins.back().count) >= params.still_spreading_ratio * double(peak);
  }
  s.top_propagators = main_actors(retweets, params.top_propagators);
  if (const auto* neg = detail::series(timeline, "negation")) {
    for (const auto& b : neg->bins) {
      if (b.count > 0) {
        s.first_negation_time = b.interval_start;
        break;
      }
    }
  }
  s.negation_present = s.first_negation_time.has_value();
  s.metrics = metrics;
  s.headline_text = render_headline(s, relevant.size(), timeline);
  return s;
}

}  // namespace trails
