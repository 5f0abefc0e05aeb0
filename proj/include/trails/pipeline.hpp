#pragma once

// Runs the whole analysis for one (corpus, config) pair.

#include <array>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "trails/burst.hpp"
#include "trails/corpus.hpp"
#include "trails/metrics.hpp"
#include "trails/negation.hpp"
#include "trails/network.hpp"
#include "trails/relevancy.hpp"
#include "trails/serialize.hpp"
#include "trails/summary.hpp"
#include "trails/timeline.hpp"

namespace trails {

struct AnalysisParams {
  SearchWindow window;
  BurstParams burst;
  SummaryParams summary;
  std::int64_t min_edge_weight = 1;
  bool weighted_communities = true;
  std::vector<std::string> negation_base = default_negation_terms();
};

/// Everything computed for a story. For an empty story only `relevant`,
/// `metrics` and `summary` carry content.
struct Artifacts {
  RelevantSet relevant;
  std::vector<Interval> intervals;
  std::vector<BurstScore> scores;
  PropagationDataset propagation;
  std::vector<TimelineSeries> timeline;
  RetweetGraph retweet_graph;
  CommunityAssignment retweet_communities;
  CoRetweetedGraph coretweeted_graph;
  CommunityAssignment coretweeted_communities;
  LinkBibliography links;
  NegationSplit split;
  StoryMetrics metrics;
  InvestigationSummary summary;

  [[nodiscard]] bool empty_story() const { return relevant.empty(); }
};

inline Artifacts run_pipeline(const Corpus& corpus, const InvestigationConfig& config,
                              const AnalysisParams& params = {},
                              std::optional<Category> category = std::nullopt) {
  Artifacts a;
  a.relevant = build_relevant_set(corpus, config, params.window);
  const auto lex = NegationLexicon::for_config(config, params.negation_base);
  a.split = split_story(a.relevant, lex);
  a.metrics = compute_metrics(a.relevant, a.split, category);
  a.links = build_link_bibliography(a.relevant);
  a.retweet_graph = build_retweet_graph(a.relevant, params.min_edge_weight);
  a.retweet_communities = detect_communities(a.retweet_graph, params.weighted_communities);
  a.coretweeted_graph = build_coretweeted_graph(a.retweet_graph);
  a.coretweeted_communities = detect_communities(a.coretweeted_graph, params.weighted_communities);
  if (a.relevant.empty()) {
    a.summary.metrics = a.metrics;
    a.summary.headline_text = "No relevant tweets match the current keyword rules.\n";
    return a;
  }
  a.intervals = bin_intervals(a.relevant);
  a.scores = burstiness(a.intervals, params.burst.delta_t);
  const auto breaking = find_breaking_interval(a.scores, a.intervals, params.burst.theta);
  a.propagation = build_propagation_dataset(a.relevant, a.intervals, breaking, params.burst);
  a.timeline = build_timeline(a.relevant, lex, config.timeline_keywords);
  a.summary = summarize(a.relevant, a.propagation, a.scores, a.timeline, a.retweet_graph, a.metrics,
                        params.summary);
  return a;
}

inline constexpr std::array<std::string_view, 7> kDatasetKinds = {
    "propagation", "timeline", "retweet_network", "coretweeted_network", "links", "summary", "metrics",
};

inline bool is_dataset_kind(std::string_view kind) {
  return std::find(kDatasetKinds.begin(), kDatasetKinds.end(), kind) != kDatasetKinds.end();
}

/// Serialized artifact documents keyed by dataset kind.
inline std::map<std::string, nlohmann::json> artifact_documents(const Artifacts& a) {
  using nlohmann::json;
  std::map<std::string, json> docs;
  const json story = {{"empty_story", a.empty_story()},
                      {"relevant_count", a.relevant.size()},
                      {"originals_count", a.relevant.originals_count},
                      {"retweets_count", a.relevant.retweets_count}};
  docs["propagation"] = a.empty_story() ? json{{"points", json::array()}, {"originator", nullptr}}
                                        : doc::to_json(a.propagation, a.scores);
  docs["timeline"] = a.empty_story() ? json{{"bin_seconds", kBinSeconds}, {"series", json::array()}}
                                     : doc::to_json(a.timeline);
  docs["retweet_network"] = doc::to_json(a.retweet_graph, a.retweet_communities);
  docs["coretweeted_network"] = doc::to_json(a.coretweeted_graph, a.coretweeted_communities);
  docs["links"] = doc::to_json(a.links);
  docs["summary"] = doc::to_json(a.summary);
  docs["metrics"] = doc::to_json(a.metrics);
  for (auto& [_, d] : docs) d["story"] = story;
  return docs;
}

}  // namespace trails
