#pragma once

// JSON documents for configs and every served artifact. Ids are emitted as
// decimal strings so 64-bit values survive JavaScript clients.

#include <string>
#include <vector>

#include <json.hpp>

#include "trails/burst.hpp"
#include "trails/metrics.hpp"
#include "trails/network.hpp"
#include "trails/relevancy.hpp"
#include "trails/summary.hpp"
#include "trails/timeline.hpp"

namespace trails::doc {

using nlohmann::json;

inline std::string id(std::uint64_t v) { return std::to_string(v); }

inline std::uint64_t parse_id_field(const json& v, std::string_view field) {
  if (const auto parsed = trails::detail::parse_id(v)) return *parsed;
  throw Error(ErrorKind::validation, "field '" + std::string(field) + "' must be a tweet/user id");
}

inline Timestamp parse_time_field(const json& v, std::string_view field) {
  if (v.is_string()) {
    if (const auto t = parse_iso8601(v.get_ref<const std::string&>())) return *t;
  }
  throw Error(ErrorKind::validation, "field '" + std::string(field) + "' must be an ISO-8601 time");
}

// ---------------------------------------------------------------------------
// InvestigationConfig

inline json to_json(const InvestigationConfig& c) {
  json keywords = json::array();
  for (const auto& k : c.keywords) keywords.push_back({{"term", k.term}, {"role", to_string(k.role)}});
  json j = {
      {"investigative_tweet_id", id(c.investigative_tweet_id)},
      {"search_terms", c.search_terms},
      {"keywords", keywords},
      {"required_mode", to_string(c.required_mode)},
      {"optional_threshold", c.optional_threshold},
      {"time_window", nullptr},
      {"max_tweets_per_term", c.max_tweets_per_term},
      {"negation_add", c.negation_add},
      {"negation_remove", c.negation_remove},
      {"timeline_keywords", c.timeline_keywords},
  };
  if (c.time_window) {
    j["time_window"] = {{"start", format_iso8601(c.time_window->start)},
                        {"end", format_iso8601(c.time_window->end)}};
  }
  return j;
}

namespace detail {

inline std::vector<std::string> string_list(const json& v, std::string_view field) {
  if (!v.is_array()) throw Error(ErrorKind::validation, "field '" + std::string(field) + "' must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw Error(ErrorKind::validation, "field '" + std::string(field) + "' must hold strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::int64_t integer(const json& v, std::string_view field) {
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::validation, "field '" + std::string(field) + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

}  // namespace detail

/// Applies a (possibly partial) config document on top of `base`. Keys not
/// present keep their base values; unknown keys are rejected.
inline InvestigationConfig apply_config_patch(InvestigationConfig base, const json& patch) {
  if (!patch.is_object()) throw Error(ErrorKind::validation, "config must be an object");
  for (const auto& [key, v] : patch.items()) {
    if (key == "investigative_tweet_id") {
      base.investigative_tweet_id = parse_id_field(v, key);
    } else if (key == "search_terms") {
      base.search_terms = detail::string_list(v, key);
    } else if (key == "keywords") {
      if (!v.is_array()) throw Error(ErrorKind::validation, "field 'keywords' must be a list");
      base.keywords.clear();
      for (const auto& k : v) {
        if (!k.is_object() || !k.contains("term") || !k["term"].is_string()) {
          throw Error(ErrorKind::validation, "keyword entries need a string 'term'");
        }
        KeywordSpec spec{text::to_lower(text::trim(k["term"].get<std::string>())), KeywordRole::optional};
        const std::string role = k.value("role", std::string("optional"));
        if (role == "required") {
          spec.role = KeywordRole::required;
        } else if (role == "optional") {
          spec.role = KeywordRole::optional;
        } else if (role == "excluded") {
          spec.role = KeywordRole::excluded;
        } else {
          throw Error(ErrorKind::validation, "keyword role must be required, optional or excluded");
        }
        base.keywords.push_back(std::move(spec));
      }
    } else if (key == "required_mode") {
      const auto mode = v.is_string() ? v.get<std::string>() : std::string();
      if (mode == "all") {
        base.required_mode = RequiredMode::all;
      } else if (mode == "at_least_one") {
        base.required_mode = RequiredMode::at_least_one;
      } else {
        throw Error(ErrorKind::validation, "required_mode must be 'all' or 'at_least_one'");
      }
    } else if (key == "optional_threshold") {
      base.optional_threshold = detail::integer(v, key);
    } else if (key == "time_window") {
      if (v.is_null()) {
        base.time_window.reset();
      } else if (v.is_object() && v.contains("start") && v.contains("end")) {
        base.time_window = TimeWindow{parse_time_field(v["start"], "time_window.start"),
                                      parse_time_field(v["end"], "time_window.end")};
      } else {
        throw Error(ErrorKind::validation, "time_window must be null or {start, end}");
      }
    } else if (key == "max_tweets_per_term") {
      base.max_tweets_per_term = detail::integer(v, key);
    } else if (key == "negation_add") {
      base.negation_add = detail::string_list(v, key);
    } else if (key == "negation_remove") {
      base.negation_remove = detail::string_list(v, key);
    } else if (key == "timeline_keywords") {
      base.timeline_keywords = detail::string_list(v, key);
    } else {
      throw Error(ErrorKind::validation, "unknown config field '" + key + "'");
    }
  }
  return base;
}

inline InvestigationConfig config_from_json(const json& j) { return apply_config_patch({}, j); }

// ---------------------------------------------------------------------------
// Artifacts

inline json to_json(const TweetRecord& t) {
  json j = {{"id", id(t.tweet_id)},
            {"created_at", format_iso8601(t.created_at)},
            {"text", t.text},
            {"user_id", id(t.author.user_id)},
            {"screen_name", t.author.screen_name},
            {"verified", t.author.verified},
            {"followers_count", t.author.followers_count},
            {"retweet_count", t.retweet_count},
            {"retweet_of", nullptr}};
  if (t.retweet_of) j["retweet_of"] = id(*t.retweet_of);
  return j;
}

inline json to_json(const Skepticism& s) {
  return s.infinite ? json("infinite") : json(s.value);
}

inline Skepticism skepticism_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "infinite") return {0.0, true};
  if (j.is_number()) return {j.get<double>(), false};
  throw Error(ErrorKind::validation, "skepticism must be a number or \"infinite\"");
}

inline json to_json(const StoryMetrics& m) {
  return {{"propagation_h", m.propagation_h},
          {"propagation_level", to_string(m.propagation_level)},
          {"negation_h", m.negation_h},
          {"non_negation_h", m.non_negation_h},
          {"skepticism", to_json(m.skepticism)},
          {"category", to_string(m.category)},
          {"category_source", m.category_source == CategorySource::manual ? "manual" : "unset"},
          {"crowd_signal", crowd_signal(m) == CrowdSignal::doubted ? "doubted" : "undoubted"}};
}

inline StoryMetrics metrics_from_json(const json& j) {
  StoryMetrics m;
  m.propagation_h = j.at("propagation_h").get<std::int64_t>();
  m.propagation_level = propagation_level(m.propagation_h);
  m.negation_h = j.at("negation_h").get<std::int64_t>();
  m.non_negation_h = j.at("non_negation_h").get<std::int64_t>();
  m.skepticism = skepticism_from_json(j.at("skepticism"));
  if (const auto c = parse_category(j.value("category", std::string("other")))) m.category = *c;
  m.category_source =
      j.value("category_source", std::string("unset")) == "manual" ? CategorySource::manual
                                                                     : CategorySource::unset;
  return m;
}

inline json to_json(const Interval& iv) {
  return {{"index", iv.index},
          {"start", format_iso8601(iv.start)},
          {"width_seconds", Interval::width()},
          {"tweet_count", iv.tweet_ids.size()},
          {"rt", iv.rt}};
}

inline json to_json(const PropagationDataset& p, const std::vector<BurstScore>& scores) {
  json points = json::array();
  for (const auto& pt : p.points) {
    points.push_back({{"tweet_id", id(pt.tweet_id)},
                      {"created_at", format_iso8601(pt.created_at)},
                      {"retweet_count", pt.retweet_count},
                      {"followers_count", pt.followers_count},
                      {"verified", pt.verified},
                      {"color_class", pt.color_class},
                      {"user_id", id(pt.user_id)},
                      {"screen_name", pt.screen_name},
                      {"text", pt.text}});
  }
  json bursts = json::array();
  for (const auto& s : scores) {
    bursts.push_back({{"index", s.interval_index},
                      {"burstiness", s.burstiness},
                      {"rt", s.rt},
                      {"rt_prev", s.rt_prev}});
  }
  return {{"breaking_interval", to_json(p.breaking_interval)},
          {"points", points},
          {"originator", p.originator ? json(id(*p.originator)) : json(nullptr)},
          {"burstiness", bursts}};
}

inline json to_json(const std::vector<TimelineSeries>& series) {
  json out = json::array();
  for (const auto& s : series) {
    json bins = json::array();
    for (const auto& b : s.bins) {
      bins.push_back({{"interval_start", format_iso8601(b.interval_start)}, {"count", b.count}});
    }
    out.push_back({{"label", s.label}, {"bins", bins}});
  }
  return {{"bin_seconds", kBinSeconds}, {"series", out}};
}

inline json node_json(const GraphNode& n) {
  return {{"id", id(n.user_id)},
          {"screen_name", n.screen_name},
          {"verified", n.verified},
          {"followers_count", n.followers_count},
          {"description", n.description},
          {"tweets_in_story", n.tweets_in_story}};
}

/// Node-link document: nodes carry degrees and community ids, edges weights.
inline json to_json(const RetweetGraph& g, const CommunityAssignment& communities) {
  std::map<UserId, std::pair<std::int64_t, std::int64_t>> degree;  // in, out (distinct)
  std::map<UserId, std::int64_t> received;
  for (const auto& e : g.edges) {
    ++degree[e.author].first;
    ++degree[e.retweeter].second;
    received[e.author] += e.weight;
  }
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    auto j = node_json(n);
    j["in_degree"] = degree[n.user_id].first;
    j["out_degree"] = degree[n.user_id].second;
    j["retweets_received"] = received[n.user_id];
    j["community"] = communities.of(n.user_id).value_or(0);
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"source", id(e.retweeter)}, {"target", id(e.author)}, {"weight", e.weight}});
  }
  return {{"directed", true},
          {"nodes", nodes},
          {"edges", edges},
          {"modularity", communities.modularity_value},
          {"community_count", communities.community_count()}};
}

inline json to_json(const CoRetweetedGraph& g, const CommunityAssignment& communities) {
  std::map<UserId, std::int64_t> degree, strength;
  for (const auto& e : g.edges) {
    ++degree[e.a];
    ++degree[e.b];
    strength[e.a] += e.weight;
    strength[e.b] += e.weight;
  }
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    auto j = node_json(n);
    j["degree"] = degree[n.user_id];
    j["weighted_degree"] = strength[n.user_id];
    j["community"] = communities.of(n.user_id).value_or(0);
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"source", id(e.a)}, {"target", id(e.b)}, {"weight", e.weight}});
  }
  return {{"directed", false},
          {"nodes", nodes},
          {"edges", edges},
          {"modularity", communities.modularity_value},
          {"community_count", communities.community_count()}};
}

inline json to_json(const LinkBibliography& b) {
  json entries = json::array();
  for (const auto& e : b.entries) {
    json ids = json::array();
    for (const auto t : e.tweet_ids) ids.push_back(id(t));
    entries.push_back({{"url", e.canonical_url},
                       {"tweet_count", e.tweet_count},
                       {"distinct_user_count", e.distinct_user_count},
                       {"tweet_ids", ids}});
  }
  return {{"entries", entries}};
}

inline json to_json(const Actor& a) {
  return {{"user_id", id(a.user_id)},
          {"screen_name", a.screen_name},
          {"distinct_retweeters", a.distinct_retweeters},
          {"retweet_events", a.retweet_events}};
}

inline json to_json(const InvestigationSummary& s) {
  json propagators = json::array();
  for (const auto& a : s.top_propagators) propagators.push_back(to_json(a));
  json j = {{"originator", nullptr},
            {"break_time", format_iso8601(s.break_time)},
            {"burst_strength", s.burst_strength},
            {"still_spreading", s.still_spreading},
            {"top_propagators", propagators},
            {"negation_present", s.negation_present},
            {"first_negation_time", nullptr},
            {"metrics", to_json(s.metrics)},
            {"headline_text", s.headline_text}};
  if (s.originator) {
    j["originator"] = {{"tweet_id", id(s.originator->tweet_id)},
                       {"screen_name", s.originator->screen_name},
                       {"retweet_count", s.originator->retweet_count},
                       {"created_at", format_iso8601(s.originator->created_at)}};
  }
  if (s.first_negation_time) j["first_negation_time"] = format_iso8601(*s.first_negation_time);
  return j;
}

inline json to_json(const KeywordRating& r) {
  return {{"term", r.term},
          {"cohesion", r.cohesion},
          {"affinity", r.affinity},
          {"rating", r.rating},
          {"sample_size", r.sample_size}};
}

inline json to_json(const std::vector<KeywordSuggestion>& s) {
  json out = json::array();
  for (const auto& k : s) out.push_back({{"term", k.term}, {"document_frequency", k.document_frequency}});
  return out;
}

}  // namespace trails::doc
