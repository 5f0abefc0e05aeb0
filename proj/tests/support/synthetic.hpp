#pragma once

#include <set>
#include <string>
#include <vector>

#include "support/builders.hpp"
#include "support/plane_fixture.hpp"
#include "trails/network.hpp"

namespace trails::testkit {

inline const std::vector<std::string> kVocab = {"avión", "gran canaria", "mar", "remolcador", "falso",
                                         "foto", "#grancanaria", "rescate", "hoy", "giveaway",
                                         "barco", "costa"};

inline std::vector<TweetRecord> synthetic_corpus(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  std::vector<TweetRecord> out;
  const auto base = at("2014-06-10T00:00:00Z");
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const auto words = rng.uniform(1, 7);
    for (std::int64_t w = 0; w < words; ++w) {
      text += (w ? " " : "") + kVocab[static_cast<std::size_t>(rng.uniform(0, 11))];
    }
    auto t = make_tweet(1 + i, "2014-06-10T00:00:00Z", text, UserId(rng.uniform(1, 500)),
                        rng.uniform(0, 30));
    t.created_at = base.plus(rng.uniform(0, 12 * 86400));
    out.push_back(std::move(t));
  }
  return out;
}

inline InvestigationConfig random_config(SplitMix64& rng) {
  InvestigationConfig c;
  std::vector<std::string> pool = kVocab;
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[static_cast<std::size_t>(rng.uniform(0, std::int64_t(i) - 1))]);
  }
  const auto terms = rng.uniform(1, 3);
  for (std::int64_t i = 0; i < terms; ++i) c.search_terms.push_back(pool[static_cast<std::size_t>(i)]);
  const auto kws = rng.uniform(0, 5);
  std::int64_t optional = 0;
  for (std::int64_t i = 0; i < kws; ++i) {
    const auto role = static_cast<KeywordRole>(rng.uniform(0, 2));
    c.keywords.push_back({pool[static_cast<std::size_t>(3 + i)], role});
    optional += role == KeywordRole::optional ? 1 : 0;
  }
  c.required_mode = rng.unit() < 0.5 ? RequiredMode::all : RequiredMode::at_least_one;
  c.optional_threshold = rng.uniform(0, optional);
  if (rng.unit() < 0.3) {
    const auto start = at("2014-06-16T00:00:00Z").plus(rng.uniform(0, 3 * 86400));
    c.time_window = TimeWindow{start, start.plus(rng.uniform(3600, 2 * 86400))};
  }
  return c;
}

struct RandomStory {
  std::vector<TweetRecord> tweets;
  // (retweeter, author) pairs actually emitted, self-retweets included.
  std::vector<std::pair<UserId, UserId>> events;
};

inline RandomStory random_story(SplitMix64& rng, std::int64_t users, std::int64_t events) {
  RandomStory s;
  const auto authors = std::max<std::int64_t>(1, users / 4);
  for (std::int64_t a = 0; a < authors; ++a) {
    s.tweets.push_back(make_tweet(TweetId(1 + a), "2014-06-13T10:00:00Z", "original", UserId(1 + a), 10));
  }
  for (std::int64_t e = 0; e < events; ++e) {
    const auto of = s.tweets[static_cast<std::size_t>(rng.uniform(0, authors - 1))];
    const auto who = UserId(rng.uniform(1, users));
    s.tweets.push_back(make_retweet(TweetId(100000 + e), "2014-06-13T10:05:00Z", of, who));
    s.events.emplace_back(who, of.author.user_id);
  }
  return s;
}

// Exhaustive triple enumeration: weight(A,B) = |{u : u retweeted A and B, u != A, u != B}|.
inline std::vector<CoRetweetEdge> coretweet_oracle(const RandomStory& s) {
  std::set<std::pair<UserId, UserId>> did;  // (u, A), self-retweets dropped
  std::set<UserId> users, authors;
  for (const auto& [u, a] : s.events) {
    users.insert(u);
    if (u == a) continue;
    did.insert({u, a});
    authors.insert(a);
  }
  std::vector<CoRetweetEdge> out;
  for (const auto a : authors) {
    for (const auto b : authors) {
      if (!(a < b)) continue;
      std::int64_t w = 0;
      for (const auto u : users) w += did.contains({u, a}) && did.contains({u, b}) ? 1 : 0;
      if (w > 0) out.push_back({a, b, w});
    }
  }
  return out;
}

}  // namespace trails::testkit
