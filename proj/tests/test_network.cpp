#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "support/builders.hpp"
#include "support/plane_fixture.hpp"
#include "support/synthetic.hpp"
#include "trails/network.hpp"

using namespace trails;
using testkit::make_retweet;
using testkit::make_tweet;
using testkit::story_of;
using testkit::RandomStory;
using testkit::coretweet_oracle;
using testkit::random_story;

namespace {

double modularity_oracle(const std::vector<std::vector<double>>& w, const std::vector<int>& part) {
  const auto n = w.size();
  double m2 = 0;
  std::vector<double> k(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += w[i][j];
    m2 += k[i];
  }
  double q = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (part[i] == part[j]) q += w[i][j] - k[i] * k[j] / m2;
    }
  }
  return q / m2;
}

// Best partition of a small graph by enumerating restricted growth strings.
std::pair<double, std::vector<int>> best_partition(const std::vector<std::vector<double>>& w) {
  const auto n = static_cast<int>(w.size());
  std::vector<int> cur(static_cast<std::size_t>(n), 0), best;
  double best_q = -1e9;
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == n) {
      const double q = modularity_oracle(w, cur);
      if (q > best_q + 1e-12) {
        best_q = q;
        best = cur;
      }
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      cur[static_cast<std::size_t>(i)] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  cur[0] = 0;
  rec(1, 0);
  return {best_q, best};
}

}  // namespace

TEST(RetweetGraph, NoRetweetsMeansIsolatedAuthors) {
  const auto g = build_retweet_graph(story_of({make_tweet(1, "2014-06-13T10:00:00Z", "a", 7),
                                               make_tweet(2, "2014-06-13T10:00:00Z", "b", 8)}));
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(RetweetGraph, WeightsCountEvents) {
  const auto o = make_tweet(1, "2014-06-13T10:00:00Z", "a", 7);
  const auto o2 = make_tweet(2, "2014-06-13T10:00:00Z", "b", 7);
  const auto g = build_retweet_graph(story_of({o, o2, make_retweet(3, "2014-06-13T10:01:00Z", o, 9),
                                               make_retweet(4, "2014-06-13T10:02:00Z", o2, 9),
                                               make_retweet(5, "2014-06-13T10:02:00Z", o, 7)}));
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].retweeter, 9u);
  EXPECT_EQ(g.edges[0].author, 7u);
  EXPECT_EQ(g.edges[0].weight, 2);
  EXPECT_EQ(g.distinct_retweeters(7), 1u);
  EXPECT_EQ(g.retweets_received(7), 2);
}

TEST(RetweetGraph, MinWeightFilter) {
  const auto o = make_tweet(1, "2014-06-13T10:00:00Z", "a", 7);
  const auto story = story_of({o, make_retweet(3, "2014-06-13T10:01:00Z", o, 9),
                               make_retweet(4, "2014-06-13T10:02:00Z", o, 9),
                               make_retweet(5, "2014-06-13T10:02:00Z", o, 10)});
  EXPECT_EQ(build_retweet_graph(story, 1).edges.size(), 2u);
  EXPECT_EQ(build_retweet_graph(story, 2).edges.size(), 1u);
}

TEST(RetweetGraph, DistinctRetweetersOnFixture) {
  const auto fx = testkit::make_plane_fixture();
  const auto g = build_retweet_graph(story_of(fx.records));
  EXPECT_EQ(g.distinct_retweeters(1001), 554u);
  EXPECT_EQ(g.distinct_retweeters(1002), 236u);
}

TEST(CoRetweeted, Definition) {
  const auto a = make_tweet(1, "2014-06-13T10:00:00Z", "a", 1);
  const auto b = make_tweet(2, "2014-06-13T10:00:00Z", "b", 2);
  const auto rt = build_retweet_graph(story_of({a, b, make_retweet(3, "2014-06-13T10:01:00Z", a, 10),
                                                make_retweet(4, "2014-06-13T10:01:00Z", b, 10),
                                                make_retweet(5, "2014-06-13T10:01:00Z", a, 11)}));
  const auto co = build_coretweeted_graph(rt);
  ASSERT_EQ(co.edges.size(), 1u);
  EXPECT_EQ(co.edges[0], (CoRetweetEdge{1, 2, 1}));
  EXPECT_EQ(co.weight(2, 1), 1);
}

TEST(CoRetweeted, NoSharedRetweetersMeansNoEdges) {
  const auto a = make_tweet(1, "2014-06-13T10:00:00Z", "a", 1);
  const auto b = make_tweet(2, "2014-06-13T10:00:00Z", "b", 2);
  const auto rt = build_retweet_graph(story_of({a, b, make_retweet(3, "2014-06-13T10:01:00Z", a, 10),
                                                make_retweet(4, "2014-06-13T10:01:00Z", b, 11)}));
  EXPECT_TRUE(build_coretweeted_graph(rt).edges.empty());
  EXPECT_EQ(build_coretweeted_graph(rt).nodes.size(), 2u);
}

TEST(CoRetweeted, FiftyUserOracleAndDegreeBound) {
  testkit::SplitMix64 rng(50);
  for (int round = 0; round < 20; ++round) {
    const auto s = random_story(rng, 50, 300);
    const auto rt = build_retweet_graph(story_of(s.tweets));
    const auto co = build_coretweeted_graph(rt);
    ASSERT_EQ(co.edges, coretweet_oracle(s));
    // degree(A) <= authors reached by A's retweeters.
    for (const auto& n : co.nodes) {
      std::set<UserId> reach;
      for (const auto& e : rt.edges) {
        if (e.author != n.user_id) continue;
        for (const auto& f : rt.edges) {
          if (f.retweeter == e.retweeter && f.author != n.user_id) reach.insert(f.author);
        }
      }
      ASSERT_LE(co.degree(n.user_id), reach.size());
    }
  }
}

TEST(CoRetweeted, TopTwoOverlapEqualsEdgeWeight) {
  const auto fx = testkit::make_plane_fixture();
  const auto story = story_of(fx.records);
  const auto rt = build_retweet_graph(story);
  const auto co = build_coretweeted_graph(rt);
  const auto top = main_actors(rt, 2);
  ASSERT_EQ(top.size(), 2u);
  std::set<UserId> first, both;
  for (const auto& e : rt.edges) {
    if (e.author == top[0].user_id) first.insert(e.retweeter);
  }
  for (const auto& e : rt.edges) {
    if (e.author == top[1].user_id && first.contains(e.retweeter)) both.insert(e.retweeter);
  }
  EXPECT_EQ(std::int64_t(both.size()), co.weight(top[0].user_id, top[1].user_id));
  EXPECT_EQ(co.weight(top[0].user_id, top[1].user_id), fx.manifest.top2_coretweet_weight);
}

TEST(Louvain, SingleNode) {
  WeightedGraph g(1);
  const auto c = louvain(g);
  EXPECT_EQ(c, std::vector<std::size_t>{0});
  EXPECT_EQ(modularity(g, c), 0.0);
}

TEST(Louvain, TwoCliquesMatchExhaustiveSearch) {
  WeightedGraph g(10);
  std::vector<std::vector<double>> w(10, std::vector<double>(10, 0.0));
  auto edge = [&](std::size_t a, std::size_t b) {
    g.add_edge(a, b, 1.0);
    w[a][b] = w[b][a] = 1.0;
  };
  for (std::size_t base : {0u, 5u}) {
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) edge(base + i, base + j);
    }
  }
  edge(4, 5);
  const auto c = louvain(g);
  const auto [best_q, best] = best_partition(w);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_EQ(c[i] == c[j], best[i] == best[j]) << i << "," << j;
    }
  }
  EXPECT_NEAR(modularity(g, c), best_q, 1e-12);
  EXPECT_EQ(c, (std::vector<std::size_t>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
}

TEST(Louvain, ComponentsNeverMerge) {
  testkit::SplitMix64 rng(8);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 30;
    WeightedGraph g(n);
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = static_cast<std::size_t>(rng.uniform(0, 3));
    for (int e = 0; e < 60; ++e) {
      const auto a = static_cast<std::size_t>(rng.uniform(0, n - 1));
      const auto b = static_cast<std::size_t>(rng.uniform(0, n - 1));
      if (a != b && comp[a] == comp[b]) g.add_edge(a, b, double(rng.uniform(1, 4)));
    }
    const auto c = louvain(g);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (c[a] == c[b] && a != b && !g.adj[a].empty() && !g.adj[b].empty()) {
          ASSERT_EQ(comp[a], comp[b]);
        }
      }
    }
    ASSERT_EQ(c, louvain(g)) << "deterministic";
  }
}

TEST(Louvain, SmallGraphsNearOptimal) {
  // Louvain is a heuristic: it must never return a partition worse than
  // singletons and should find the optimum on these easy planted graphs.
  testkit::SplitMix64 rng(21);
  for (int round = 0; round < 10; ++round) {
    const std::size_t n = 9;
    WeightedGraph g(n);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const bool same = a / 3 == b / 3;
        if (rng.unit() < (same ? 0.9 : 0.08)) {
          g.add_edge(a, b, 1.0);
          w[a][b] = w[b][a] = 1.0;
        }
      }
    }
    if (g.total_weight() == 0) continue;
    const auto c = louvain(g);
    const auto [best_q, _] = best_partition(w);
    std::vector<int> as_int(c.begin(), c.end());
    EXPECT_NEAR(modularity(g, c), modularity_oracle(w, as_int), 1e-9);
    EXPECT_GE(modularity(g, c), best_q - 0.05) << "round " << round;
  }
}

TEST(Communities, DeterministicOnFixture) {
  const auto fx = testkit::make_plane_fixture();
  const auto rt = build_retweet_graph(story_of(fx.records));
  const auto a = detect_communities(rt);
  const auto b = detect_communities(rt);
  EXPECT_EQ(a.community, b.community);
  EXPECT_EQ(a.nodes.size(), rt.nodes.size());
  EXPECT_GT(a.community_count(), 1u);
  EXPECT_NE(a.of(1001), a.of(1002));
}

TEST(MainActors, Examples) {
  std::vector<TweetRecord> tweets;
  const auto a = make_tweet(1, "2014-06-13T10:00:00Z", "a", 1);
  const auto b = make_tweet(2, "2014-06-13T10:00:00Z", "b", 2);
  const auto c = make_tweet(3, "2014-06-13T10:00:00Z", "c", 3);
  tweets = {a, b, c};
  TweetId next = 100;
  for (int i = 0; i < 554; ++i) tweets.push_back(make_retweet(next++, "2014-06-13T10:01:00Z", a, 1000 + i));
  for (int i = 0; i < 236; ++i) tweets.push_back(make_retweet(next++, "2014-06-13T10:01:00Z", b, 5000 + i));
  for (int i = 0; i < 3; ++i) tweets.push_back(make_retweet(next++, "2014-06-13T10:01:00Z", c, 9000 + i));
  const auto top = main_actors(build_retweet_graph(story_of(tweets)), 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].user_id, 1u);
  EXPECT_EQ(top[0].distinct_retweeters, 554u);
  EXPECT_EQ(top[1].user_id, 2u);
  EXPECT_EQ(top[1].distinct_retweeters, 236u);
  EXPECT_TRUE(main_actors(RetweetGraph{}, 5).empty());
}

TEST(MainActors, TieOnBothKeysPrefersLowerId) {
  const auto a = make_tweet(1, "2014-06-13T10:00:00Z", "a", 20);
  const auto b = make_tweet(2, "2014-06-13T10:00:00Z", "b", 10);
  const auto top = main_actors(
      build_retweet_graph(story_of({a, b, make_retweet(3, "2014-06-13T10:01:00Z", a, 99),
                                    make_retweet(4, "2014-06-13T10:01:00Z", b, 99)})),
      2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].user_id, 10u);
  EXPECT_EQ(top[1].user_id, 20u);
}
