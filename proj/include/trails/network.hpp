#pragma once

// Retweet and co-retweeted networks, Louvain community detection and main
// actor ranking.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trails/domain.hpp"
#include "trails/relevancy.hpp"

namespace trails {

struct GraphNode {
  UserId user_id = 0;
  std::string screen_name;
  bool verified = false;
  std::int64_t followers_count = 0;
  std::string description;
  std::size_t tweets_in_story = 0;
};

/// Retweeter -> retweeted author; weight counts retweet events.
struct RetweetEdge {
  UserId retweeter = 0;
  UserId author = 0;
  std::int64_t weight = 0;
};

struct RetweetGraph {
  std::vector<GraphNode> nodes;    // ascending user_id
  std::vector<RetweetEdge> edges;  // ascending (retweeter, author)

  [[nodiscard]] std::optional<std::size_t> node_index(UserId id) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                     [](const GraphNode& n, UserId v) { return n.user_id < v; });
    if (it == nodes.end() || it->user_id != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  /// Number of distinct users who retweeted `author`.
  [[nodiscard]] std::size_t distinct_retweeters(UserId author) const {
    return static_cast<std::size_t>(std::count_if(
        edges.begin(), edges.end(), [&](const RetweetEdge& e) { return e.author == author; }));
  }

  [[nodiscard]] std::int64_t retweets_received(UserId author) const {
    std::int64_t n = 0;
    for (const auto& e : edges) {
      if (e.author == author) n += e.weight;
    }
    return n;
  }
};

/// Nodes are every author in the story plus every retweeted author; edges
/// come only from retweet records, never self-loops. Edges lighter than
/// `min_weight` are dropped.
inline RetweetGraph build_retweet_graph(const RelevantSet& relevant, std::int64_t min_weight = 1) {
  std::map<UserId, GraphNode> nodes;
  auto touch = [&](const UserRef& u) -> GraphNode& {
    auto [it, inserted] = nodes.try_emplace(u.user_id);
    if (inserted) {
      it->second.user_id = u.user_id;
      it->second.screen_name = u.screen_name;
      it->second.verified = u.verified;
      it->second.followers_count = u.followers_count;
      it->second.description = u.description;
    }
    return it->second;
  };
  std::map<std::pair<UserId, UserId>, std::int64_t> weights;
  for (const auto& t : relevant.tweets) {
    ++touch(t.author).tweets_in_story;
    if (!t.is_retweet()) continue;
    const auto orig = relevant.retweeted_authors.find(*t.retweet_of);
    if (orig == relevant.retweeted_authors.end()) continue;
    touch(orig->second);
    if (orig->second.user_id == t.author.user_id) continue;
    ++weights[{t.author.user_id, orig->second.user_id}];
  }
  RetweetGraph g;
  g.nodes.reserve(nodes.size());
  for (auto& [_, n] : nodes) g.nodes.push_back(std::move(n));
  for (const auto& [pair, w] : weights) {
    if (w >= min_weight) g.edges.push_back({pair.first, pair.second, w});
  }
  return g;
}

/// Undirected author-author edge; weight = number of distinct users who
/// retweeted both.
struct CoRetweetEdge {
  UserId a = 0;  // a < b
  UserId b = 0;
  std::int64_t weight = 0;

  bool operator==(const CoRetweetEdge&) const = default;
};

struct CoRetweetedGraph {
  std::vector<GraphNode> nodes;      // every retweeted author, ascending user_id
  std::vector<CoRetweetEdge> edges;  // ascending (a, b)

  [[nodiscard]] std::size_t degree(UserId id) const {
    return static_cast<std::size_t>(std::count_if(
        edges.begin(), edges.end(), [&](const CoRetweetEdge& e) { return e.a == id || e.b == id; }));
  }

  [[nodiscard]] std::int64_t weight(UserId x, UserId y) const {
    if (y < x) std::swap(x, y);
    for (const auto& e : edges) {
      if (e.a == x && e.b == y) return e.weight;
    }
    return 0;
  }
};

inline CoRetweetedGraph build_coretweeted_graph(const RetweetGraph& rt) {
  std::map<UserId, std::vector<UserId>> retweeted_by;  // retweeter -> authors
  std::vector<UserId> authors;
  for (const auto& e : rt.edges) {
    retweeted_by[e.retweeter].push_back(e.author);
    authors.push_back(e.author);
  }
  std::sort(authors.begin(), authors.end());
  authors.erase(std::unique(authors.begin(), authors.end()), authors.end());

  std::map<std::pair<UserId, UserId>, std::int64_t> weights;
  for (auto& [_, list] : retweeted_by) {
    std::sort(list.begin(), list.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) ++weights[{list[i], list[j]}];
    }
  }
  CoRetweetedGraph g;
  for (const auto id : authors) g.nodes.push_back(rt.nodes[*rt.node_index(id)]);
  g.edges.reserve(weights.size());
  for (const auto& [pair, w] : weights) g.edges.push_back({pair.first, pair.second, w});
  return g;
}

// ---------------------------------------------------------------------------
// Community detection

/// Undirected weighted graph in adjacency-list form. A self-loop entry holds
/// the full internal weight (both directions) of an aggregated community.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;

  explicit WeightedGraph(std::size_t n = 0) : adj(n) {}

  [[nodiscard]] std::size_t size() const { return adj.size(); }

  void add_edge(std::size_t u, std::size_t v, double w) {
    if (u == v) {
      adj[u].emplace_back(u, 2.0 * w);
      return;
    }
    adj[u].emplace_back(v, w);
    adj[v].emplace_back(u, w);
  }

  [[nodiscard]] double degree(std::size_t u) const {
    double k = 0.0;
    for (const auto& [_, w] : adj[u]) k += w;
    return k;
  }

  [[nodiscard]] double total_weight() const {  // 2m
    double s = 0.0;
    for (std::size_t u = 0; u < adj.size(); ++u) s += degree(u);
    return s;
  }
};

inline double modularity(const WeightedGraph& g, const std::vector<std::size_t>& community) {
  const double m2 = g.total_weight();
  if (m2 <= 0.0) return 0.0;
  std::size_t k = 0;
  for (const auto c : community) k = std::max(k, c + 1);
  std::vector<double> inside(k, 0.0), total(k, 0.0);
  for (std::size_t u = 0; u < g.size(); ++u) {
    total[community[u]] += g.degree(u);
    for (const auto& [v, w] : g.adj[u]) {
      if (community[v] == community[u]) inside[community[u]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) q += inside[c] / m2 - (total[c] / m2) * (total[c] / m2);
  return q;
}

namespace detail {

// One local-moving phase. Nodes are visited in index order; a node moves
// only for a strictly positive gain and ties go to the lowest community id.
// Returns true if any node moved.
inline bool local_moving(const WeightedGraph& g, std::vector<std::size_t>& community) {
  constexpr double kEps = 1e-12;
  const std::size_t n = g.size();
  const double m2 = g.total_weight();
  if (m2 <= 0.0) return false;
  std::vector<double> k(n), tot(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    k[u] = g.degree(u);
    tot[community[u]] += k[u];
  }
  bool moved_any = false;
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t own = community[u];
      touched.clear();
      for (const auto& [v, w] : g.adj[u]) {
        if (v == u) continue;
        const std::size_t c = community[v];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= k[u];
      auto gain = [&](std::size_t c) { return link[c] - tot[c] * k[u] / m2; };
      std::size_t best = own;
      double best_gain = gain(own);
      std::sort(touched.begin(), touched.end());
      for (const auto c : touched) {
        if (c == own) continue;
        const double gc = gain(c);
        if (gc > best_gain + kEps) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += k[u];
      for (const auto c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) {
        community[u] = best;
        moved = true;
        moved_any = true;
      }
    }
    if (!moved) break;
  }
  return moved_any;
}

// Renumbers community ids to 0..k-1 by first appearance in node order.
inline std::size_t compact(std::vector<std::size_t>& community) {
  std::unordered_map<std::size_t, std::size_t> remap;
  for (auto& c : community) {
    auto [it, _] = remap.try_emplace(c, remap.size());
    c = it->second;
  }
  return remap.size();
}

}  // namespace detail

/// Multi-level greedy modularity optimisation (Louvain). Deterministic for a
/// given node order. Returns each node's community, numbered by first
/// appearance.
inline std::vector<std::size_t> louvain(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> assignment(n);
  std::iota(assignment.begin(), assignment.end(), std::size_t{0});
  WeightedGraph level = graph;
  for (int depth = 0; depth < 64; ++depth) {
    std::vector<std::size_t> community(level.size());
    std::iota(community.begin(), community.end(), std::size_t{0});
    if (!detail::local_moving(level, community)) break;
    const std::size_t k = detail::compact(community);
    for (auto& a : assignment) a = community[a];
    std::map<std::pair<std::size_t, std::size_t>, double> agg;
    for (std::size_t u = 0; u < level.size(); ++u) {
      for (const auto& [v, w] : level.adj[u]) {
        const auto cu = community[u], cv = community[v];
        if (cu <= cv) agg[{cu, cv}] += w;
      }
    }
    WeightedGraph next(k);
    for (const auto& [pair, w] : agg) {
      if (pair.first == pair.second) {
        next.adj[pair.first].emplace_back(pair.first, w);
      } else {
        next.adj[pair.first].emplace_back(pair.second, w);
        next.adj[pair.second].emplace_back(pair.first, w);
      }
    }
    level = std::move(next);
  }
  detail::compact(assignment);
  return assignment;
}

struct CommunityAssignment {
  std::vector<UserId> nodes;          // ascending user_id
  std::vector<std::size_t> community; // aligned with nodes
  double modularity_value = 0.0;

  [[nodiscard]] std::optional<std::size_t> of(UserId id) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return std::nullopt;
    return community[static_cast<std::size_t>(it - nodes.begin())];
  }

  [[nodiscard]] std::size_t community_count() const {
    return community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  }
};

namespace detail {

template <typename Node, typename EdgeFn>
CommunityAssignment communities_of(const std::vector<Node>& nodes, EdgeFn&& for_each_edge,
                                   bool weighted) {
  CommunityAssignment out;
  for (const auto& n : nodes) out.nodes.push_back(n.user_id);
  WeightedGraph g(nodes.size());
  auto index = [&](UserId id) {
    return static_cast<std::size_t>(std::lower_bound(out.nodes.begin(), out.nodes.end(), id) -
                                    out.nodes.begin());
  };
  // Parallel directed edges collapse into one undirected edge.
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for_each_edge([&](UserId x, UserId y, double w) {
    auto u = index(x), v = index(y);
    if (u == v) return;
    if (v < u) std::swap(u, v);
    merged[{u, v}] += weighted ? w : 1.0;
  });
  for (const auto& [pair, w] : merged) g.add_edge(pair.first, pair.second, weighted ? w : 1.0);
  out.community = louvain(g);
  out.modularity_value = modularity(g, out.community);
  return out;
}

}  // namespace detail

/// Communities of the retweet network, with edge direction ignored.
inline CommunityAssignment detect_communities(const RetweetGraph& g, bool weighted = true) {
  return detail::communities_of(
      g.nodes,
      [&](auto&& emit) {
        for (const auto& e : g.edges) emit(e.retweeter, e.author, double(e.weight));
      },
      weighted);
}

inline CommunityAssignment detect_communities(const CoRetweetedGraph& g, bool weighted = true) {
  return detail::communities_of(
      g.nodes,
      [&](auto&& emit) {
        for (const auto& e : g.edges) emit(e.a, e.b, double(e.weight));
      },
      weighted);
}

// ---------------------------------------------------------------------------
// Main actors

struct Actor {
  UserId user_id = 0;
  std::string screen_name;
  std::size_t distinct_retweeters = 0;
  std::int64_t retweet_events = 0;
};

/// Top-k retweeted authors by distinct retweeters, then retweet events, then
/// lower user id.
inline std::vector<Actor> main_actors(const RetweetGraph& rt, std::size_t k) {
  std::map<UserId, Actor> by_author;
  for (const auto& e : rt.edges) {
    auto& a = by_author[e.author];
    a.user_id = e.author;
    ++a.distinct_retweeters;
    a.retweet_events += e.weight;
  }
  std::vector<Actor> out;
  for (auto& [id, a] : by_author) {
    a.screen_name = rt.nodes[*rt.node_index(id)].screen_name;
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const Actor& x, const Actor& y) {
    if (x.distinct_retweeters != y.distinct_retweeters) {
      return x.distinct_retweeters > y.distinct_retweeters;
    }
    if (x.retweet_events != y.retweet_events) return x.retweet_events > y.retweet_events;
    return x.user_id < y.user_id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace trails
