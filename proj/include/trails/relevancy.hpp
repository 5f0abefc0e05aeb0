#pragma once

// Keyword-rule filtering of the collected tweets, search-term rating and
// keyword suggestion.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "trails/corpus.hpp"
#include "trails/domain.hpp"
#include "trails/stopwords.hpp"
#include "trails/text.hpp"

namespace trails {

/// InvestigationConfig's keyword rules compiled to token patterns.
class RelevancyRules {
 public:
  explicit RelevancyRules(const InvestigationConfig& config)
      : mode_(config.required_mode),
        threshold_(config.optional_threshold),
        window_(config.time_window) {
    for (const auto& k : config.keywords) {
      text::Pattern p(k.term);
      if (p.empty()) continue;
      switch (k.role) {
        case KeywordRole::required: required_.push_back(std::move(p)); break;
        case KeywordRole::optional: optional_.push_back(std::move(p)); break;
        case KeywordRole::excluded: excluded_.push_back(std::move(p)); break;
      }
    }
  }

  [[nodiscard]] bool accepts(std::span<const std::string> tokens, Timestamp created_at) const {
    for (const auto& p : excluded_) {
      if (p.matches(tokens)) return false;
    }
    if (!required_.empty()) {
      const auto hit = [&](const text::Pattern& p) { return p.matches(tokens); };
      const bool ok = mode_ == RequiredMode::all
                          ? std::all_of(required_.begin(), required_.end(), hit)
                          : std::any_of(required_.begin(), required_.end(), hit);
      if (!ok) return false;
    }
    if (threshold_ > 0) {
      std::int64_t n = 0;
      for (const auto& p : optional_) n += p.matches(tokens) ? 1 : 0;
      if (n < threshold_) return false;
    }
    if (window_ && !window_->contains(created_at)) return false;
    return true;
  }

 private:
  std::vector<text::Pattern> required_, optional_, excluded_;
  RequiredMode mode_;
  std::int64_t threshold_;
  std::optional<TimeWindow> window_;
};

/// The relevancy predicate: exclusions dominate, then required keywords
/// under the configured mode, then the optional-keyword count, then the
/// time window.
inline bool is_relevant(const TweetRecord& tweet, const InvestigationConfig& config) {
  return RelevancyRules(config).accepts(text::tokenize(tweet.text), tweet.created_at);
}

/// The story's tweets, ascending by (created_at, tweet_id).
struct RelevantSet {
  std::vector<TweetRecord> tweets;
  InvestigationConfig config_snapshot;
  std::size_t originals_count = 0;
  std::size_t retweets_count = 0;
  // Author of every original tweet referenced by a retweet in the set,
  // resolved from the corpus (the original may itself fall outside the set).
  std::map<TweetId, UserRef> retweeted_authors;

  [[nodiscard]] bool empty() const { return tweets.empty(); }
  [[nodiscard]] std::size_t size() const { return tweets.size(); }

  [[nodiscard]] std::vector<TweetId> tweet_ids() const {
    std::vector<TweetId> ids;
    ids.reserve(tweets.size());
    for (const auto& t : tweets) ids.push_back(t.tweet_id);
    return ids;
  }

  [[nodiscard]] const TweetRecord* find(TweetId id) const {
    for (const auto& t : tweets) {
      if (t.tweet_id == id) return &t;
    }
    return nullptr;
  }
};

inline bool chronological(const TweetRecord& a, const TweetRecord& b) {
  if (a.created_at != b.created_at) return a.created_at < b.created_at;
  return a.tweet_id < b.tweet_id;
}

/// Assembles a RelevantSet from already-filtered records.
inline RelevantSet make_relevant_set(const Corpus& corpus, std::vector<TweetRecord> tweets,
                                     const InvestigationConfig& config) {
  RelevantSet set;
  set.config_snapshot = config;
  std::sort(tweets.begin(), tweets.end(), chronological);
  set.tweets = std::move(tweets);
  for (const auto& t : set.tweets) {
    if (t.is_retweet()) {
      ++set.retweets_count;
      if (const auto* orig = corpus.find(*t.retweet_of)) {
        set.retweeted_authors.emplace(orig->tweet_id, orig->author);
      }
    } else {
      ++set.originals_count;
    }
  }
  return set;
}

/// Union of per-term searches, deduplicated and filtered. An empty result is
/// a valid "empty story", not an error.
inline RelevantSet build_relevant_set(const Corpus& corpus, const InvestigationConfig& config,
                                      const SearchWindow& window = {}) {
  validate(config);
  const RelevancyRules rules(config);
  std::vector<std::uint32_t> hits;
  if (!corpus.empty()) {
    for (const auto& term : config.search_terms) {
      auto found = search_indices(corpus, term, window,
                                  static_cast<std::size_t>(config.max_tweets_per_term));
      hits.insert(hits.end(), found.begin(), found.end());
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  std::vector<TweetRecord> kept;
  for (const auto idx : hits) {
    if (rules.accepts(corpus.tokens(idx), corpus.record(idx).created_at)) {
      kept.push_back(corpus.record(idx));
    }
  }
  return make_relevant_set(corpus, std::move(kept), config);
}

// ---------------------------------------------------------------------------
// Keyword rating

struct KeywordRating {
  std::string term;
  double cohesion = 0.0;
  double affinity = 0.0;
  double rating = 0.0;
  std::size_t sample_size = 0;
};

struct RatingWeights {
  double cohesion = 0.5;
  double affinity = 0.5;
};

/// Rates a candidate search term by how alike its recent matches are to each
/// other (cohesion) and to the investigative tweet (affinity).
inline KeywordRating rate_keyword(const Corpus& corpus, std::string_view term,
                                  const TweetRecord& investigative, const SearchWindow& window = {},
                                  const RatingWeights& weights = {}) {
  KeywordRating out;
  out.term = std::string(term);
  const auto sample = fetch_recent(corpus, term, kRecentSample, window);
  out.sample_size = sample.size();
  if (sample.empty()) return out;

  std::vector<text::TermVector> vecs;
  vecs.reserve(sample.size());
  for (const auto& t : sample) vecs.push_back(text::TermVector::from_text(t.text));
  const auto target = text::TermVector::from_text(investigative.text);

  double pair_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      pair_sum += text::cosine(vecs[i], vecs[j]);
      ++pairs;
    }
  }
  // A single-tweet sample has no pairs and counts as incoherent.
  out.cohesion = pairs ? pair_sum / double(pairs) : 0.0;
  double aff = 0.0;
  for (const auto& v : vecs) aff += text::cosine(v, target);
  out.affinity = aff / double(vecs.size());
  out.rating = weights.cohesion * out.cohesion + weights.affinity * out.affinity;
  return out;
}

// ---------------------------------------------------------------------------
// Keyword suggestion

struct KeywordSuggestion {
  std::string term;
  std::size_t document_frequency = 0;
};

/// Top-k unigrams, bigrams and hashtags by document frequency across the
/// newest tweets matching the current search terms (or, when there are none
/// yet, the investigative tweet's own content words). Terms already in the
/// config are skipped; ties put bigrams first, then break lexicographically.
inline std::vector<KeywordSuggestion> suggest_keywords(const Corpus& corpus,
                                                       const TweetRecord& investigative,
                                                       const InvestigationConfig& config,
                                                       std::size_t k,
                                                       const SearchWindow& window = {}) {
  const auto& lang = investigative.lang;
  auto stop = [&](const std::string& tok) { return stopwords::is_stopword(tok, lang); };

  std::vector<std::string> seeds = config.search_terms;
  if (seeds.empty()) {
    for (const auto& tok : text::similarity_tokens(investigative.text)) {
      if (!stop(tok) && std::find(seeds.begin(), seeds.end(), tok) == seeds.end()) {
        seeds.push_back(tok);
      }
    }
  }
  std::vector<std::uint32_t> pool;
  for (const auto& s : seeds) {
    if (text::Pattern(s).empty() || corpus.empty()) continue;
    auto found = search_indices(corpus, s, window, kRecentSample);
    pool.insert(pool.end(), found.begin(), found.end());
  }
  std::sort(pool.begin(), pool.end(), [&](auto a, auto b) { return corpus.newer(a, b); });
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.size() > kRecentSample) pool.resize(kRecentSample);

  std::set<std::string> taken;
  auto canonical = [](std::string_view term) {
    std::string key;
    for (const auto& t : text::tokenize(term)) key += (key.empty() ? "" : " ") + t;
    return key;
  };
  for (const auto& s : config.search_terms) taken.insert(canonical(s));
  for (const auto& kw : config.keywords) taken.insert(canonical(kw.term));

  std::map<std::string, std::size_t> df;
  for (const auto idx : pool) {
    const auto toks = text::similarity_tokens(corpus.record(idx).text);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto& t = toks[i];
      if (t.front() == '#') {
        if (t.size() > 1) seen.insert(t);
      } else if (t.size() > 1 && !stop(t)) {
        seen.insert(t);
      }
      if (i + 1 < toks.size()) {
        const auto& u = toks[i + 1];
        if (t.front() != '#' && u.front() != '#' && !stop(t) && !stop(u)) {
          seen.insert(t + " " + u);
        }
      }
    }
    for (const auto& s : seen) ++df[s];
  }

  std::vector<KeywordSuggestion> out;
  for (const auto& [term, n] : df) {
    if (!taken.contains(term)) out.push_back({term, n});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.document_frequency != b.document_frequency) {
      return a.document_frequency > b.document_frequency;
    }
    // A bigram outranks the unigrams it always co-occurs with.
    const bool a_bigram = a.term.find(' ') != std::string::npos;
    const bool b_bigram = b.term.find(' ') != std::string::npos;
    if (a_bigram != b_bigram) return a_bigram;
    return a.term < b.term;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace trails
