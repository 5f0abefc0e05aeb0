#pragma once

// In-memory tweet archive with an inverted term index, and a search that
// behaves like the platform's recency-limited search endpoint.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "trails/domain.hpp"
#include "trails/text.hpp"

namespace trails {

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

/// Immutable after construction; safe for concurrent readers.
class Corpus {
 public:
  Corpus() = default;

  /// Builds a corpus from already-validated records. Duplicate ids keep the
  /// first occurrence.
  static Corpus from_records(std::vector<TweetRecord> records) {
    Corpus c;
    std::size_t line = 0;
    for (auto& r : records) c.add(std::move(r), ++line);
    c.finalize();
    return c;
  }

  /// Reads newline-delimited JSON objects. Malformed lines are counted, not
  /// fatal, unless more than half the lines are rejected.
  static Corpus load(std::istream& in, const CorpusEpoch& epoch = {}) {
    Corpus c;
    std::string line;
    std::size_t line_no = 0;
    std::size_t nonblank = 0;
    std::size_t malformed = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      ++nonblank;
      auto raw = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (raw.is_discarded()) {
        c.rejections_.push_back({line_no, "malformed json"});
        ++malformed;
        continue;
      }
      auto res = validate_record(raw, epoch);
      if (!res.ok()) {
        c.rejections_.push_back({line_no, res.rejection});
        ++malformed;
        continue;
      }
      c.add(std::move(*res.record), line_no);
    }
    // Duplicates are redundant capture, not damage, and do not count here.
    if (nonblank > 0 && malformed * 2 > nonblank) {
      throw Error(ErrorKind::invalid_argument,
                  "corpus unusable: " + std::to_string(malformed) + " of " +
                      std::to_string(nonblank) + " records rejected");
    }
    c.finalize();
    return c;
  }

  static Corpus load_file(const std::string& path, const CorpusEpoch& epoch = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read corpus file '" + path + "'");
    return load(in, epoch);
  }

  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] bool empty() const { return records_.empty(); }
  [[nodiscard]] const std::vector<TweetRecord>& records() const { return records_; }
  [[nodiscard]] const TweetRecord& record(std::size_t idx) const { return records_[idx]; }
  [[nodiscard]] const std::vector<std::string>& tokens(std::size_t idx) const {
    return tokens_[idx];
  }
  [[nodiscard]] const std::vector<Rejection>& rejections() const { return rejections_; }
  [[nodiscard]] Timestamp min_time() const { return min_time_; }
  [[nodiscard]] Timestamp max_time() const { return max_time_; }

  [[nodiscard]] std::optional<std::size_t> index_of(TweetId id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] const TweetRecord* find(TweetId id) const {
    const auto idx = index_of(id);
    return idx ? &records_[*idx] : nullptr;
  }

  /// Record indices containing `token`, newest first.
  [[nodiscard]] std::span<const std::uint32_t> postings(const std::string& token) const {
    const auto it = postings_.find(token);
    if (it == postings_.end()) return {};
    return it->second;
  }

  /// Newest-first ordering used by every postings list.
  [[nodiscard]] bool newer(std::uint32_t a, std::uint32_t b) const {
    const auto& ra = records_[a];
    const auto& rb = records_[b];
    if (ra.created_at != rb.created_at) return ra.created_at > rb.created_at;
    return ra.tweet_id > rb.tweet_id;
  }

 private:
  void add(TweetRecord rec, std::size_t line_no) {
    if (by_id_.contains(rec.tweet_id)) {
      rejections_.push_back({line_no, "duplicate id"});
      return;
    }
    by_id_.emplace(rec.tweet_id, records_.size());
    tokens_.push_back(text::tokenize(rec.text));
    records_.push_back(std::move(rec));
  }

  void finalize() {
    for (std::uint32_t i = 0; i < records_.size(); ++i) {
      auto uniq = tokens_[i];
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (auto& t : uniq) postings_[t].push_back(i);
      if (i == 0 || records_[i].created_at < min_time_) min_time_ = records_[i].created_at;
      if (i == 0 || records_[i].created_at > max_time_) max_time_ = records_[i].created_at;
    }
    for (auto& [_, list] : postings_) {
      std::sort(list.begin(), list.end(), [this](auto a, auto b) { return newer(a, b); });
    }
  }

  std::vector<TweetRecord> records_;
  std::vector<std::vector<std::string>> tokens_;
  std::unordered_map<TweetId, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
  std::vector<Rejection> rejections_;
  Timestamp min_time_;
  Timestamp max_time_;
};

/// Recency window applied to searches. `now` defaults to the corpus's newest
/// tweet so archived stories stay searchable.
struct SearchWindow {
  double horizon_days = 9.0;
  std::optional<Timestamp> now;

  [[nodiscard]] Timestamp clock(const Corpus& c) const { return now.value_or(c.max_time()); }
  [[nodiscard]] Timestamp cutoff(const Corpus& c) const {
    return clock(c).plus(-static_cast<std::int64_t>(std::floor(horizon_days * 86400.0)));
  }
};

/// Record indices matching `query`, newest first, capped at `limit`.
inline std::vector<std::uint32_t> search_indices(const Corpus& corpus, std::string_view query,
                                                 const SearchWindow& window, std::size_t limit) {
  const text::Pattern pattern(query);
  if (pattern.empty()) throw Error(ErrorKind::invalid_argument, "empty query");
  if (!(window.horizon_days > 0)) throw Error(ErrorKind::invalid_argument, "horizon must be > 0");
  if (limit == 0 || limit > static_cast<std::size_t>(kMaxTweetsPerTerm)) {
    throw Error(ErrorKind::invalid_argument, "limit must be in [1, 18000]");
  }
  // Drive the scan from the rarest query token.
  std::span<const std::uint32_t> driver = corpus.postings(pattern.tokens().front());
  for (const auto& tok : pattern.tokens()) {
    const auto p = corpus.postings(tok);
    if (p.size() < driver.size()) driver = p;
  }
  const Timestamp cutoff = window.cutoff(corpus);
  const Timestamp now = window.clock(corpus);
  const bool phrase = pattern.tokens().size() > 1;
  std::vector<std::uint32_t> out;
  for (const auto idx : driver) {
    if (corpus.record(idx).created_at < cutoff) break;
    if (corpus.record(idx).created_at > now) continue;
    if (phrase && !pattern.matches(corpus.tokens(idx))) continue;
    out.push_back(idx);
    if (out.size() == limit) break;
  }
  return out;
}

/// Records whose text contains `query` (token or contiguous phrase,
/// case-insensitive) within the recency window, newest first.
inline std::vector<TweetRecord> search(const Corpus& corpus, std::string_view query,
                                       const SearchWindow& window, std::size_t limit) {
  std::vector<TweetRecord> out;
  for (const auto idx : search_indices(corpus, query, window, limit)) {
    out.push_back(corpus.record(idx));
  }
  return out;
}

inline constexpr std::size_t kRecentSample = 100;

/// The newest `count` matches of `term`; an empty term yields nothing.
inline std::vector<TweetRecord> fetch_recent(const Corpus& corpus, std::string_view term,
                                             std::size_t count = kRecentSample,
                                             const SearchWindow& window = {}) {
  if (text::Pattern(term).empty() || corpus.empty()) return {};
  return search(corpus, term, window, count);
}

}  // namespace trails
