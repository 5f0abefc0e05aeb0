#pragma once

// Lexicon-based refutation classifier.

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trails/domain.hpp"
#include "trails/relevancy.hpp"
#include "trails/text.hpp"

namespace trails {

inline const std::vector<std::string>& default_negation_terms() {
  static const std::vector<std::string> terms = {
      "hoax", "fake", "untrue", "false", "debunked", "not true", "rumor is false", "no plane",
  };
  return terms;
}

/// Parses a lexicon file: one term or phrase per line, '#' starts a comment.
inline std::vector<std::string> parse_lexicon(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto term = text::trim(line);
    if (!term.empty()) out.emplace_back(term);
  }
  return out;
}

inline std::vector<std::string> load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read lexicon file '" + path + "'");
  return parse_lexicon(in);
}

/// Effective lexicon = (base ∪ added) \ removed, compared on normalized
/// token sequences.
class NegationLexicon {
 public:
  NegationLexicon() : NegationLexicon(default_negation_terms()) {}

  explicit NegationLexicon(std::vector<std::string> base, std::vector<std::string> added = {},
                           std::vector<std::string> removed = {})
      : base_(std::move(base)), added_(std::move(added)), removed_(std::move(removed)) {
    std::set<std::string> drop;
    for (const auto& r : removed_) drop.insert(normalize(r));
    std::set<std::string> seen;
    for (const auto* list : {&base_, &added_}) {
      for (const auto& t : *list) {
        const auto key = normalize(t);
        if (key.empty() || drop.contains(key) || !seen.insert(key).second) continue;
        effective_.emplace_back(t);
        terms_.push_back(key);
      }
    }
    if (effective_.empty()) throw Error(ErrorKind::validation, "negation lexicon is empty");
  }

  /// The default lexicon customized by a story's add/remove lists.
  static NegationLexicon for_config(const InvestigationConfig& c,
                                    std::vector<std::string> base = default_negation_terms()) {
    return NegationLexicon(std::move(base), c.negation_add, c.negation_remove);
  }

  [[nodiscard]] const std::vector<std::string>& effective_terms() const { return terms_; }

  [[nodiscard]] bool matches(std::span<const std::string> tokens) const {
    return std::any_of(effective_.begin(), effective_.end(),
                       [&](const text::Pattern& p) { return p.matches(tokens); });
  }

 private:
  static std::string normalize(std::string_view term) {
    std::string key;
    for (const auto& t : text::tokenize(term)) key += (key.empty() ? "" : " ") + t;
    return key;
  }

  std::vector<std::string> base_, added_, removed_;
  std::vector<text::Pattern> effective_;
  std::vector<std::string> terms_;
};

/// True if any effective term occurs on token boundaries in the text.
/// Retweets are judged by their own full text.
inline bool is_negation(const TweetRecord& tweet, const NegationLexicon& lex) {
  return lex.matches(text::tokenize(tweet.text));
}

struct NegationSplit {
  std::vector<TweetId> negating;
  std::vector<TweetId> non_negating;
};

/// Partitions the story, preserving its order.
inline NegationSplit split_story(const RelevantSet& relevant, const NegationLexicon& lex) {
  NegationSplit out;
  for (const auto& t : relevant.tweets) {
    (is_negation(t, lex) ? out.negating : out.non_negating).push_back(t.tweet_id);
  }
  return out;
}

}  // namespace trails
