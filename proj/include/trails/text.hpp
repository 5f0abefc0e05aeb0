#pragma once

// Tokenization, keyword matching and term-frequency similarity shared by
// search, relevancy, negation and clustering.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trails::text {

namespace detail {

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point starting at `pos`; malformed bytes decode as
// themselves (Latin-1 fallback) so arbitrary input never throws.
inline char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) -> int {
    if (pos + i >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + i]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    if (int c1 = cont(1); c1 >= 0) {
      pos += 2;
      return (char32_t(b0 & 0x1F) << 6) | char32_t(c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      pos += 3;
      return (char32_t(b0 & 0x0F) << 12) | (char32_t(c1) << 6) | char32_t(c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      pos += 4;
      return (char32_t(b0 & 0x07) << 18) | (char32_t(c1) << 12) |
             (char32_t(c2) << 6) | char32_t(c3);
    }
  }
  ++pos;
  return b0;
}

inline char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  // Latin-1 supplement capitals, minus the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0x178) return 0xFF;
  // Latin Extended-A alternates upper/lower in pairs.
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 && cp != 0x138 &&
      cp != 0x149 && cp != 0x17F) {
    const bool odd_lower = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (odd_lower ? (cp % 2 == 1) : (cp % 2 == 0)) return cp + 1;
  }
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;  // Greek
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                  // Cyrillic
  return cp;
}

inline bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '_';
  }
  if (cp < 0xC0) return false;  // Latin-1 punctuation and symbols (¡ ¿ « » ...)
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, arrows, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;  // emoji
  if (cp == 0xFE0F || cp == 0x200D) return false;
  return true;
}

}  // namespace detail

/// Lowercases ASCII and the common Latin, Greek and Cyrillic capitals.
inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = detail::decode_utf8(s, pos);
    const char32_t folded = detail::fold_case(cp);
    if (folded == cp) {
      out.append(s.substr(start, pos - start));
    } else {
      detail::append_utf8(out, folded);
    }
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Splits text into lowercase word tokens. Punctuation separates tokens and
/// is dropped, except a leading '#' or '@' which stays attached to the word
/// it introduces ("#avión", "@user").
inline std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  auto flush = [&] {
    if (!current.empty() && current != "#" && current != "@") tokens.push_back(current);
    current.clear();
  };
  while (pos < raw.size()) {
    const char32_t cp = detail::fold_case(detail::decode_utf8(raw, pos));
    if (cp == '#' || cp == '@') {
      flush();
      current.push_back(static_cast<char>(cp));
    } else if (detail::is_word_char(cp)) {
      detail::append_utf8(current, cp);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

/// Removes http(s) links and "www." links from raw text.
inline std::string strip_urls(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  auto starts_with_ci = [&](std::size_t at, std::string_view prefix) {
    if (at + prefix.size() > raw.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      char c = raw[at + k];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      if (c != prefix[k]) return false;
    }
    return true;
  };
  while (i < raw.size()) {
    const bool boundary = i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1]));
    if (boundary && (starts_with_ci(i, "http://") || starts_with_ci(i, "https://") ||
                     starts_with_ci(i, "www."))) {
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      continue;
    }
    out.push_back(raw[i++]);
  }
  return out;
}

/// Tokens used for similarity: links and @mentions removed, hashtags kept.
inline std::vector<std::string> similarity_tokens(std::string_view raw) {
  auto tokens = tokenize(strip_urls(raw));
  std::erase_if(tokens, [](const std::string& t) { return t.front() == '@'; });
  return tokens;
}

/// Sparse raw term-frequency vector, sorted by term.
class TermVector {
 public:
  TermVector() = default;

  explicit TermVector(std::vector<std::string> tokens) {
    std::sort(tokens.begin(), tokens.end());
    for (auto& t : tokens) {
      if (!entries_.empty() && entries_.back().first == t) {
        ++entries_.back().second;
      } else {
        entries_.emplace_back(std::move(t), 1.0);
      }
    }
    double sq = 0.0;
    for (const auto& [_, c] : entries_) sq += c * c;
    norm_ = std::sqrt(sq);
  }

  static TermVector from_text(std::string_view raw) { return TermVector(similarity_tokens(raw)); }

  [[nodiscard]] double norm() const { return norm_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }

  [[nodiscard]] double dot(const TermVector& other) const {
    double acc = 0.0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        acc += a->second * b->second;
        ++a;
        ++b;
      }
    }
    return acc;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
  double norm_ = 0.0;
};

/// Cosine similarity; 0 when either vector is empty.
inline double cosine(const TermVector& a, const TermVector& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::clamp(c, 0.0, 1.0);
}

/// A keyword or phrase compiled to its token sequence. Single tokens match
/// whole tokens; phrases match contiguous token runs.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::string_view term) : tokens_(tokenize(term)) {}

  [[nodiscard]] bool empty() const { return tokens_.empty(); }
  [[nodiscard]] std::span<const std::string> tokens() const { return tokens_; }

  [[nodiscard]] bool matches(std::span<const std::string> haystack) const {
    if (tokens_.empty() || haystack.size() < tokens_.size()) return false;
    for (std::size_t i = 0; i + tokens_.size() <= haystack.size(); ++i) {
      if (std::equal(tokens_.begin(), tokens_.end(), haystack.begin() + i)) return true;
    }
    return false;
  }

  [[nodiscard]] bool matches_text(std::string_view raw) const { return matches(tokenize(raw)); }

 private:
  std::vector<std::string> tokens_;
};

}  // namespace trails::text
