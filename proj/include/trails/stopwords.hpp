#pragma once

// Stopword lists used only when suggesting keywords.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace trails::stopwords {

inline constexpr std::array kEnglish = {
    "a",     "about", "after", "all",   "also",  "am",    "an",    "and",   "any",   "are",
    "as",    "at",    "be",    "been",  "but",   "by",    "can",   "could", "did",   "do",
    "does",  "for",   "from",  "get",   "got",   "had",   "has",   "have",  "he",    "her",
    "here",  "his",   "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",
    "just",  "like",  "me",    "more",  "my",    "no",    "not",   "now",   "of",    "on",
    "one",   "or",    "our",   "out",   "over",  "rt",    "said",  "she",   "so",    "some",
    "than",  "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",
    "to",    "too",   "up",    "us",    "via",   "was",   "we",    "were",  "what",  "when",
    "where", "which", "who",   "why",   "will",  "with",  "would", "you",   "your",  "amp",
};

inline constexpr std::array kSpanish = {
    "a",     "al",    "algo",  "como",  "con",   "de",    "del",   "desde", "donde", "el",
    "ella",  "en",    "entre", "era",   "es",    "esa",   "ese",   "eso",   "esta",  "está",
    "este",  "esto",  "fue",   "ha",    "han",   "hay",   "la",    "las",   "le",    "les",
    "lo",    "los",   "más",   "me",    "mi",    "muy",   "ni",    "no",    "nos",   "o",
    "para",  "pero",  "por",   "que",   "qué",   "rt",    "se",    "ser",   "si",    "sí",
    "sin",   "sobre", "son",   "su",    "sus",   "también", "te",  "todo",  "tu",    "un",
    "una",   "uno",   "unos",  "vía",   "y",     "ya",    "yo",    "él",    "han",   "via",
};

/// True if `token` is a stopword for `lang`; unknown or absent tags use
/// every shipped list.
inline bool is_stopword(std::string_view token, const std::optional<std::string>& lang) {
  auto in = [&](const auto& list) {
    return std::find(list.begin(), list.end(), token) != list.end();
  };
  if (lang && *lang == "en") return in(kEnglish);
  if (lang && *lang == "es") return in(kSpanish);
  return in(kEnglish) || in(kSpanish);
}

}  // namespace trails::stopwords
