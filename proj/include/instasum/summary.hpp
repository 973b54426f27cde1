#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "instasum/unicode.hpp"

namespace instasum {

struct SimilarityScore {
  double cosine = 0.0;
  double semantic = 0.0;
  double combined = 0.0;
  double alpha = 0.5;

  bool operator==(const SimilarityScore&) const = default;
};

inline std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t cp : unicode::decode(text)) {
    const bool space = unicode::is_space(cp);
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

/// A produced summary tagged with the algorithm or backend that produced it.
struct SummaryCandidate {
  std::string text;
  std::string source;  // textrank, lexrank, t5, bart-large-cnn, stub, ...
  std::size_t word_count = 0;
  std::optional<SimilarityScore> score;  // filled during selection

  static SummaryCandidate make(std::string text, std::string source) {
    SummaryCandidate c;
    c.word_count = count_words(text);
    c.text = std::move(text);
    c.source = std::move(source);
    return c;
  }

  bool operator==(const SummaryCandidate&) const = default;
};

}  // namespace instasum
