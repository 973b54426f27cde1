#pragma once

// Cleaning, normalization, sentence segmentation, tokenization and stop-word
// removal for short social-media posts.

#include <algorithm>
#include <compare>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "instasum/corpus.hpp"
#include "instasum/error.hpp"
#include "instasum/unicode.hpp"

namespace instasum {

struct Token {
  std::string surface;

  auto operator<=>(const Token&) const = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::vector<Token> tokens;      // after stop-word removal
  std::vector<Token> all_tokens;  // before stop-word removal
};

struct PreprocessedDoc {
  std::string post_id;
  std::vector<Sentence> sentences;
  std::vector<Token> flat_tokens;

  bool empty() const { return sentences.empty(); }
};

using WordSet = std::set<std::string, std::less<>>;

/// Reads a one-word-per-line list. Lines starting with '#' and blank lines
/// are skipped; surrounding whitespace is trimmed.
inline WordSet load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read word list: " + path);
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = unicode::collapse_whitespace(line);
    if (word.empty() || word.front() == '#') continue;
    words.insert(std::move(word));
  }
  return words;
}

inline std::set<char32_t> default_blacklist() {
  return {U'!', U'$', U'(', U')', U'*', U'%', U'@'};
}

/// Built-in abbreviations that never end a sentence.
inline WordSet default_abbreviations() {
  return {"dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "vs.", "etc.", "e.g.", "i.e.", "jr.", "sr."};
}

struct PreprocessConfig {
  std::set<char32_t> blacklist = default_blacklist();
  std::string stopword_path;
  WordSet stopwords;
  WordSet abbreviations = default_abbreviations();
  bool lowercase = true;

  static PreprocessConfig from_files(const std::string& stopword_path,
                                     const std::string& abbreviation_path = {}) {
    PreprocessConfig cfg;
    cfg.stopword_path = stopword_path;
    if (!stopword_path.empty()) cfg.stopwords = load_word_list(stopword_path);
    if (!abbreviation_path.empty()) cfg.abbreviations = load_word_list(abbreviation_path);
    return cfg;
  }
};

/// Drops blacklisted and non-printable characters, then collapses whitespace.
inline std::string clean_text(std::string_view raw, const std::set<char32_t>& blacklist) {
  std::u32string kept;
  kept.reserve(raw.size());
  for (char32_t cp : unicode::decode(raw)) {
    if (blacklist.contains(cp) || unicode::is_control(cp)) continue;
    kept.push_back(cp);
  }
  return unicode::collapse_whitespace(unicode::encode(kept));
}

inline std::string normalize(std::string_view text, bool lowercase = true) {
  std::string out = unicode::nfc(text);
  if (lowercase) out = unicode::nfc(unicode::lowercase(out));
  return unicode::collapse_whitespace(out);
}

/// clean_text followed by normalize.
inline std::string prepare_text(std::string_view raw, const PreprocessConfig& cfg) {
  return normalize(clean_text(raw, cfg.blacklist), cfg.lowercase);
}

namespace detail {

inline bool is_terminator(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

inline std::string trim(std::string_view s) {
  return unicode::collapse_whitespace(s);
}

}  // namespace detail

/// Splits after '.', '!' or '?' when followed by whitespace or end of text.
/// A split is suppressed when the word ending at the terminator is a listed
/// abbreviation. Terminators stay attached to their sentence.
inline std::vector<std::string> split_sentences(std::string_view text,
                                                const WordSet& abbreviations = default_abbreviations()) {
  const std::u32string cps = unicode::decode(text);
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t word_start = 0;

  auto emit = [&](std::size_t end) {
    std::string s = detail::trim(unicode::encode(std::u32string_view(cps).substr(start, end - start)));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (unicode::is_space(cp)) {
      word_start = i + 1;
      continue;
    }
    if (!detail::is_terminator(cp)) continue;
    const bool at_boundary = i + 1 == cps.size() || unicode::is_space(cps[i + 1]);
    if (!at_boundary) continue;
    const std::string word = unicode::encode(std::u32string_view(cps).substr(word_start, i + 1 - word_start));
    if (abbreviations.contains(word)) continue;
    emit(i + 1);
  }
  emit(cps.size());
  return out;
}

/// Whitespace split with leading/trailing punctuation stripped from each token.
inline std::vector<Token> tokenize(std::string_view sentence_text) {
  std::vector<Token> tokens;
  const std::u32string cps = unicode::decode(sentence_text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && unicode::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !unicode::is_space(cps[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && unicode::is_punct(cps[b])) ++b;
    while (e > b && unicode::is_punct(cps[e - 1])) --e;
    if (b < e) tokens.push_back(Token{unicode::encode(std::u32string_view(cps).substr(b, e - b))});
    i = j;
  }
  return tokens;
}

inline std::vector<Token> remove_stopwords(const std::vector<Token>& tokens, const WordSet& stoplist) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
               [&](const Token& t) { return !stoplist.contains(t.surface); });
  return out;
}

/// Runs the whole chain on an already prepared (cleaned + normalized) text.
inline PreprocessedDoc preprocess_prepared(std::string post_id, std::string_view prepared,
                                           const PreprocessConfig& cfg) {
  PreprocessedDoc doc;
  doc.post_id = std::move(post_id);
  for (auto& text : split_sentences(prepared, cfg.abbreviations)) {
    Sentence s;
    s.index = doc.sentences.size();
    s.all_tokens = tokenize(text);
    s.tokens = remove_stopwords(s.all_tokens, cfg.stopwords);
    s.text = std::move(text);
    doc.flat_tokens.insert(doc.flat_tokens.end(), s.tokens.begin(), s.tokens.end());
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

inline PreprocessedDoc preprocess_post(const Post& post, const PreprocessConfig& cfg) {
  if (post.raw_text.empty()) throw DegenerateInputError("post " + post.id + " has empty text");
  const std::string prepared = prepare_text(post.raw_text, cfg);
  if (prepared.empty())
    throw DegenerateInputError("post " + post.id + " is empty after cleaning");
  return preprocess_prepared(post.id, prepared, cfg);
}

/// Sentence texts joined by single spaces.
inline std::string joined_text(const PreprocessedDoc& doc) {
  std::string out;
  for (const auto& s : doc.sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

/// Tokens of an arbitrary text after the full chain, stop words removed.
inline std::vector<Token> content_tokens(std::string_view raw, const PreprocessConfig& cfg) {
  return remove_stopwords(tokenize(prepare_text(raw, cfg)), cfg.stopwords);
}

}  // namespace instasum
