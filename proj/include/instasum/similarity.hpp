#pragma once

// Term-vector cosine, lexicon-expanded Jaccard, and their weighted mix.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "instasum/error.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/summary.hpp"

namespace instasum {

using TermSet = std::set<std::string>;

struct TermVector {
  std::map<std::string, std::size_t> counts;

  bool empty() const { return counts.empty(); }
  bool operator==(const TermVector&) const = default;
};

inline TermVector term_vector(const std::vector<Token>& tokens) {
  TermVector v;
  for (const auto& t : tokens) ++v.counts[t.surface];
  return v;
}

inline TermSet term_set(const std::vector<Token>& tokens) {
  TermSet s;
  for (const auto& t : tokens) s.insert(t.surface);
  return s;
}

/// dot(a,b) / (|a| |b|), zero when either vector is empty.
inline double cosine_similarity(const TermVector& a, const TermVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, count] : a.counts) {
    na += static_cast<double>(count * count);
    auto it = b.counts.find(term);
    if (it != b.counts.end()) dot += static_cast<double>(count * it->second);
  }
  for (const auto& [_, count] : b.counts) nb += static_cast<double>(count * count);
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

/// Synonym groups; a term may belong to several groups.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  explicit SynonymLexicon(std::vector<TermSet> groups) {
    for (auto& g : groups) add_group(std::move(g));
  }

  /// One group per line, terms separated by tabs, '#' lines are comments.
  static SynonymLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read lexicon: " + path);
    SynonymLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      TermSet group;
      std::size_t start = 0;
      while (start <= line.size()) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) tab = line.size();
        std::string term = normalize(std::string_view(line).substr(start, tab - start));
        if (!term.empty()) group.insert(std::move(term));
        start = tab + 1;
      }
      if (!group.empty()) lex.add_group(std::move(group));
    }
    return lex;
  }

  void add_group(TermSet group) {
    if (group.empty()) throw ArgumentError("synonym group must be nonempty");
    const std::size_t id = groups_.size();
    for (const auto& t : group) index_[t].push_back(id);
    groups_.push_back(std::move(group));
  }

  const std::vector<TermSet>& groups() const { return groups_; }
  bool empty() const { return groups_.empty(); }

  /// The input terms plus every co-member of any group containing them.
  TermSet expand(const TermSet& terms) const {
    TermSet out = terms;
    for (const auto& t : terms) {
      auto it = index_.find(t);
      if (it == index_.end()) continue;
      for (std::size_t id : it->second) out.insert(groups_[id].begin(), groups_[id].end());
    }
    return out;
  }

 private:
  std::vector<TermSet> groups_;
  std::map<std::string, std::vector<std::size_t>> index_;
};

/// Jaccard index of the lexicon-expanded sets. Two empty sets score 1; one
/// empty set scores 0.
inline double semantic_similarity(const TermSet& a, const TermSet& b, const SynonymLexicon& lex) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const TermSet ea = lex.expand(a);
  const TermSet eb = lex.expand(b);
  std::size_t inter = 0;
  for (const auto& t : ea) inter += eb.count(t);
  const std::size_t uni = ea.size() + eb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline SimilarityScore combine_scores(double cosine, double semantic, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
  SimilarityScore s;
  s.cosine = cosine;
  s.semantic = semantic;
  s.alpha = alpha;
  s.combined = alpha * semantic + (1.0 - alpha) * cosine;
  return s;
}

/// Combined similarity of two token lists (already preprocessed).
inline SimilarityScore token_similarity(const std::vector<Token>& a, const std::vector<Token>& b,
                                        double alpha, const SynonymLexicon& lex) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
  return combine_scores(cosine_similarity(term_vector(a), term_vector(b)),
                        semantic_similarity(term_set(a), term_set(b), lex), alpha);
}

/// Runs both texts through the preprocessing chain (stop words removed) and
/// scores them.
inline SimilarityScore combined_similarity(std::string_view text_a, std::string_view text_b, double alpha,
                                           const SynonymLexicon& lex, const PreprocessConfig& cfg) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
  return token_similarity(content_tokens(text_a, cfg), content_tokens(text_b, cfg), alpha, lex);
}

/// Preprocessing config and lexicon bundled for repeated scoring.
struct SimilarityContext {
  PreprocessConfig preprocess;
  SynonymLexicon lexicon;

  SimilarityScore operator()(std::string_view a, std::string_view b, double alpha) const {
    return combined_similarity(a, b, alpha, lexicon, preprocess);
  }
};

}  // namespace instasum
