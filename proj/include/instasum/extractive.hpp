#pragma once

// Graph-based sentence ranking: TextRank (word overlap) and LexRank (TF-IDF
// cosine), both scored by damped power iteration.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "instasum/error.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/summary.hpp"

namespace instasum {

/// Dense symmetric sentence-similarity graph with zero diagonal.
class SentenceGraph {
 public:
  explicit SentenceGraph(std::size_t n = 0) : n_(n), weights_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }

  /// Sets both (i,j) and (j,i). Diagonal writes are ignored.
  void set(std::size_t i, std::size_t j, double w) {
    if (i == j) return;
    weights_[i * n_ + j] = w;
    weights_[j * n_ + i] = w;
  }

 private:
  std::size_t n_;
  std::vector<double> weights_;
};

struct RankVector {
  std::vector<double> scores;
  std::size_t iterations = 0;
};

struct ExtractiveParams {
  double damping = 0.85;
  double epsilon = 1e-6;
  std::size_t max_iter = 100;
  std::size_t k = 1;
  double lexrank_threshold = 0.1;

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw ArgumentError("damping must lie in (0,1)");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    if (max_iter == 0) throw ArgumentError("max_iter must be positive");
    if (k == 0) throw ArgumentError("k must be positive");
    if (!(lexrank_threshold >= 0.0 && lexrank_threshold < 1.0))
      throw ArgumentError("lexrank_threshold must lie in [0,1)");
  }
};

namespace detail {

inline void require_sentences(const PreprocessedDoc& doc) {
  if (doc.sentences.empty())
    throw DegenerateInputError("document " + doc.post_id + " has no sentences");
}

inline std::set<std::string> token_types(const std::vector<Token>& tokens) {
  std::set<std::string> types;
  for (const auto& t : tokens) types.insert(t.surface);
  return types;
}

}  // namespace detail

/// weight(i,j) = |shared types| / (ln|S_i| + ln|S_j|), denominator 1 when
/// either sentence has fewer than two tokens.
inline SentenceGraph build_textrank_graph(const PreprocessedDoc& doc) {
  detail::require_sentences(doc);
  const std::size_t n = doc.sentences.size();
  std::vector<std::set<std::string>> types(n);
  for (std::size_t i = 0; i < n; ++i) types[i] = detail::token_types(doc.sentences[i].tokens);

  SentenceGraph graph(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t shared = 0;
      for (const auto& t : types[i]) shared += types[j].count(t);
      if (shared == 0) continue;
      const std::size_t len_i = doc.sentences[i].tokens.size();
      const std::size_t len_j = doc.sentences[j].tokens.size();
      double denom = 1.0;
      if (len_i >= 2 && len_j >= 2)
        denom = std::log(static_cast<double>(len_i)) + std::log(static_cast<double>(len_j));
      graph.set(i, j, static_cast<double>(shared) / denom);
    }
  }
  return graph;
}

/// Cosine of per-sentence TF-IDF vectors, idf(t) = ln(n / df(t)) over the
/// document's sentences. Weights below `threshold` are zeroed.
inline SentenceGraph build_lexrank_graph(const PreprocessedDoc& doc, double threshold) {
  detail::require_sentences(doc);
  const std::size_t n = doc.sentences.size();

  std::map<std::string, std::size_t> df;
  std::vector<std::map<std::string, double>> tf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : doc.sentences[i].tokens) tf[i][t.surface] += 1.0;
    for (const auto& [term, _] : tf[i]) ++df[term];
  }

  std::vector<std::map<std::string, double>> vec(n);
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [term, count] : tf[i]) {
      const double idf = std::log(static_cast<double>(n) / static_cast<double>(df[term]));
      const double w = count * idf;
      if (w == 0.0) continue;
      vec[i][term] = w;
      norm[i] += w * w;
    }
    norm[i] = std::sqrt(norm[i]);
  }

  SentenceGraph graph(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm[i] == 0.0 || norm[j] == 0.0) continue;
      double dot = 0.0;
      for (const auto& [term, w] : vec[i]) {
        auto it = vec[j].find(term);
        if (it != vec[j].end()) dot += w * it->second;
      }
      double cos = std::clamp(dot / (norm[i] * norm[j]), 0.0, 1.0);
      if (cos < threshold) cos = 0.0;
      graph.set(i, j, cos);
    }
  }
  return graph;
}

/// Damped stationary scores. Starts uniform, stops once no component moves by
/// epsilon or more (or after max_iter sweeps). Nodes without out-weight spread
/// their score uniformly. The result sums to one.
inline RankVector power_iterate(const SentenceGraph& graph, const ExtractiveParams& params) {
  const std::size_t n = graph.size();
  if (n == 0) throw DegenerateInputError("cannot rank an empty graph");

  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double w = graph(j, k);
      if (!std::isfinite(w) || w < 0.0) throw NumericError("graph weights must be finite and non-negative");
      out_weight[j] += w;
    }
  }

  const double d = params.damping;
  const double teleport = (1.0 - d) / static_cast<double>(n);
  std::vector<double> scores(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  RankVector result;

  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    double dangling = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (out_weight[j] == 0.0) dangling += scores[j];
    const double dangling_share = dangling / static_cast<double>(n);

    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = dangling_share;
      for (std::size_t j = 0; j < n; ++j) {
        if (out_weight[j] == 0.0) continue;
        const double w = graph(j, i);
        if (w != 0.0) incoming += w / out_weight[j] * scores[j];
      }
      next[i] = teleport + d * incoming;
      max_delta = std::max(max_delta, std::abs(next[i] - scores[i]));
    }
    scores.swap(next);
    result.iterations = iter + 1;
    if (max_delta < params.epsilon) break;
  }

  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  for (auto& s : scores) s /= total;
  result.scores = std::move(scores);
  return result;
}

/// Indices of the k best-scoring sentences (ties: lower index), in document order.
/// Scores are compared at 1e-12 resolution so rounding noise cannot reorder ties.
inline std::vector<std::size_t> top_k_in_order(const std::vector<double>& scores, std::size_t k) {
  std::vector<double> key(scores.size());
  std::transform(scores.begin(), scores.end(), key.begin(),
                 [](double s) { return std::round(s * 1e12); });
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

namespace detail {

inline SummaryCandidate assemble(const PreprocessedDoc& doc, const RankVector& rank, std::size_t k,
                                 std::string source) {
  std::string text;
  for (std::size_t idx : top_k_in_order(rank.scores, k)) {
    if (!text.empty()) text.push_back(' ');
    text += doc.sentences[idx].text;
  }
  return SummaryCandidate::make(std::move(text), std::move(source));
}

}  // namespace detail

inline SummaryCandidate textrank_summary(const PreprocessedDoc& doc, const ExtractiveParams& params) {
  params.validate();
  return detail::assemble(doc, power_iterate(build_textrank_graph(doc), params), params.k, "textrank");
}

inline SummaryCandidate lexrank_summary(const PreprocessedDoc& doc, const ExtractiveParams& params) {
  params.validate();
  return detail::assemble(doc, power_iterate(build_lexrank_graph(doc, params.lexrank_threshold), params),
                          params.k, "lexrank");
}

}  // namespace instasum
