#pragma once

// Two-level candidate selection: best of the extractive pair, best of the
// abstractive backends, then best across the two branches.

#include <future>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "instasum/abstractive.hpp"
#include "instasum/error.hpp"
#include "instasum/extractive.hpp"
#include "instasum/similarity.hpp"
#include "instasum/summary.hpp"

namespace instasum {

struct SelectorConfig {
  double alpha = 0.5;
  double tie_epsilon = 0.01;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
    if (!(tie_epsilon >= 0.0)) throw ArgumentError("tie_epsilon must be non-negative");
  }
};

enum class Branch { kExtractive, kAbstractive };

inline const char* to_string(Branch b) { return b == Branch::kExtractive ? "extractive" : "abstractive"; }

inline Branch branch_from_string(std::string_view s) {
  if (s == "extractive") return Branch::kExtractive;
  if (s == "abstractive") return Branch::kAbstractive;
  throw ArgumentError("unknown branch: " + std::string(s));
}

/// A backend that produced no candidate for a post.
struct SkipRecord {
  std::string backend;
  std::string error;  // backend-timeout, backend-protocol, ...
  std::string message;

  bool operator==(const SkipRecord&) const = default;
};

struct HybridResult {
  std::string post_id;
  SummaryCandidate extractive_choice;
  std::optional<SummaryCandidate> abstractive_choice;  // empty when every backend failed
  SummaryCandidate final;
  Branch final_branch = Branch::kExtractive;
  bool extractive_fallback = false;
  std::vector<SkipRecord> skipped;

  bool operator==(const HybridResult&) const = default;
};

/// Index of the winner among candidates whose scores are already filled.
/// Highest combined wins; scores within tie_epsilon of the best are tied and
/// resolved by fewer words, then source name, then input position.
inline std::size_t choose_scored(std::span<const SummaryCandidate> candidates, const SelectorConfig& cfg) {
  if (candidates.empty()) throw ArgumentError("no candidates to choose from");
  double best = -1.0;
  for (const auto& c : candidates) {
    if (!c.score) throw ArgumentError("candidate from " + c.source + " has no score");
    best = std::max(best, c.score->combined);
  }
  std::optional<std::size_t> winner;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (best - c.score->combined > cfg.tie_epsilon) continue;
    if (!winner) {
      winner = i;
      continue;
    }
    const auto& w = candidates[*winner];
    if (c.word_count < w.word_count || (c.word_count == w.word_count && c.source < w.source)) winner = i;
  }
  return *winner;
}

/// Scores every candidate against `source_text` and returns the winner with
/// its score filled in.
inline SummaryCandidate pick_best(std::vector<SummaryCandidate> candidates, std::string_view source_text,
                                  const SelectorConfig& cfg, const SimilarityContext& sim) {
  if (candidates.empty()) throw ArgumentError("pick_best needs at least one candidate");
  if (source_text.empty()) throw ArgumentError("pick_best needs a nonempty source text");
  cfg.validate();
  for (auto& c : candidates) c.score = sim(c.text, source_text, cfg.alpha);
  return candidates[choose_scored(candidates, cfg)];
}

/// Best of the abstractive candidates; same rule as pick_best.
inline SummaryCandidate best_abstractive(std::vector<SummaryCandidate> candidates, std::string_view source_text,
                                         double alpha, const SimilarityContext& sim,
                                         double tie_epsilon = SelectorConfig{}.tie_epsilon) {
  return pick_best(std::move(candidates), source_text, SelectorConfig{alpha, tie_epsilon}, sim);
}

/// Runs every summarizer for one post and applies the two-level selection.
/// Failed backends are recorded in `skipped`; when all of them fail the
/// extractive choice becomes final and `extractive_fallback` is set.
inline HybridResult summarize_hybrid(const PreprocessedDoc& doc, std::string_view raw_text,
                                     const SelectorConfig& cfg, const ExtractiveParams& params,
                                     std::span<AbstractiveBackend* const> backends,
                                     const SimilarityContext& sim) {
  if (doc.empty()) throw DegenerateInputError("document " + doc.post_id + " is empty");
  cfg.validate();

  HybridResult result;
  result.post_id = doc.post_id;

  const std::string prepared = joined_text(doc);
  std::vector<std::future<SummaryCandidate>> pending;
  pending.reserve(backends.size());
  for (AbstractiveBackend* backend : backends) {
    AbstractiveRequest req{prepared, backend->max_words()};
    auto policy = backends.size() > 1 ? std::launch::async : std::launch::deferred;
    pending.push_back(std::async(policy, [backend, req] {
      auto c = backend->summarize(req);
      if (c.word_count > req.max_words) c = SummaryCandidate::make(truncate_words(c.text, req.max_words), c.source);
      return c;
    }));
  }

  std::optional<SummaryCandidate> extractive;
  std::string extractive_error;
  try {
    extractive = pick_best({textrank_summary(doc, params), lexrank_summary(doc, params)}, raw_text, cfg, sim);
  } catch (const Error& e) {
    extractive_error = e.what();
  }

  std::vector<SummaryCandidate> abstractive;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      auto c = pending[i].get();
      if (unicode::collapse_whitespace(c.text).empty())
        throw BackendError(BackendErrorKind::kEmpty, backends[i]->name(), "empty summary");
      abstractive.push_back(std::move(c));
    } catch (const BackendError& e) {
      result.skipped.push_back({backends[i]->name(), to_string(e.kind()), e.what()});
    } catch (const std::exception& e) {
      result.skipped.push_back({backends[i]->name(), "backend-error", e.what()});
    }
  }

  if (!extractive) {
    const char* which = abstractive.empty() ? "both branches failed" : "extractive branch failed";
    throw PipelineError("post " + doc.post_id + ": " + which + " (" + extractive_error + ")");
  }
  if (!abstractive.empty()) result.abstractive_choice = pick_best(std::move(abstractive), raw_text, cfg, sim);
  result.extractive_choice = *extractive;

  if (!result.abstractive_choice) {
    result.final = result.extractive_choice;
    result.final_branch = Branch::kExtractive;
    result.extractive_fallback = true;
    return result;
  }

  const std::vector<SummaryCandidate> finalists{result.extractive_choice, *result.abstractive_choice};
  const std::size_t win = choose_scored(finalists, cfg);
  result.final = finalists[win];
  result.final_branch = win == 0 ? Branch::kExtractive : Branch::kAbstractive;
  return result;
}

}  // namespace instasum
