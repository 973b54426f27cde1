#pragma once

// Threshold labeling against reference summaries, confusion matrices and the
// derived retrieval metrics, and branch selection statistics.

#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "instasum/corpus.hpp"
#include "instasum/error.hpp"
#include "instasum/selector.hpp"
#include "instasum/similarity.hpp"

namespace instasum {

enum class Label { kP, kN };
enum class LabelOrigin { kHuman, kThreshold };

inline const char* to_string(Label l) { return l == Label::kP ? "P" : "N"; }
inline const char* to_string(LabelOrigin o) { return o == LabelOrigin::kHuman ? "human" : "threshold"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "P") return Label::kP;
  if (s == "N") return Label::kN;
  return std::nullopt;
}

inline std::optional<LabelOrigin> parse_origin(std::string_view s) {
  if (s == "human") return LabelOrigin::kHuman;
  if (s == "threshold") return LabelOrigin::kThreshold;
  return std::nullopt;
}

using Timestamp = std::chrono::sys_seconds;

/// ISO-8601 UTC, e.g. 2024-03-01T12:00:00Z.
inline std::string format_timestamp(Timestamp t) {
  const std::time_t tt = t.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::optional<Timestamp> parse_timestamp(const std::string& s) {
  std::tm tm{};
  const char* end = strptime(s.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  if (end == nullptr || *end != '\0') return std::nullopt;
  return Timestamp(std::chrono::seconds(timegm(&tm)));
}

struct LabelRecord {
  std::string post_id;
  Label label = Label::kN;
  LabelOrigin origin = LabelOrigin::kThreshold;
  std::string annotator;
  Timestamp timestamp{};

  bool operator==(const LabelRecord&) const = default;
};

/// P when similarity >= threshold (inclusive).
inline Label label_for(double similarity, double threshold) {
  return similarity >= threshold ? Label::kP : Label::kN;
}

inline LabelRecord threshold_label(const HybridResult& result, std::string_view reference, double threshold,
                                   const SelectorConfig& cfg, const SimilarityContext& sim,
                                   Timestamp timestamp = {}) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must lie in [0,1]");
  if (reference.empty()) throw MissingReferenceError(result.post_id);
  const SimilarityScore score = sim(result.final.text, reference, cfg.alpha);
  return LabelRecord{result.post_id, label_for(score.combined, threshold), LabelOrigin::kThreshold, "", timestamp};
}

inline LabelRecord threshold_label(const HybridResult& result, const ReferenceSet& references, double threshold,
                                   const SelectorConfig& cfg, const SimilarityContext& sim,
                                   Timestamp timestamp = {}) {
  const std::string* ref = references.find(result.post_id);
  if (ref == nullptr) throw MissingReferenceError(result.post_id);
  return threshold_label(result, *ref, threshold, cfg, sim, timestamp);
}

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Joins gold and predicted labels by post id. Both sides must cover the same
/// ids exactly once.
inline ConfusionMatrix confusion(std::span<const LabelRecord> gold, std::span<const LabelRecord> predicted) {
  std::map<std::string, Label> gold_by_id, pred_by_id;
  std::set<std::string> offending;
  for (const auto& r : gold)
    if (!gold_by_id.emplace(r.post_id, r.label).second) offending.insert(r.post_id);
  for (const auto& r : predicted)
    if (!pred_by_id.emplace(r.post_id, r.label).second) offending.insert(r.post_id);
  for (const auto& [id, _] : gold_by_id)
    if (!pred_by_id.contains(id)) offending.insert(id);
  for (const auto& [id, _] : pred_by_id)
    if (!gold_by_id.contains(id)) offending.insert(id);
  if (!offending.empty()) throw JoinError({offending.begin(), offending.end()});

  ConfusionMatrix cm;
  for (const auto& [id, g] : gold_by_id) {
    const Label p = pred_by_id.at(id);
    if (g == Label::kP && p == Label::kP) ++cm.tp;
    else if (g == Label::kN && p == Label::kP) ++cm.fp;
    else if (g == Label::kP && p == Label::kN) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double error_rate = 0.0;
  // Set when the metric's denominator was zero; the value is then 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f_measure_undefined = false;
};

inline MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw ArgumentError("metrics need a non-empty confusion matrix");
  MetricsReport r;
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  r.error_rate = 1.0 - r.accuracy;
  if (cm.tp + cm.fp == 0) r.precision_undefined = true;
  else r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  if (cm.tp + cm.fn == 0) r.recall_undefined = true;
  else r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  if (r.precision_undefined || r.recall_undefined || r.precision + r.recall == 0.0) r.f_measure_undefined = true;
  else r.f_measure = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct SelectionStats {
  std::size_t extractive_count = 0;
  std::size_t abstractive_count = 0;
  std::map<std::string, double> mean_similarity_by_branch;  // mean combined score of the final summary
};

inline SelectionStats selection_stats(std::span<const HybridResult> results) {
  SelectionStats stats;
  double sum[2] = {0.0, 0.0};
  for (const auto& r : results) {
    const bool ext = r.final_branch == Branch::kExtractive;
    ++(ext ? stats.extractive_count : stats.abstractive_count);
    sum[ext ? 0 : 1] += r.final.score ? r.final.score->combined : 0.0;
  }
  stats.mean_similarity_by_branch["extractive"] =
      stats.extractive_count ? sum[0] / static_cast<double>(stats.extractive_count) : 0.0;
  stats.mean_similarity_by_branch["abstractive"] =
      stats.abstractive_count ? sum[1] / static_cast<double>(stats.abstractive_count) : 0.0;
  return stats;
}

/// Gold label per post from human records: the latest record of each
/// annotator counts once, majority vote decides, ties go to N.
inline std::vector<LabelRecord> gold_labels(std::span<const LabelRecord> records) {
  std::map<std::string, std::map<std::string, const LabelRecord*>> latest;
  for (const auto& r : records) {
    if (r.origin != LabelOrigin::kHuman) continue;
    auto& slot = latest[r.post_id][r.annotator];
    if (slot == nullptr || r.timestamp >= slot->timestamp) slot = &r;
  }
  std::vector<LabelRecord> gold;
  for (const auto& [id, by_annotator] : latest) {
    std::size_t p = 0, n = 0;
    Timestamp newest{};
    for (const auto& [_, r] : by_annotator) {
      ++(r->label == Label::kP ? p : n);
      newest = std::max(newest, r->timestamp);
    }
    gold.push_back({id, p > n ? Label::kP : Label::kN, LabelOrigin::kHuman, "majority", newest});
  }
  return gold;
}

/// Latest threshold label per post.
inline std::vector<LabelRecord> predicted_labels(std::span<const LabelRecord> records) {
  std::map<std::string, LabelRecord> latest;
  for (const auto& r : records)
    if (r.origin == LabelOrigin::kThreshold) latest[r.post_id] = r;
  std::vector<LabelRecord> out;
  for (auto& [_, r] : latest) out.push_back(std::move(r));
  return out;
}

/// Gold (human majority) and predicted (threshold) labels restricted to the
/// posts that have both.
struct LabelJoin {
  std::vector<LabelRecord> gold;
  std::vector<LabelRecord> predicted;
};

inline LabelJoin join_labels(std::span<const LabelRecord> records) {
  const auto gold = gold_labels(records);
  const auto predicted = predicted_labels(records);
  std::map<std::string, const LabelRecord*> pred_by_id;
  for (const auto& r : predicted) pred_by_id[r.post_id] = &r;
  LabelJoin join;
  for (const auto& g : gold) {
    auto it = pred_by_id.find(g.post_id);
    if (it == pred_by_id.end()) continue;
    join.gold.push_back(g);
    join.predicted.push_back(*it->second);
  }
  return join;
}

inline nlohmann::ordered_json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}, {"total", cm.total()}};
}

/// Metrics document: the five metrics, the confusion counts and the
/// zero-denominator flags. An empty matrix yields zeros with "defined": false.
inline nlohmann::ordered_json metrics_json(const ConfusionMatrix& cm) {
  MetricsReport r;
  const bool defined = cm.total() > 0;
  if (defined) r = metrics(cm);
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_measure"] = r.f_measure;
  j["error_rate"] = r.error_rate;
  j["confusion"] = to_json(cm);
  j["defined"] = defined;
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  if (!defined) {
    flags.push_back("empty");
  } else {
    if (r.precision_undefined) flags.push_back("precision_zero_denominator");
    if (r.recall_undefined) flags.push_back("recall_zero_denominator");
    if (r.f_measure_undefined) flags.push_back("f_measure_zero_denominator");
  }
  j["flags"] = flags;
  return j;
}

inline nlohmann::ordered_json to_json(const SelectionStats& s) {
  nlohmann::ordered_json j;
  j["extractive_count"] = s.extractive_count;
  j["abstractive_count"] = s.abstractive_count;
  j["mean_similarity_by_branch"] = nlohmann::ordered_json(s.mean_similarity_by_branch);
  return j;
}

}  // namespace instasum
