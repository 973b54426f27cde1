#pragma once

// Batch runner: load -> filter -> dedup -> preprocess -> hybrid summarize ->
// threshold label -> write the run directory.
//
// Run directory layout:
//   results.jsonl  labels.csv  metrics.json  selection_stats.json  run.log

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <sys/stat.h>

#include <json.hpp>

#include "instasum/abstractive.hpp"
#include "instasum/config.hpp"
#include "instasum/corpus_io.hpp"
#include "instasum/evaluation.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/selector.hpp"
#include "instasum/similarity.hpp"

namespace instasum {

struct RunSummary {
  std::size_t loaded = 0;
  std::size_t processed = 0;        // posts handed to the summarizers
  std::size_t succeeded = 0;
  std::size_t errors = 0;           // per-post failures
  std::size_t excluded_empty = 0;   // degenerate rows left out
  std::size_t duplicates_removed = 0;
  std::size_t filtered_out = 0;
  std::size_t fallbacks = 0;        // results with no abstractive candidate
  std::size_t missing_references = 0;
  bool within_budget = true;

  int exit_status() const { return within_budget ? 0 : 1; }
};

inline nlohmann::ordered_json to_json(const RunSummary& s) {
  return {{"loaded", s.loaded},
          {"filtered_out", s.filtered_out},
          {"excluded_empty", s.excluded_empty},
          {"duplicates_removed", s.duplicates_removed},
          {"processed", s.processed},
          {"succeeded", s.succeeded},
          {"errors", s.errors},
          {"fallbacks", s.fallbacks},
          {"missing_references", s.missing_references},
          {"within_budget", s.within_budget}};
}

/// Everything a run needs, loaded and checked before any output is written.
struct PipelineInputs {
  Corpus corpus;
  ReferenceSet references;
  SimilarityContext similarity;
  std::vector<std::unique_ptr<AbstractiveBackend>> backends;
  Timestamp label_time{};
};

namespace detail {

inline void require_readable(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) throw StartupError(std::string("cannot read ") + what + ": " + path);
}

inline Timestamp file_time(const std::string& path) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0) throw IoError("cannot stat " + path);
  return Timestamp{std::chrono::seconds{st.st_mtime}};
}

}  // namespace detail

inline PipelineInputs load_inputs(const PipelineConfig& config) {
  config.validate();
  detail::require_readable(config.input_path, "input");
  detail::require_readable(config.references_path, "references");
  detail::require_readable(config.stopwords_path, "stopwords");
  detail::require_readable(config.lexicon_path, "lexicon");
  if (!config.abbreviations_path.empty()) detail::require_readable(config.abbreviations_path, "abbreviations");

  PipelineInputs in;
  try {
    in.corpus = load_corpus(config.input_path);
    in.references = load_references(config.references_path);
    in.similarity.preprocess = PreprocessConfig::from_files(config.stopwords_path, config.abbreviations_path);
    in.similarity.lexicon = SynonymLexicon::load(config.lexicon_path);
  } catch (const Error& e) {
    throw StartupError(e.what());
  }

  bool any_reachable = false;
  for (const auto& spec : config.backends) {
    if (spec.is_stub() || probe(spec)) any_reachable = true;
    in.backends.push_back(make_backend(spec));
  }
  if (!any_reachable) throw StartupError("no abstractive backend is reachable and no stub is configured");

  if (config.timestamp) {
    auto ts = parse_timestamp(*config.timestamp);
    if (!ts) throw StartupError("config: timestamp must look like 2024-01-31T00:00:00Z");
    in.label_time = *ts;
  } else {
    in.label_time = detail::file_time(config.input_path);
  }
  return in;
}

/// Runs the batch and writes the run directory. Startup problems throw
/// StartupError before anything is written; per-post failures are logged and
/// counted against the error budget.
inline RunSummary run_pipeline(const PipelineConfig& config) {
  PipelineInputs in = load_inputs(config);
  std::ostringstream log;
  RunSummary summary;
  summary.loaded = in.corpus.posts.size();
  for (const auto& w : in.corpus.warnings) log << "warn " << w << '\n';

  Corpus corpus = std::move(in.corpus);
  if (config.hashtag_filter) {
    Corpus filtered = filter_by_hashtag(corpus, *config.hashtag_filter);
    summary.filtered_out = corpus.posts.size() - filtered.posts.size();
    corpus = std::move(filtered);
  }
  if (config.drop_empty) {
    Corpus nonempty = drop_empty(corpus);
    summary.excluded_empty = corpus.posts.size() - nonempty.posts.size();
    corpus = std::move(nonempty);
  }
  if (config.deduplicate) {
    Corpus unique = deduplicate(corpus);
    summary.duplicates_removed = corpus.posts.size() - unique.posts.size();
    corpus = std::move(unique);
  }

  std::vector<AbstractiveBackend*> backends;
  for (auto& b : in.backends) backends.push_back(b.get());

  const std::size_t n = corpus.posts.size();
  summary.processed = n;
  std::vector<std::variant<std::monostate, HybridResult, std::string>> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const Post& post = corpus.posts[i];
      try {
        const PreprocessedDoc doc = preprocess_post(post, in.similarity.preprocess);
        outcomes[i] = summarize_hybrid(doc, post.raw_text, config.selector, config.extractive, backends, in.similarity);
      } catch (const std::exception& e) {
        outcomes[i] = std::string(e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(config.concurrency, std::max<std::size_t>(n, 1));
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<HybridResult> results;
  std::vector<LabelRecord> labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (auto* err = std::get_if<std::string>(&outcomes[i])) {
      ++summary.errors;
      log << "error post " << corpus.posts[i].id << ": " << *err << '\n';
      continue;
    }
    auto& result = std::get<HybridResult>(outcomes[i]);
    ++summary.succeeded;
    if (result.extractive_fallback) {
      ++summary.fallbacks;
      log << "fallback post " << result.post_id << ": no abstractive candidate\n";
    }
    for (const auto& s : result.skipped) log << "skip post " << result.post_id << " backend " << s.backend << ": " << s.message << '\n';
    try {
      labels.push_back(threshold_label(result, in.references, config.threshold, config.selector, in.similarity, in.label_time));
    } catch (const MissingReferenceError& e) {
      ++summary.missing_references;
      log << "warn " << e.what() << '\n';
    }
    results.push_back(std::move(result));
  }
  summary.within_budget =
      n == 0 || static_cast<double>(summary.errors) <= config.error_budget * static_cast<double>(n);

  std::error_code ec;
  std::filesystem::create_directories(config.output_path, ec);
  if (ec) throw IoError("cannot create run directory " + config.output_path + ": " + ec.message());

  // Human labels from earlier review sessions are kept after the fresh
  // threshold labels.
  std::vector<LabelRecord> all_labels = labels;
  for (auto& r : read_labels(config.labels_file()))
    if (r.origin == LabelOrigin::kHuman) all_labels.push_back(std::move(r));

  write_results(config.run_file("results.jsonl"), results);
  write_labels(config.labels_file(), all_labels);
  const LabelJoin join = join_labels(all_labels);
  write_file_atomic(config.run_file("metrics.json"), metrics_json(confusion(join.gold, join.predicted)).dump(2) + "\n");
  write_file_atomic(config.run_file("selection_stats.json"), to_json(selection_stats(results)).dump(2) + "\n");

  log << "summary " << to_json(summary).dump() << '\n';
  if (!summary.within_budget) log << "error budget exceeded: " << summary.errors << " of " << n << " posts failed\n";
  write_file_atomic(config.run_file("run.log"), log.str());
  return summary;
}

/// Metrics and selection statistics recomputed from an existing run directory.
struct EvalReport {
  nlohmann::ordered_json metrics;
  nlohmann::ordered_json selection;
};

inline EvalReport evaluate_run(const PipelineConfig& config) {
  const std::string results_path = config.run_file("results.jsonl");
  if (!std::filesystem::exists(results_path)) throw StartupError("no results at " + results_path);
  const auto results = read_results(results_path);
  const auto labels = read_labels(config.labels_file());
  const LabelJoin join = join_labels(labels);
  EvalReport report{metrics_json(confusion(join.gold, join.predicted)), to_json(selection_stats(results))};
  write_file_atomic(config.run_file("metrics.json"), report.metrics.dump(2) + "\n");
  write_file_atomic(config.run_file("selection_stats.json"), report.selection.dump(2) + "\n");
  return report;
}

}  // namespace instasum
