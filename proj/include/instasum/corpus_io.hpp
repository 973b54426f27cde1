#pragma once

// Reading and writing corpora, reference summaries, pipeline results and
// label files.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "instasum/corpus.hpp"
#include "instasum/csv.hpp"
#include "instasum/error.hpp"
#include "instasum/evaluation.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/selector.hpp"

namespace instasum {

enum class CorpusFormat { kCsv, kJsonl };

inline CorpusFormat format_for_path(const std::string& path) {
  return std::filesystem::path(path).extension() == ".jsonl" ? CorpusFormat::kJsonl : CorpusFormat::kCsv;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path + ": " + ec.message());
}

namespace detail {

inline std::set<std::string> parse_hashtags(std::string_view cell) {
  std::set<std::string> tags;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t bar = cell.find('|', start);
    if (bar == std::string_view::npos) bar = cell.size();
    std::string tag = unicode::collapse_whitespace(cell.substr(start, bar - start));
    while (!tag.empty() && tag.front() == '#') tag.erase(tag.begin());
    if (!tag.empty()) tags.insert(unicode::lowercase(tag));
    start = bar + 1;
  }
  return tags;
}

inline std::string join_hashtags(const std::set<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) {
    if (!out.empty()) out.push_back('|');
    out += t;
  }
  return out;
}

/// Maps header names to column positions, failing on missing required ones.
inline std::map<std::string, std::size_t> index_header(const csv::Row& header,
                                                       std::initializer_list<std::string_view> required,
                                                       const std::string& path,
                                                       std::vector<std::string>* warnings) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::string name = unicode::collapse_whitespace(header.fields[i]);
    const bool known = std::find(required.begin(), required.end(), name) != required.end();
    if (!known && warnings) warnings->push_back(path + ": ignoring column '" + name + "'");
    cols.emplace(std::move(name), i);
  }
  for (auto name : required)
    if (!cols.contains(std::string(name)))
      throw SchemaError(path + ": missing required column '" + std::string(name) + "'");
  return cols;
}

inline const std::string& cell(const csv::Row& row, std::size_t col) {
  static const std::string empty;
  return col < row.fields.size() ? row.fields[col] : empty;
}

inline void add_post(Corpus& corpus, std::unordered_set<std::string>& seen, Post post, std::size_t line) {
  if (post.id.empty()) throw ValidationError(line, "empty post id");
  if (!seen.insert(post.id).second) throw DuplicateIdError(post.id);
  post.degenerate = post.raw_text.empty();
  if (post.degenerate) corpus.warnings.push_back("row " + std::to_string(line) + ": post " + post.id + " has empty text");
  corpus.posts.push_back(std::move(post));
}

}  // namespace detail

/// Loads a dataset. CSV needs the header columns id, hashtags, text
/// (hashtags '|'-separated); JSONL objects carry the same keys, with
/// hashtags as an array or a '|'-separated string.
inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path);
  const std::string content = read_file(path);
  Corpus corpus;
  corpus.source_path = path;
  std::unordered_set<std::string> seen;

  if (format == CorpusFormat::kCsv) {
    const auto rows = csv::parse(content);
    if (rows.empty()) throw SchemaError(path + ": missing header row");
    const auto cols = detail::index_header(rows.front(), {"id", "hashtags", "text"}, path, &corpus.warnings);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      Post post;
      post.id = detail::cell(row, cols.at("id"));
      post.hashtags = detail::parse_hashtags(detail::cell(row, cols.at("hashtags")));
      post.raw_text = detail::cell(row, cols.at("text"));
      detail::add_post(corpus, seen, std::move(post), row.line);
    }
  } else {
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (unicode::collapse_whitespace(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw SchemaError(path + ": line " + std::to_string(lineno) + " is not a JSON object");
      for (const char* key : {"id", "text"})
        if (!j.contains(key) || !j[key].is_string())
          throw SchemaError(path + ": line " + std::to_string(lineno) + " missing required field '" + key + "'");
      Post post;
      post.id = j["id"].get<std::string>();
      post.raw_text = j["text"].get<std::string>();
      if (auto it = j.find("hashtags"); it != j.end()) {
        if (it->is_string()) {
          post.hashtags = detail::parse_hashtags(it->get<std::string>());
        } else if (it->is_array()) {
          for (const auto& t : *it)
            if (t.is_string()) post.hashtags.merge(detail::parse_hashtags(t.get<std::string>()));
        }
      }
      detail::add_post(corpus, seen, std::move(post), lineno);
    }
  }
  corpus.stats = compute_stats(corpus.posts);
  return corpus;
}

inline Corpus load_corpus(const std::string& path) { return load_corpus(path, format_for_path(path)); }

/// Writes the dataset CSV (id,hashtags,text).
inline void write_corpus(const std::string& path, const Corpus& corpus) {
  std::string out = csv::format_row({"id", "hashtags", "text"});
  for (const auto& p : corpus.posts) out += csv::format_row({p.id, detail::join_hashtags(p.hashtags), p.raw_text});
  write_file_atomic(path, out);
}

/// Posts carrying at least one of `tags`, order preserved.
inline Corpus filter_by_hashtag(const Corpus& corpus, const std::set<std::string>& tags) {
  if (tags.empty()) throw ArgumentError("hashtag filter must be nonempty");
  for (const auto& t : tags)
    if (t.empty() || t.front() == '#' || unicode::lowercase(t) != t)
      throw ArgumentError("hashtag filter entries must be lowercase without '#': '" + t + "'");
  Corpus out;
  out.source_path = corpus.source_path;
  out.warnings = corpus.warnings;
  std::vector<Post> kept;
  for (const auto& p : corpus.posts)
    if (std::any_of(tags.begin(), tags.end(), [&](const std::string& t) { return p.hashtags.contains(t); }))
      kept.push_back(p);
  out.assign(std::move(kept));
  return out;
}

/// Keeps the first post for each normalized text.
inline Corpus deduplicate(const Corpus& corpus) {
  Corpus out;
  out.source_path = corpus.source_path;
  out.warnings = corpus.warnings;
  std::unordered_set<std::string> seen;
  std::vector<Post> kept;
  for (const auto& p : corpus.posts)
    if (seen.insert(normalize(p.raw_text)).second) kept.push_back(p);
  out.assign(std::move(kept));
  return out;
}

/// Removes posts flagged degenerate at load time.
inline Corpus drop_empty(const Corpus& corpus) {
  Corpus out;
  out.source_path = corpus.source_path;
  out.warnings = corpus.warnings;
  std::vector<Post> kept;
  std::copy_if(corpus.posts.begin(), corpus.posts.end(), std::back_inserter(kept),
               [](const Post& p) { return !p.degenerate; });
  out.assign(std::move(kept));
  return out;
}

/// Loads the reference CSV (id,summary).
inline ReferenceSet load_references(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path);
  const auto rows = csv::parse(read_file(path));
  if (rows.empty()) throw SchemaError(path + ": missing header row");
  const auto cols = detail::index_header(rows.front(), {"id", "summary"}, path, nullptr);
  ReferenceSet refs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string& id = detail::cell(row, cols.at("id"));
    const std::string& summary = detail::cell(row, cols.at("summary"));
    if (id.empty()) throw ValidationError(row.line, "empty id");
    if (unicode::collapse_whitespace(summary).empty()) throw ValidationError(row.line, "empty summary for " + id);
    refs.entries[id] = summary;
  }
  return refs;
}

// ---- results ---------------------------------------------------------------

inline nlohmann::ordered_json to_json(const SimilarityScore& s) {
  return {{"cosine", s.cosine}, {"semantic", s.semantic}, {"combined", s.combined}, {"alpha", s.alpha}};
}

inline nlohmann::ordered_json to_json(const SummaryCandidate& c) {
  nlohmann::ordered_json j;
  j["text"] = c.text;
  j["source"] = c.source;
  j["word_count"] = c.word_count;
  j["score"] = c.score ? to_json(*c.score) : nlohmann::ordered_json(nullptr);
  return j;
}

/// Result record. Key order is fixed: id, final_summary, final_source,
/// extractive_choice, abstractive_choice, scores, then final_branch, flags
/// and skipped.
inline nlohmann::ordered_json to_json(const HybridResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.post_id;
  j["final_summary"] = r.final.text;
  j["final_source"] = r.final.source;
  j["extractive_choice"] = to_json(r.extractive_choice);
  j["abstractive_choice"] = r.abstractive_choice ? to_json(*r.abstractive_choice) : nlohmann::ordered_json(nullptr);
  j["scores"] = r.final.score ? to_json(*r.final.score) : nlohmann::ordered_json(nullptr);
  j["final_branch"] = to_string(r.final_branch);
  auto flags = nlohmann::ordered_json::array();
  if (r.extractive_fallback) flags.push_back("extractive-fallback");
  j["flags"] = flags;
  auto skipped = nlohmann::ordered_json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"backend", s.backend}, {"error", s.error}, {"message", s.message}});
  j["skipped"] = skipped;
  return j;
}

namespace detail {

inline SimilarityScore score_from_json(const nlohmann::json& j) {
  return {j.at("cosine").get<double>(), j.at("semantic").get<double>(), j.at("combined").get<double>(),
          j.at("alpha").get<double>()};
}

inline SummaryCandidate candidate_from_json(const nlohmann::json& j) {
  SummaryCandidate c;
  c.text = j.at("text").get<std::string>();
  c.source = j.at("source").get<std::string>();
  c.word_count = j.at("word_count").get<std::size_t>();
  if (auto it = j.find("score"); it != j.end() && !it->is_null()) c.score = score_from_json(*it);
  return c;
}

}  // namespace detail

inline HybridResult result_from_json(const nlohmann::json& j) {
  HybridResult r;
  r.post_id = j.at("id").get<std::string>();
  r.extractive_choice = detail::candidate_from_json(j.at("extractive_choice"));
  if (const auto& a = j.at("abstractive_choice"); !a.is_null()) r.abstractive_choice = detail::candidate_from_json(a);
  r.final_branch = branch_from_string(j.at("final_branch").get<std::string>());
  r.final = r.final_branch == Branch::kExtractive || !r.abstractive_choice ? r.extractive_choice : *r.abstractive_choice;
  for (const auto& f : j.value("flags", nlohmann::json::array()))
    if (f == "extractive-fallback") r.extractive_fallback = true;
  for (const auto& s : j.value("skipped", nlohmann::json::array()))
    r.skipped.push_back({s.at("backend").get<std::string>(), s.at("error").get<std::string>(),
                         s.at("message").get<std::string>()});
  return r;
}

inline std::string format_results(const std::vector<HybridResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

/// One JSON object per line, deterministic key order.
inline void write_results(const std::string& path, const std::vector<HybridResult>& results) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw IoError("parent directory does not exist: " + parent.string());
  write_file_atomic(path, format_results(results));
}

inline std::vector<HybridResult> read_results(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<HybridResult> results;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError(path + ": line " + std::to_string(lineno) + " is not JSON");
    try {
      results.push_back(result_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return results;
}

// ---- labels ----------------------------------------------------------------

inline const std::vector<std::string>& label_header() {
  static const std::vector<std::string> header{"id", "label", "origin", "annotator", "timestamp"};
  return header;
}

inline std::string format_label(const LabelRecord& r) {
  return csv::format_row({r.post_id, to_string(r.label), to_string(r.origin), r.annotator, format_timestamp(r.timestamp)});
}

/// Reads a labels CSV; a missing file is an empty label set.
inline std::vector<LabelRecord> read_labels(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  const auto rows = csv::parse(read_file(path));
  if (rows.empty()) return {};
  const auto cols = detail::index_header(rows.front(), {"id", "label", "origin", "annotator", "timestamp"}, path, nullptr);
  std::vector<LabelRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    LabelRecord rec;
    rec.post_id = detail::cell(row, cols.at("id"));
    auto label = parse_label(detail::cell(row, cols.at("label")));
    auto origin = parse_origin(detail::cell(row, cols.at("origin")));
    auto ts = parse_timestamp(detail::cell(row, cols.at("timestamp")));
    if (rec.post_id.empty() || !label || !origin || !ts) throw ValidationError(row.line, "malformed label record");
    rec.label = *label;
    rec.origin = *origin;
    rec.annotator = detail::cell(row, cols.at("annotator"));
    rec.timestamp = *ts;
    out.push_back(std::move(rec));
  }
  return out;
}

inline void write_labels(const std::string& path, const std::vector<LabelRecord>& records) {
  std::string out = csv::format_row(label_header());
  for (const auto& r : records) out += format_label(r);
  write_file_atomic(path, out);
}

/// Appends one record with a single O_APPEND write, adding the header when
/// the file is new or empty.
inline void append_label(const std::string& path, const LabelRecord& record) {
  std::string payload = format_label(record);
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (fresh) payload = csv::format_row(label_header()) + payload;
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open " + path + " for append");
  const ssize_t written = ::write(fd, payload.data(), payload.size());
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (written != static_cast<ssize_t>(payload.size()) || !synced) throw IoError("append to " + path + " failed");
}

}  // namespace instasum
