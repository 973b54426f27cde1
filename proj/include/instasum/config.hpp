#pragma once

// Pipeline configuration: a small TOML-like key/value file.
//
//   input_path = "posts.csv"        # paths are relative to the config file
//   threshold = 0.80
//   [selector]
//   alpha = 0.5
//   [backend.t5]
//   endpoint = "http://127.0.0.1:9001"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "instasum/abstractive.hpp"
#include "instasum/error.hpp"
#include "instasum/extractive.hpp"
#include "instasum/selector.hpp"
#include "instasum/unicode.hpp"

namespace instasum {

struct PipelineConfig {
  std::string input_path;
  std::string references_path;
  std::string stopwords_path;
  std::string lexicon_path;
  std::string abbreviations_path;  // optional
  std::string output_path;         // run directory
  std::string labels_path;         // defaults to <output_path>/labels.csv
  std::vector<BackendSpec> backends;
  SelectorConfig selector;
  ExtractiveParams extractive;
  double threshold = 0.80;
  std::optional<std::set<std::string>> hashtag_filter;
  std::size_t concurrency = 4;
  bool deduplicate = true;
  bool drop_empty = true;
  double error_budget = 0.10;
  std::optional<std::string> timestamp;  // ISO-8601 stamp for threshold labels

  std::string run_file(std::string_view name) const {
    return (std::filesystem::path(output_path) / name).string();
  }
  std::string labels_file() const { return labels_path.empty() ? run_file("labels.csv") : labels_path; }

  void validate() const {
    const std::pair<const char*, const std::string*> required[] = {
        {"input_path", &input_path},         {"references_path", &references_path},
        {"stopwords_path", &stopwords_path}, {"lexicon_path", &lexicon_path},
        {"output_path", &output_path}};
    for (const auto& [key, value] : required)
      if (value->empty()) throw StartupError(std::string("config: ") + key + " is required");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw StartupError("config: threshold must lie in [0,1]");
    if (concurrency == 0) throw StartupError("config: concurrency must be positive");
    if (!(error_budget >= 0.0 && error_budget <= 1.0)) throw StartupError("config: error_budget must lie in [0,1]");
    if (backends.empty()) throw StartupError("config: at least one backend (or the stub) is required");
    try {
      selector.validate();
      extractive.validate();
      for (const auto& b : backends) b.validate();
    } catch (const ArgumentError& e) {
      throw StartupError(std::string("config: ") + e.what());
    }
  }
};

inline std::set<std::string> parse_tag_list(std::string_view list) {
  std::set<std::string> tags;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    std::string tag = unicode::collapse_whitespace(list.substr(start, comma - start));
    while (!tag.empty() && tag.front() == '#') tag.erase(tag.begin());
    if (!tag.empty()) tags.insert(unicode::lowercase(tag));
    start = comma + 1;
  }
  return tags;
}

namespace detail {

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string unquote(std::string v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, int lineno) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_floating_point_v<T>) out = static_cast<T>(std::stod(value, &used));
    else out = static_cast<T>(std::stoll(value, &used));
    if (used != value.size()) throw std::invalid_argument(value);
    if constexpr (std::is_unsigned_v<T>)
      if (value.starts_with('-')) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw StartupError("config line " + std::to_string(lineno) + ": bad number for " + key + ": '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value, int lineno) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw StartupError("config line " + std::to_string(lineno) + ": bad boolean for " + key);
}

}  // namespace detail

/// Parses config text; relative paths resolve against `base_dir`.
inline PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  PipelineConfig cfg;
  std::string section;
  BackendSpec* backend = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;

  auto path_value = [&](const std::string& v) {
    if (v.empty()) return v;
    std::filesystem::path p(v);
    return (p.is_absolute() || base_dir.empty() ? p : base_dir / p).lexically_normal().string();
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = unicode::collapse_whitespace(detail::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw StartupError("config line " + std::to_string(lineno) + ": bad section header");
      section = unicode::collapse_whitespace(line.substr(1, line.size() - 2));
      backend = nullptr;
      if (section.starts_with("backend.")) {
        cfg.backends.push_back(BackendSpec{});
        backend = &cfg.backends.back();
        backend->name = section.substr(8);
      } else if (section != "selector" && section != "extractive") {
        throw StartupError("config line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw StartupError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = unicode::collapse_whitespace(line.substr(0, eq));
    const std::string value = detail::unquote(unicode::collapse_whitespace(line.substr(eq + 1)));
    auto unknown = [&] {
      return StartupError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'" +
                          (section.empty() ? "" : " in [" + section + "]"));
    };

    if (backend) {
      if (key == "endpoint") backend->endpoint = value;
      else if (key == "timeout_ms") backend->timeout_ms = detail::parse_number<int>(key, value, lineno);
      else if (key == "max_summary_words") backend->max_summary_words = detail::parse_number<std::size_t>(key, value, lineno);
      else if (key == "retries") backend->retries = detail::parse_number<int>(key, value, lineno);
      else if (key == "retry_backoff_ms") backend->retry_backoff_ms = detail::parse_number<int>(key, value, lineno);
      else if (key == "max_in_flight") backend->max_in_flight = detail::parse_number<std::ptrdiff_t>(key, value, lineno);
      else throw unknown();
    } else if (section == "selector") {
      if (key == "alpha") cfg.selector.alpha = detail::parse_number<double>(key, value, lineno);
      else if (key == "tie_epsilon") cfg.selector.tie_epsilon = detail::parse_number<double>(key, value, lineno);
      else throw unknown();
    } else if (section == "extractive") {
      if (key == "damping") cfg.extractive.damping = detail::parse_number<double>(key, value, lineno);
      else if (key == "epsilon") cfg.extractive.epsilon = detail::parse_number<double>(key, value, lineno);
      else if (key == "max_iter") cfg.extractive.max_iter = detail::parse_number<std::size_t>(key, value, lineno);
      else if (key == "k") cfg.extractive.k = detail::parse_number<std::size_t>(key, value, lineno);
      else if (key == "lexrank_threshold") cfg.extractive.lexrank_threshold = detail::parse_number<double>(key, value, lineno);
      else throw unknown();
    } else {
      if (key == "input_path") cfg.input_path = path_value(value);
      else if (key == "references_path") cfg.references_path = path_value(value);
      else if (key == "stopwords_path") cfg.stopwords_path = path_value(value);
      else if (key == "lexicon_path") cfg.lexicon_path = path_value(value);
      else if (key == "abbreviations_path") cfg.abbreviations_path = path_value(value);
      else if (key == "output_path") cfg.output_path = path_value(value);
      else if (key == "labels_path") cfg.labels_path = path_value(value);
      else if (key == "threshold") cfg.threshold = detail::parse_number<double>(key, value, lineno);
      else if (key == "hashtags") cfg.hashtag_filter = parse_tag_list(value);
      else if (key == "concurrency") cfg.concurrency = detail::parse_number<std::size_t>(key, value, lineno);
      else if (key == "deduplicate") cfg.deduplicate = detail::parse_bool(key, value, lineno);
      else if (key == "drop_empty") cfg.drop_empty = detail::parse_bool(key, value, lineno);
      else if (key == "error_budget") cfg.error_budget = detail::parse_number<double>(key, value, lineno);
      else if (key == "timestamp") cfg.timestamp = value;
      else throw unknown();
    }
  }
  if (cfg.hashtag_filter && cfg.hashtag_filter->empty()) cfg.hashtag_filter.reset();
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StartupError("cannot read config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

}  // namespace instasum
