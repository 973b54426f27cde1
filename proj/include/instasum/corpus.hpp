#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "instasum/unicode.hpp"

namespace instasum {

/// One corpus row.
struct Post {
  std::string id;
  std::set<std::string> hashtags;  // lowercase, no '#'
  std::string raw_text;
  bool degenerate = false;  // raw_text was empty at load time

  bool operator==(const Post&) const = default;
};

struct CorpusStats {
  std::size_t row_count = 0;
  std::size_t char_count = 0;  // Unicode scalar values over all raw_text
  std::size_t byte_size = 0;   // UTF-8 bytes over all raw_text

  bool operator==(const CorpusStats&) const = default;
};

inline CorpusStats compute_stats(const std::vector<Post>& posts) {
  CorpusStats stats;
  stats.row_count = posts.size();
  for (const auto& p : posts) {
    stats.char_count += unicode::char_count(p.raw_text);
    stats.byte_size += p.raw_text.size();
  }
  return stats;
}

struct Corpus {
  std::vector<Post> posts;
  std::string source_path;
  CorpusStats stats;
  std::vector<std::string> warnings;

  /// Replaces the posts and recomputes stats.
  void assign(std::vector<Post> new_posts) {
    posts = std::move(new_posts);
    stats = compute_stats(posts);
  }
};

/// Post id to reference summary.
struct ReferenceSet {
  std::map<std::string, std::string> entries;

  const std::string* find(const std::string& id) const {
    auto it = entries.find(id);
    return it == entries.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return entries.size(); }
};

}  // namespace instasum
