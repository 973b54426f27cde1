#pragma once

// HTTP API backing the human P/N review loop.
//
//   GET  /api/queue[?unlabeled=true]  queue items in result order
//   GET  /api/results/{id}            full result record
//   POST /api/labels                  {"post_id", "label": "P"|"N", "annotator"} -> 201
//   GET  /api/metrics                 metrics + confusion from the current label join
//   GET  /api/stats                   selection statistics

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "instasum/config.hpp"
#include "instasum/corpus_io.hpp"
#include "instasum/evaluation.hpp"

namespace instasum {

struct QueueItem {
  std::string post_id;
  std::string source_text;
  std::string final_summary;
  std::optional<std::string> reference_summary;
  std::optional<Label> existing_label;
};

inline nlohmann::ordered_json to_json(const QueueItem& q) {
  nlohmann::ordered_json j;
  j["post_id"] = q.post_id;
  j["source_text"] = q.source_text;
  j["final_summary"] = q.final_summary;
  j["reference_summary"] = q.reference_summary ? nlohmann::ordered_json(*q.reference_summary) : nullptr;
  j["existing_label"] = q.existing_label ? nlohmann::ordered_json(to_string(*q.existing_label)) : nullptr;
  return j;
}

class ReviewService {
 public:
  /// Loads the run artifacts named by `config`; the results file must exist.
  explicit ReviewService(PipelineConfig config) : config_(std::move(config)) {
    const std::string results_path = config_.run_file("results.jsonl");
    if (!std::filesystem::exists(results_path)) throw StartupError("no results at " + results_path);
    try {
      results_ = read_results(results_path);
      if (std::filesystem::exists(config_.input_path))
        for (const auto& p : load_corpus(config_.input_path).posts) sources_[p.id] = p.raw_text;
      if (std::filesystem::exists(config_.references_path)) references_ = load_references(config_.references_path);
    } catch (const Error& e) {
      throw StartupError(e.what());
    }
    for (std::size_t i = 0; i < results_.size(); ++i) index_[results_[i].post_id] = i;
    // SO_REUSEADDR only, no SO_REUSEPORT.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    routes();
  }

  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw StartupError("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
    return bound;
  }

  /// Blocks serving requests until stop().
  void listen() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  /// Serves a static directory (the annotation UI) at "/".
  bool mount_static(const std::string& dir) { return server_.set_mount_point("/", dir); }

  std::vector<QueueItem> queue(bool unlabeled_only) const {
    const auto labels = read_labels(config_.labels_file());
    std::map<std::string, Label> latest_human;
    for (const auto& r : labels)
      if (r.origin == LabelOrigin::kHuman) latest_human[r.post_id] = r.label;
    std::vector<QueueItem> items;
    for (const auto& r : results_) {
      QueueItem q;
      q.post_id = r.post_id;
      if (auto it = sources_.find(r.post_id); it != sources_.end()) q.source_text = it->second;
      q.final_summary = r.final.text;
      if (const auto* ref = references_.find(r.post_id)) q.reference_summary = *ref;
      if (auto it = latest_human.find(r.post_id); it != latest_human.end()) q.existing_label = it->second;
      if (unlabeled_only && q.existing_label) continue;
      items.push_back(std::move(q));
    }
    return items;
  }

  nlohmann::ordered_json metrics() const {
    const auto labels = read_labels(config_.labels_file());
    const LabelJoin join = join_labels(labels);
    return metrics_json(confusion(join.gold, join.predicted));
  }

  /// Validates and appends a human label; throws ArgumentError on bad input.
  LabelRecord submit(const nlohmann::json& body) {
    if (!body.is_object()) throw ArgumentError("body must be a JSON object");
    auto field = [&](const char* key) -> std::string {
      auto it = body.find(key);
      if (it == body.end() || !it->is_string()) throw ArgumentError(std::string("'") + key + "' must be a string");
      return it->get<std::string>();
    };
    LabelRecord rec;
    rec.post_id = field("post_id");
    if (!index_.contains(rec.post_id)) throw ArgumentError("unknown post_id '" + rec.post_id + "'");
    auto label = parse_label(field("label"));
    if (!label) throw ArgumentError("label must be \"P\" or \"N\"");
    rec.label = *label;
    rec.annotator = field("annotator");
    if (unicode::collapse_whitespace(rec.annotator).empty()) throw ArgumentError("annotator must be nonempty");
    rec.origin = LabelOrigin::kHuman;
    rec.timestamp = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    std::lock_guard lock(write_mutex_);
    append_label(config_.labels_file(), rec);
    return rec;
  }

 private:
  static void send_json(httplib::Response& res, const nlohmann::ordered_json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json; charset=utf-8");
  }

  static void send_error(httplib::Response& res, int status, const std::string& reason) {
    send_json(res, nlohmann::ordered_json{{"error", reason}}, status);
  }

  void routes() {
    server_.Get("/api/queue", [this](const httplib::Request& req, httplib::Response& res) {
      const bool unlabeled = req.has_param("unlabeled") && req.get_param_value("unlabeled") == "true";
      auto arr = nlohmann::ordered_json::array();
      for (const auto& q : queue(unlabeled)) arr.push_back(to_json(q));
      send_json(res, arr);
    });
    server_.Get(R"(/api/results/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto it = index_.find(req.matches[1].str());
      if (it == index_.end()) return send_error(res, 404, "unknown post id");
      send_json(res, to_json(results_[it->second]));
    });
    server_.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded()) return send_error(res, 400, "body is not valid JSON");
      try {
        const LabelRecord rec = submit(body);
        send_json(res,
                  {{"post_id", rec.post_id}, {"label", to_string(rec.label)}, {"origin", to_string(rec.origin)},
                   {"annotator", rec.annotator}, {"timestamp", format_timestamp(rec.timestamp)}},
                  201);
      } catch (const ArgumentError& e) {
        send_error(res, 400, e.what());
      }
    });
    server_.Get("/api/metrics", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, metrics());
    });
    server_.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, to_json(selection_stats(results_)));
    });
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_error(res, 500, what);
    });
  }

  PipelineConfig config_;
  std::vector<HybridResult> results_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::string> sources_;
  ReferenceSet references_;
  std::mutex write_mutex_;
  httplib::Server server_;
};

}  // namespace instasum
