#pragma once

// Reference server for the abstractive wire protocol. Used as a test fixture
// and by the stub-backend tool for offline runs.

#include <atomic>
#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "instasum/abstractive.hpp"

namespace instasum {

struct StubServerOptions {
  enum class Mode { kLead, kEcho, kFixed, kMissingField, kEmpty, kServerError };
  Mode mode = Mode::kLead;
  std::string fixed_summary;  // kFixed
  std::string model = "stub-server";
  int delay_ms = 0;           // applied before every /summarize response
};

class StubServer {
 public:
  explicit StubServer(StubServerOptions options = {}) : options_(std::move(options)) {
    server_.Post("/summarize", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
    server_.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  }

  ~StubServer() { stop(); }

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  /// Binds to an ephemeral port on 127.0.0.1 and serves on a background thread.
  int start(int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1") : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
    if (port_ < 0) throw StartupError("stub server cannot bind port " + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Blocks serving on the calling thread.
  void serve(int port) {
    if (!server_.bind_to_port("127.0.0.1", port)) throw StartupError("stub server cannot bind port " + std::to_string(port));
    port_ = port;
    server_.listen_after_bind();
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t requests() const { return requests_.load(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (options_.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options_.delay_ms));
    using Mode = StubServerOptions::Mode;
    if (options_.mode == Mode::kServerError) {
      res.status = 500;
      res.set_content(R"({"error":"unavailable"})", "application/json");
      return;
    }
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("text") || !body["text"].is_string()) {
      res.status = 400;
      res.set_content(R"({"error":"expected {\"text\": string, \"max_words\": integer}"})", "application/json");
      return;
    }
    const std::string text = body["text"].get<std::string>();
    const std::size_t max_words = body.value("max_words", std::size_t{40});

    nlohmann::ordered_json out;
    switch (options_.mode) {
      case Mode::kLead:
        out["summary"] = text.empty() ? std::string() : summarize_stub({text, std::max<std::size_t>(max_words, 1)}).text;
        break;
      case Mode::kEcho: out["summary"] = text; break;
      case Mode::kFixed: out["summary"] = options_.fixed_summary; break;
      case Mode::kEmpty: out["summary"] = ""; break;
      case Mode::kMissingField: out["text"] = text; break;
      case Mode::kServerError: break;
    }
    out["model"] = options_.model;
    res.set_content(out.dump(), "application/json; charset=utf-8");
  }

  StubServerOptions options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace instasum
