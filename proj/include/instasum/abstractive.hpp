#pragma once

// Abstractive summary backends behind one contract: remote seq2seq services
// speaking a small JSON-over-HTTP protocol, and a deterministic local stub.
//
//   POST <endpoint>/summarize   {"text": "...", "max_words": 40}
//   200                         {"summary": "...", "model": "..."}

#include <chrono>
#include <memory>
#include <optional>
#include <regex>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "instasum/error.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/summary.hpp"

namespace instasum {

struct BackendSpec {
  std::string name;
  std::string endpoint;  // http://host:port[/prefix], or stub:// for the local stub
  int timeout_ms = 30000;
  std::size_t max_summary_words = 40;
  int retries = 1;
  int retry_backoff_ms = 500;
  std::ptrdiff_t max_in_flight = 4;

  bool is_stub() const { return endpoint.starts_with("stub:"); }

  void validate() const {
    if (name.empty()) throw ArgumentError("backend name must be nonempty");
    if (timeout_ms <= 0) throw ArgumentError("backend " + name + ": timeout_ms must be positive");
    if (max_summary_words == 0) throw ArgumentError("backend " + name + ": max_summary_words must be positive");
    if (max_in_flight <= 0) throw ArgumentError("backend " + name + ": max_in_flight must be positive");
    if (is_stub()) return;
    static const std::regex url(R"(^https?://[A-Za-z0-9._\-]+(:[0-9]{1,5})?(/[^\s]*)?$)");
    if (!std::regex_match(endpoint, url))
      throw ArgumentError("backend " + name + ": invalid endpoint '" + endpoint + "'");
  }
};

struct AbstractiveRequest {
  std::string text;
  std::size_t max_words = 40;
};

struct AbstractiveResponse {
  std::string summary;
  std::string backend_name;
};

/// First `max_words` whitespace-separated words, joined by single spaces.
inline std::string truncate_words(std::string_view text, std::size_t max_words) {
  const std::string collapsed = unicode::collapse_whitespace(text);
  std::size_t words = 0;
  for (std::size_t i = 0; i < collapsed.size(); ++i) {
    if (collapsed[i] != ' ') continue;
    if (++words == max_words) return collapsed.substr(0, i);
  }
  return max_words == 0 ? std::string() : collapsed;
}

/// Lead summary: the first sentence, cut to max_words words.
inline SummaryCandidate summarize_stub(const AbstractiveRequest& req) {
  if (unicode::collapse_whitespace(req.text).empty()) throw ArgumentError("stub summarizer needs nonempty text");
  if (req.max_words == 0) throw ArgumentError("max_words must be positive");
  const auto sentences = split_sentences(req.text);
  return SummaryCandidate::make(truncate_words(sentences.front(), req.max_words), "stub");
}

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix + "/summarize"
};

inline Endpoint split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  Endpoint ep;
  ep.origin = endpoint.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? std::string() : endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  ep.path = prefix + "/summarize";
  return ep;
}

}  // namespace detail

/// One request/response exchange with a remote backend, no retries.
inline AbstractiveResponse call_remote_once(const BackendSpec& spec, const AbstractiveRequest& req) {
  const auto ep = detail::split_endpoint(spec.endpoint);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::milliseconds(spec.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  nlohmann::ordered_json body;
  body["text"] = req.text;
  body["max_words"] = req.max_words;

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= timeout))
      throw BackendError(BackendErrorKind::kTimeout, spec.name, "no response within " + std::to_string(spec.timeout_ms) + " ms");
    if (err == httplib::Error::Connection)
      throw BackendError(BackendErrorKind::kUnreachable, spec.name, "cannot connect to " + ep.origin);
    throw BackendError(BackendErrorKind::kProtocol, spec.name, httplib::to_string(err));
  }
  if (res->status != 200)
    throw BackendError(BackendErrorKind::kProtocol, spec.name, "HTTP status " + std::to_string(res->status));

  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw BackendError(BackendErrorKind::kProtocol, spec.name, "response body is not a JSON object");
  auto it = parsed.find("summary");
  if (it == parsed.end() || !it->is_string())
    throw BackendError(BackendErrorKind::kProtocol, spec.name, "response lacks a string 'summary' field");

  AbstractiveResponse out;
  out.summary = it->get<std::string>();
  auto model = parsed.find("model");
  out.backend_name = model != parsed.end() && model->is_string() ? model->get<std::string>() : spec.name;
  if (unicode::collapse_whitespace(out.summary).empty())
    throw BackendError(BackendErrorKind::kEmpty, spec.name, "backend returned an empty summary");
  return out;
}

/// Remote summary with the retry policy from `spec`; the result is tagged
/// with the backend name and cut to max_words.
inline SummaryCandidate summarize_remote(const BackendSpec& spec, const AbstractiveRequest& req) {
  if (req.text.empty()) throw ArgumentError("abstractive request text must be nonempty");
  for (int attempt = 0;; ++attempt) {
    try {
      auto response = call_remote_once(spec, req);
      return SummaryCandidate::make(truncate_words(response.summary, req.max_words), spec.name);
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= spec.retries) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(spec.retry_backoff_ms));
    }
  }
}

/// True when a TCP connection to the backend can be opened.
inline bool probe(const BackendSpec& spec) {
  if (spec.is_stub()) return true;
  const auto ep = detail::split_endpoint(spec.endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(std::chrono::milliseconds(std::min(spec.timeout_ms, 2000)));
  client.set_read_timeout(std::chrono::milliseconds(1));
  auto res = client.Get("/");
  return res || (res.error() != httplib::Error::Connection && res.error() != httplib::Error::ConnectionTimeout);
}

/// Uniform summarizer interface used by the hybrid selector.
class AbstractiveBackend {
 public:
  virtual ~AbstractiveBackend() = default;
  virtual const std::string& name() const = 0;
  virtual std::size_t max_words() const = 0;
  virtual SummaryCandidate summarize(const AbstractiveRequest& req) = 0;
};

/// In-process lead summarizer; `name` replaces the "stub" source tag when set.
class StubBackend final : public AbstractiveBackend {
 public:
  explicit StubBackend(std::string name = "stub", std::size_t max_words = 40)
      : name_(std::move(name)), max_words_(max_words) {}

  const std::string& name() const override { return name_; }
  std::size_t max_words() const override { return max_words_; }

  SummaryCandidate summarize(const AbstractiveRequest& req) override {
    auto c = summarize_stub(req);
    c.source = name_;
    return c;
  }

 private:
  std::string name_;
  std::size_t max_words_;
};

/// HTTP backend with a bound on concurrent in-flight requests.
class RemoteBackend final : public AbstractiveBackend {
 public:
  explicit RemoteBackend(BackendSpec spec)
      : spec_((spec.validate(), std::move(spec))), slots_(spec_.max_in_flight) {}

  const std::string& name() const override { return spec_.name; }
  std::size_t max_words() const override { return spec_.max_summary_words; }
  const BackendSpec& spec() const { return spec_; }

  SummaryCandidate summarize(const AbstractiveRequest& req) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};
    return summarize_remote(spec_, req);
  }

 private:
  BackendSpec spec_;
  std::counting_semaphore<> slots_;
};

inline std::unique_ptr<AbstractiveBackend> make_backend(const BackendSpec& spec) {
  spec.validate();
  if (spec.is_stub()) return std::make_unique<StubBackend>(spec.name, spec.max_summary_words);
  return std::make_unique<RemoteBackend>(spec);
}

}  // namespace instasum
