#include <chrono>

#include <gtest/gtest.h>

#include "instasum/abstractive.hpp"
#include "instasum/stub_server.hpp"

using namespace instasum;
using Mode = StubServerOptions::Mode;

namespace {

BackendSpec spec_for(const StubServer& server, int timeout_ms = 2000) {
  BackendSpec s;
  s.name = "t5";
  s.endpoint = server.endpoint();
  s.timeout_ms = timeout_ms;
  s.retry_backoff_ms = 10;
  return s;
}

StubServerOptions options(Mode mode, std::string fixed = "", int delay_ms = 0) {
  StubServerOptions o;
  o.mode = mode;
  o.fixed_summary = std::move(fixed);
  o.model = "t5-small";
  o.delay_ms = delay_ms;
  return o;
}

int closed_port() {
  StubServer server;
  const int port = server.start();
  server.stop();
  return port;
}

BackendErrorKind kind_of(const BackendSpec& spec, const AbstractiveRequest& req) {
  try {
    summarize_remote(spec, req);
  } catch (const BackendError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected BackendError";
  return BackendErrorKind::kProtocol;
}

}  // namespace

TEST(TruncateWords, CutsAtWordBoundaries) {
  EXPECT_EQ(truncate_words("a b c d", 2), "a b");
  EXPECT_EQ(truncate_words("  a   b ", 5), "a b");
  EXPECT_EQ(truncate_words("a b", 2), "a b");
  EXPECT_EQ(truncate_words("a b", 0), "");
  EXPECT_EQ(truncate_words("", 3), "");
}

TEST(StubSummarizer, LeadSentenceTruncated) {
  const auto c = summarize_stub({"First sentence here. Second one.", 40});
  EXPECT_EQ(c.text, "First sentence here.");
  EXPECT_EQ(c.source, "stub");
  EXPECT_EQ(summarize_stub({"one two three four. five.", 2}).text, "one two");
  EXPECT_THROW(summarize_stub({"   ", 40}), ArgumentError);
  EXPECT_THROW(summarize_stub({"text", 0}), ArgumentError);
}

TEST(StubBackend, UsesConfiguredName) {
  StubBackend b("bart-large-cnn", 3);
  EXPECT_EQ(b.name(), "bart-large-cnn");
  EXPECT_EQ(b.max_words(), 3u);
  EXPECT_EQ(b.summarize({"x y. z", 40}).source, "bart-large-cnn");
}

TEST(BackendSpec, Validation) {
  BackendSpec s{"t5", "http://localhost:8000"};
  EXPECT_NO_THROW(s.validate());
  s.endpoint = "https://models.example.com/v1";
  EXPECT_NO_THROW(s.validate());
  s.endpoint = "stub://";
  EXPECT_TRUE(s.is_stub());
  EXPECT_NO_THROW(s.validate());
  s.endpoint = "ftp://host";
  EXPECT_THROW(s.validate(), ArgumentError);
  s.endpoint = "http://localhost:8000";
  s.timeout_ms = 0;
  EXPECT_THROW(s.validate(), ArgumentError);
  s = BackendSpec{"", "http://localhost"};
  EXPECT_THROW(s.validate(), ArgumentError);
}

TEST(SplitEndpoint, AppendsSummarizePath) {
  EXPECT_EQ(detail::split_endpoint("http://h:1").origin, "http://h:1");
  EXPECT_EQ(detail::split_endpoint("http://h:1").path, "/summarize");
  EXPECT_EQ(detail::split_endpoint("http://h:1/models/t5/").path, "/models/t5/summarize");
}

TEST(RemoteBackend, SuccessfulExchange) {
  StubServer server(options(Mode::kFixed, "one two three four five"));
  server.start();
  RemoteBackend backend(spec_for(server));
  const auto c = backend.summarize({"irrelevant text", 3});
  EXPECT_EQ(c.text, "one two three");
  EXPECT_EQ(c.source, "t5");
  EXPECT_EQ(c.word_count, 3u);
  const auto raw = call_remote_once(spec_for(server), {"irrelevant", 40});
  EXPECT_EQ(raw.backend_name, "t5-small");
}

TEST(RemoteBackend, PreservesUnicode) {
  StubServer server(options(Mode::kEcho));
  server.start();
  EXPECT_EQ(summarize_remote(spec_for(server), {"caf\xC3\xA9 \xF0\x9F\x98\x80", 40}).text,
            "caf\xC3\xA9 \xF0\x9F\x98\x80");
}

TEST(RemoteBackend, ProtocolErrors) {
  for (Mode mode : {Mode::kMissingField, Mode::kServerError}) {
    StubServer server(options(mode));
    server.start();
    EXPECT_EQ(kind_of(spec_for(server), {"some text", 40}), BackendErrorKind::kProtocol);
    EXPECT_EQ(server.requests(), 1u);
  }
}

TEST(RemoteBackend, EmptySummary) {
  StubServer server(options(Mode::kEmpty));
  server.start();
  EXPECT_EQ(kind_of(spec_for(server), {"some text", 40}), BackendErrorKind::kEmpty);
}

TEST(RemoteBackend, TimeoutIsRetriedOnce) {
  StubServer server(options(Mode::kLead, "", 400));
  server.start();
  const auto spec = spec_for(server, 100);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(kind_of(spec, {"some text", 40}), BackendErrorKind::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(2));
  server.stop();
  EXPECT_EQ(server.requests(), 2u);
}

TEST(RemoteBackend, UnreachableHost) {
  BackendSpec spec{"t5", "http://127.0.0.1:" + std::to_string(closed_port())};
  spec.retry_backoff_ms = 1;
  spec.timeout_ms = 500;
  EXPECT_EQ(kind_of(spec, {"text", 40}), BackendErrorKind::kUnreachable);
  EXPECT_FALSE(probe(spec));
}

TEST(RemoteBackend, ProbeSeesLiveServer) {
  StubServer server;
  server.start();
  EXPECT_TRUE(probe(spec_for(server)));
  EXPECT_TRUE(probe(BackendSpec{"s", "stub://"}));
}

TEST(RemoteBackend, RejectsEmptyRequest) {
  StubServer server;
  server.start();
  EXPECT_THROW(summarize_remote(spec_for(server), {"", 40}), ArgumentError);
}

TEST(MakeBackend, DispatchesOnEndpoint) {
  EXPECT_NE(dynamic_cast<StubBackend*>(make_backend({"s", "stub://"}).get()), nullptr);
  EXPECT_NE(dynamic_cast<RemoteBackend*>(make_backend({"r", "http://localhost:1"}).get()), nullptr);
  EXPECT_THROW(make_backend({"r", "nonsense"}), ArgumentError);
}

TEST(BackendError, KindsAndRetryability) {
  EXPECT_TRUE(BackendError(BackendErrorKind::kTimeout, "a", "").retryable());
  EXPECT_TRUE(BackendError(BackendErrorKind::kUnreachable, "a", "").retryable());
  EXPECT_FALSE(BackendError(BackendErrorKind::kProtocol, "a", "").retryable());
  EXPECT_FALSE(BackendError(BackendErrorKind::kEmpty, "a", "").retryable());
  EXPECT_STREQ(to_string(BackendErrorKind::kTimeout), "backend-timeout");
}
