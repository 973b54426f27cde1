#include <cstdlib>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "instasum/pipeline.hpp"
#include "instasum/stub_server.hpp"
#include "support/temp_dir.hpp"

using namespace instasum;
using instasum::testing::slurp;
using instasum::testing::TempDir;

namespace {

const std::string kFixtures = INSTASUM_FIXTURE_DIR;

std::string config_text(const std::string& posts, const std::string& out, const std::string& backend_block,
                        const std::string& extra = "") {
  return "input_path = \"" + kFixtures + "/" + posts + "\"\n" +
         "references_path = \"" + kFixtures + "/references_100.csv\"\n" +
         "stopwords_path = \"" + kFixtures + "/stopwords_en.txt\"\n" +
         "lexicon_path = \"" + kFixtures + "/lexicon.tsv\"\n" +
         "abbreviations_path = \"" + kFixtures + "/abbreviations.txt\"\n" +
         "output_path = \"" + out + "\"\n" +
         "timestamp = \"2024-01-01T00:00:00Z\"\n" + extra + "\n" + backend_block;
}

const std::string kStubBlock = "[backend.stub]\nendpoint = \"stub://\"\n";

int run_cli(const std::string& args) {
  const int status = std::system((std::string(INSTASUM_SUMMARIZE_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseConfig, ReadsSectionsAndResolvesPaths) {
  const auto cfg = parse_config(
      "# comment\n"
      "input_path = posts.csv\n"
      "references_path = \"/abs/refs.csv\"  # trailing\n"
      "threshold = 0.7\n"
      "hashtags = \"travel, food\"\n"
      "deduplicate = false\n"
      "[selector]\nalpha = 0.25\n"
      "[extractive]\nk = 2\ndamping = 0.9\n"
      "[backend.t5]\nendpoint = \"http://localhost:8000\"\ntimeout_ms = 5000\n"
      "[backend.bart-large-cnn]\nendpoint = \"http://localhost:8001/v1\"\n",
      "/base");
  EXPECT_EQ(cfg.input_path, "/base/posts.csv");
  EXPECT_EQ(cfg.references_path, "/abs/refs.csv");
  EXPECT_DOUBLE_EQ(cfg.threshold, 0.7);
  EXPECT_EQ(cfg.hashtag_filter, (std::set<std::string>{"food", "travel"}));
  EXPECT_FALSE(cfg.deduplicate);
  EXPECT_DOUBLE_EQ(cfg.selector.alpha, 0.25);
  EXPECT_EQ(cfg.extractive.k, 2u);
  ASSERT_EQ(cfg.backends.size(), 2u);
  EXPECT_EQ(cfg.backends[0].name, "t5");
  EXPECT_EQ(cfg.backends[0].timeout_ms, 5000);
  EXPECT_EQ(cfg.backends[1].name, "bart-large-cnn");
  EXPECT_EQ(cfg.backends[1].endpoint, "http://localhost:8001/v1");
}

TEST(ParseConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("nonsense = 1\n"), StartupError);
  EXPECT_THROW(parse_config("[mystery]\n"), StartupError);
  EXPECT_THROW(parse_config("threshold = high\n"), StartupError);
  EXPECT_THROW(parse_config("[selector]\nbeta = 1\n"), StartupError);
  EXPECT_THROW(parse_config("just text\n"), StartupError);
  EXPECT_THROW(parse_config("deduplicate = maybe\n"), StartupError);
}

TEST(ParseConfig, ValidateRequiresPathsAndBackend) {
  TempDir dir;
  auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), kStubBlock));
  EXPECT_NO_THROW(cfg.validate());
  cfg.threshold = 1.5;
  EXPECT_THROW(cfg.validate(), StartupError);
  cfg = parse_config(config_text("posts_10.csv", dir.file("run"), ""));
  EXPECT_THROW(cfg.validate(), StartupError);
  cfg = parse_config("output_path = x\n" + kStubBlock);
  EXPECT_THROW(cfg.validate(), StartupError);
}

TEST(RunPipeline, WritesRunDirectoryWithStub) {
  TempDir dir;
  const auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), kStubBlock));
  const auto summary = run_pipeline(cfg);
  EXPECT_EQ(summary.loaded, 10u);
  EXPECT_EQ(summary.succeeded, 10u);
  EXPECT_EQ(summary.errors, 0u);
  EXPECT_TRUE(summary.within_budget);
  for (const char* f : {"results.jsonl", "labels.csv", "metrics.json", "selection_stats.json", "run.log"})
    EXPECT_TRUE(std::filesystem::exists(cfg.run_file(f))) << f;

  const auto results = read_results(cfg.run_file("results.jsonl"));
  ASSERT_EQ(results.size(), 10u);
  for (const auto& r : results) {
    ASSERT_TRUE(r.abstractive_choice);
    EXPECT_EQ(r.abstractive_choice->source, "stub");
    EXPECT_FALSE(r.final.text.empty());
  }
  const auto labels = read_labels(cfg.labels_file());
  EXPECT_EQ(labels.size(), 10u);
  for (const auto& l : labels) EXPECT_EQ(format_timestamp(l.timestamp), "2024-01-01T00:00:00Z");
  const auto metrics = nlohmann::json::parse(slurp(cfg.run_file("metrics.json")));
  EXPECT_FALSE(metrics["defined"].get<bool>());
}

TEST(RunPipeline, DeduplicatesAndFilters) {
  TempDir dir;
  auto cfg = parse_config(config_text("posts_886.csv", dir.file("run"), kStubBlock));
  cfg.hashtag_filter = std::set<std::string>{"tbt"};
  const auto summary = run_pipeline(cfg);
  EXPECT_EQ(summary.loaded, 886u);
  EXPECT_GT(summary.filtered_out, 0u);
  EXPECT_EQ(summary.processed + summary.filtered_out + summary.duplicates_removed + summary.excluded_empty, 886u);
  EXPECT_EQ(summary.errors, 0u);
}

TEST(RunPipeline, MissingInputIsStartupErrorAndWritesNothing) {
  TempDir dir;
  const auto cfg = parse_config(config_text("does_not_exist.csv", dir.file("run"), kStubBlock));
  EXPECT_THROW(run_pipeline(cfg), StartupError);
  EXPECT_FALSE(std::filesystem::exists(dir.file("run")));
}

TEST(RunPipeline, UnreachableBackendWithoutStubIsStartupError) {
  TempDir dir;
  int port;
  {
    StubServer probe_port;
    port = probe_port.start();
  }
  const auto block = "[backend.t5]\nendpoint = \"http://127.0.0.1:" + std::to_string(port) + "\"\n";
  const auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), block));
  EXPECT_THROW(run_pipeline(cfg), StartupError);
}

TEST(RunPipeline, DegenerateRowsCountAgainstBudgetWhenKept) {
  TempDir dir;
  dir.write("posts.csv", "id,hashtags,text\na,,Nice day at the beach.\nb,,@@@ $$$\nc,,\n");
  auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), kStubBlock));
  cfg.input_path = dir.file("posts.csv");
  auto summary = run_pipeline(cfg);
  EXPECT_EQ(summary.excluded_empty, 1u);
  EXPECT_EQ(summary.errors, 1u);
  EXPECT_FALSE(summary.within_budget);
  EXPECT_EQ(summary.exit_status(), 1);
  EXPECT_EQ(summary.missing_references, 1u);

  cfg.error_budget = 0.5;
  summary = run_pipeline(cfg);
  EXPECT_TRUE(summary.within_budget);
  EXPECT_NE(slurp(cfg.run_file("run.log")).find("error post b"), std::string::npos);
}

TEST(RunPipeline, PreservesHumanLabelsAcrossRuns) {
  TempDir dir;
  const auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), kStubBlock));
  run_pipeline(cfg);
  const auto first = read_labels(cfg.labels_file());
  append_label(cfg.labels_file(), {first[0].post_id, Label::kP, LabelOrigin::kHuman, "ann",
                                   Timestamp(std::chrono::seconds(1704067300))});
  run_pipeline(cfg);
  const auto second = read_labels(cfg.labels_file());
  EXPECT_EQ(second.size(), first.size() + 1);
  const auto metrics = nlohmann::json::parse(slurp(cfg.run_file("metrics.json")));
  EXPECT_TRUE(metrics["defined"].get<bool>());
  EXPECT_EQ(metrics["confusion"]["total"], 1);

  const auto report = evaluate_run(cfg);
  EXPECT_EQ(report.metrics, nlohmann::ordered_json::parse(slurp(cfg.run_file("metrics.json"))));
}

TEST(EvaluateRun, RequiresResults) {
  TempDir dir;
  const auto cfg = parse_config(config_text("posts_10.csv", dir.file("run"), kStubBlock));
  EXPECT_THROW(evaluate_run(cfg), StartupError);
}

TEST(Cli, ExitStatuses) {
  TempDir dir;
  const auto good = dir.write("good.conf", config_text("posts_10.csv", dir.file("run"), kStubBlock));
  EXPECT_EQ(run_cli("run --config " + good), 0);
  EXPECT_EQ(run_cli("eval --config " + good), 0);
  EXPECT_EQ(run_cli("run --config " + good + " --threshold 0.5 --hashtags tbt,art"), 0);
  const auto bad = dir.write("bad.conf", config_text("nope.csv", dir.file("run2"), kStubBlock));
  EXPECT_EQ(run_cli("run --config " + bad), 2);
  EXPECT_EQ(run_cli("run --config " + dir.write("junk.conf", "what = 1\n")), 2);
  EXPECT_NE(run_cli("run"), 0);
}
