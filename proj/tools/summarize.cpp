// summarize: batch summarization runs, the review API, and offline metrics.
//
//   summarize run   --config <path> [--threshold <r>] [--hashtags a,b]
//   summarize serve --config <path> --port <n> [--host <addr>] [--static <dir>]
//   summarize eval  --config <path>

#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "instasum/instasum.hpp"

namespace {

constexpr int kStartupFailure = 2;

int run_command(const std::string& config_path, std::optional<double> threshold, std::optional<std::string> hashtags) {
  auto config = instasum::load_config(config_path);
  if (threshold) config.threshold = *threshold;
  if (hashtags) {
    auto tags = instasum::parse_tag_list(*hashtags);
    if (tags.empty()) config.hashtag_filter.reset();
    else config.hashtag_filter = std::move(tags);
  }
  const auto summary = instasum::run_pipeline(config);
  std::cout << to_json(summary).dump() << '\n';
  if (!summary.within_budget)
    std::cerr << "summarize: " << summary.errors << " of " << summary.processed
              << " posts failed, over the error budget\n";
  return summary.exit_status();
}

int serve_command(const std::string& config_path, const std::string& host, int port, const std::string& static_dir) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  instasum::ReviewService service(instasum::load_config(config_path));
  if (!static_dir.empty() && !service.mount_static(static_dir))
    throw instasum::StartupError("cannot serve static directory " + static_dir);
  const int bound = service.bind(host, port);
  std::cout << "review service listening on http://" << host << ":" << bound << std::endl;

  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.listen();
  // Unblock the waiter when the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  return 0;
}

int eval_command(const std::string& config_path) {
  const auto report = instasum::evaluate_run(instasum::load_config(config_path));
  nlohmann::ordered_json out;
  out["metrics"] = report.metrics;
  out["selection"] = report.selection;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid extractive/abstractive summarization of short posts"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> threshold;
  std::optional<std::string> hashtags;
  auto* run = app.add_subcommand("run", "Summarize a corpus and write the run directory");
  run->add_option("--config", config_path, "Pipeline config file")->required()->check(CLI::ExistingFile);
  run->add_option("--threshold", threshold, "Similarity threshold for P labels")->check(CLI::Range(0.0, 1.0));
  run->add_option("--hashtags", hashtags, "Comma-separated hashtag filter");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Serve the review API for human labeling");
  serve->add_option("--config", config_path, "Pipeline config file")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port")->required()->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--static", static_dir, "Directory with the annotation UI");

  auto* eval = app.add_subcommand("eval", "Recompute metrics from an existing run directory");
  eval->add_option("--config", config_path, "Pipeline config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, threshold, hashtags);
    if (*serve) return serve_command(config_path, host, port, static_dir);
    if (*eval) return eval_command(config_path);
  } catch (const instasum::StartupError& e) {
    std::cerr << "summarize: " << e.what() << '\n';
    return kStartupFailure;
  } catch (const std::exception& e) {
    std::cerr << "summarize: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
