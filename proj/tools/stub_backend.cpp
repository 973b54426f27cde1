// stub-backend: serves the abstractive summarization protocol locally.

#include <iostream>

#include <CLI11.hpp>

#include "instasum/stub_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local stand-in for a remote summarization backend"};
  int port = 9001;
  std::string mode = "lead";
  instasum::StubServerOptions options;
  app.add_option("--port", port, "TCP port on 127.0.0.1")->check(CLI::Range(1, 65535));
  app.add_option("--mode", mode, "lead | echo | fixed | empty | missing-field | error")
      ->check(CLI::IsMember({"lead", "echo", "fixed", "empty", "missing-field", "error"}));
  app.add_option("--summary", options.fixed_summary, "Reply used by --mode fixed");
  app.add_option("--model", options.model, "Model name reported in responses");
  app.add_option("--delay-ms", options.delay_ms, "Delay before each response")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  using Mode = instasum::StubServerOptions::Mode;
  if (mode == "echo") options.mode = Mode::kEcho;
  else if (mode == "fixed") options.mode = Mode::kFixed;
  else if (mode == "empty") options.mode = Mode::kEmpty;
  else if (mode == "missing-field") options.mode = Mode::kMissingField;
  else if (mode == "error") options.mode = Mode::kServerError;

  try {
    instasum::StubServer server(options);
    std::cout << "stub backend (" << mode << ") on http://127.0.0.1:" << port << std::endl;
    server.serve(port);
  } catch (const std::exception& e) {
    std::cerr << "stub-backend: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
