#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "flowsearch/core/serde.hpp"
#include "flowsearch/exec/executor.hpp"

namespace flowsearch::exec {

/// Chat-completion endpoint configuration. The key and base URL come from the
/// environment (secrets never live in config files).
struct WireConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string api_key;
  std::string model = "gpt-4o-mini";
  std::string path = "/v1/chat/completions";
  double temperature = 0.0;
  int max_retries = 3;          // per call, exponential backoff
  int initial_backoff_ms = 250;
  int timeout_s = 60;
  int parallelism = 4;

  /// Reads FLOWSEARCH_API_BASE, FLOWSEARCH_API_KEY, FLOWSEARCH_MODEL on top of
  /// the given defaults.
  static WireConfig from_env(WireConfig defaults);
  static WireConfig from_env() { return from_env(WireConfig{}); }
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatResult {
  bool ok = false;
  std::string content;
  TokenDelta tokens;  // from the provider's usage object
  std::string error;
};

/// Minimal chat-completion client: POST {model, messages, temperature},
/// read choices[0].message.content and usage. Retries transport and 5xx
/// failures with exponential backoff; calls are idempotent.
class ChatClient {
 public:
  explicit ChatClient(WireConfig config);

  ChatResult complete(const std::vector<ChatMessage>& messages);

  const WireConfig& config() const { return config_; }

  /// Test hook replacing the inter-retry sleep.
  void set_sleep_hook(std::function<void(int ms)> hook) { sleep_ = std::move(hook); }

 private:
  WireConfig config_;
  std::function<void(int ms)> sleep_;
};

/// Executes a workflow as a chain of chat-completion calls, one per operator;
/// each call sees the query and the previous step's output, and provider
/// token usage is summed over the chain. In-flight calls across all threads
/// are bounded by the config's parallelism.
class WireExecutor : public Executor {
 public:
  explicit WireExecutor(WireConfig config)
      : client_(config),
        slots_(std::make_unique<std::counting_semaphore<>>(
            std::max(1, config.parallelism))) {}

  ExecutionResult execute(const WorkflowSpec& w, const QueryItem& q) override;
  std::string backend_name() const override { return "wire"; }

  ChatClient& client() { return client_; }

 private:
  ChatClient client_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// One recorded request/response pair of the offline stub-server fixture.
struct WireFixtureEntry {
  json request;   // chat-completion request body
  json response;  // full chat-completion response body
};

/// Fixture files are JSONL: {"request": ..., "response": ...} per line.
std::vector<WireFixtureEntry> load_wire_fixture(const std::filesystem::path& path);
void save_wire_fixture(const std::filesystem::path& path,
                       const std::vector<WireFixtureEntry>& entries);

}  // namespace flowsearch::exec
