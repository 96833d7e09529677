#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "flowsearch/core/jsonl.hpp"
#include "flowsearch/exec/wire.hpp"
#include "flowsearch/optimizer/optimizer.hpp"

using namespace flowsearch;
using namespace flowsearch::exec;
namespace fs = std::filesystem;

namespace {

json chat_response(const std::string& content, std::int64_t prompt_tokens,
                   std::int64_t completion_tokens) {
  return json{
      {"id", "chatcmpl-x"},
      {"object", "chat.completion"},
      {"choices",
       json::array({json{{"index", 0},
                         {"message", json{{"role", "assistant"}, {"content", content}}},
                         {"finish_reason", "stop"}}})},
      {"usage", json{{"prompt_tokens", prompt_tokens},
                     {"completion_tokens", completion_tokens},
                     {"total_tokens", prompt_tokens + completion_tokens}}}};
}

/// In-process chat-completion stub: replays recorded fixture entries, matched
/// by (model, messages); unmatched requests are served in fixture order.
class StubChatServer {
 public:
  explicit StubChatServer(std::vector<WireFixtureEntry> fixture)
      : fixture_(std::move(fixture)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      ++requests_;
      if (fail_first_ > 0) {
        --fail_first_;
        res.status = 503;
        res.set_content("overloaded", "text/plain");
        return;
      }
      json body = json::parse(req.body);
      for (const auto& entry : fixture_) {
        if (entry.request.at("model") == body.at("model") &&
            entry.request.at("messages") == body.at("messages")) {
          res.set_content(entry.response.dump(), "application/json");
          return;
        }
      }
      if (cursor_ < fixture_.size()) {
        res.set_content(fixture_[cursor_++].response.dump(), "application/json");
        return;
      }
      res.status = 404;
      res.set_content("no recorded response", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }
  void fail_next(int n) { fail_first_ = n; }

 private:
  std::vector<WireFixtureEntry> fixture_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> fail_first_{0};
  std::size_t cursor_ = 0;
};

WireConfig stub_config(const StubChatServer& server) {
  WireConfig cfg;
  cfg.base_url = server.base_url();
  cfg.api_key = "test-key";
  cfg.model = "stub-model";
  cfg.max_retries = 3;
  cfg.initial_backoff_ms = 1;
  cfg.timeout_s = 5;
  return cfg;
}

}  // namespace

TEST_CASE("chat client: completes against a recorded response") {
  json request{{"model", "stub-model"},
               {"messages", json::array({json{{"role", "user"}, {"content", "hello"}}})}};
  StubChatServer server(std::vector<WireFixtureEntry>{{request, chat_response("hi there", 12, 3)}});

  ChatClient client(stub_config(server));
  client.set_sleep_hook([](int) {});
  ChatResult result = client.complete({{"user", "hello"}});
  REQUIRE(result.ok);
  CHECK(result.content == "hi there");
  CHECK(result.tokens.prompt == 12);
  CHECK(result.tokens.completion == 3);
}

TEST_CASE("chat client: retries transient 5xx failures with backoff") {
  json request{{"model", "stub-model"},
               {"messages", json::array({json{{"role", "user"}, {"content", "x"}}})}};
  StubChatServer server(std::vector<WireFixtureEntry>{{request, chat_response("recovered", 5, 5)}});
  server.fail_next(2);

  WireConfig cfg = stub_config(server);
  ChatClient client(cfg);
  std::vector<int> sleeps;
  client.set_sleep_hook([&](int ms) { sleeps.push_back(ms); });
  ChatResult result = client.complete({{"user", "x"}});
  REQUIRE(result.ok);
  CHECK(result.content == "recovered");
  CHECK(server.requests() == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[1] == sleeps[0] * 2);  // exponential backoff
}

TEST_CASE("chat client: exhausted retries surface a failure") {
  StubChatServer server({});
  server.fail_next(100);
  WireConfig cfg = stub_config(server);
  cfg.max_retries = 2;
  ChatClient client(cfg);
  client.set_sleep_hook([](int) {});
  ChatResult result = client.complete({{"user", "x"}});
  CHECK_FALSE(result.ok);
  CHECK(result.error.find("503") != std::string::npos);
  CHECK(server.requests() == 3);  // initial + 2 retries
}

TEST_CASE("chat client: 4xx errors do not retry") {
  StubChatServer server({});  // empty fixture -> 404
  ChatClient client(stub_config(server));
  client.set_sleep_hook([](int) {});
  ChatResult result = client.complete({{"user", "y"}});
  CHECK_FALSE(result.ok);
  CHECK(server.requests() == 1);
}

TEST_CASE("wire executor: chains operator calls and sums provider usage") {
  WorkflowSpec w;
  w.id = "w002";
  w.round = 1;
  w.operators = {{"AnswerGenerate", {}}, {"Custom", {{"instruction", "prompt_custom.TIDY"}}}};
  w.prompts["TIDY"] = "Return only the final answer.";
  w.body = synthesize_body(w.operators);

  QueryItem q{"q1", "what is 2+2?", "4", {}};

  // fixture entries are matched in order: step 1 then step 2
  json any_request{{"model", "stub-model"}, {"messages", json::array()}};
  StubChatServer server({{any_request, chat_response("intermediate: four", 100, 20)},
                         {any_request, chat_response("4", 60, 2)}});

  WireExecutor executor(stub_config(server));
  executor.client().set_sleep_hook([](int) {});
  ExecutionResult result = executor.execute(w, q);
  CHECK_FALSE(result.failed);
  CHECK(result.answer == "4");
  // token accounting equals the sum of the provider-reported usage fields
  CHECK(result.prompt_tokens == 160);
  CHECK(result.completion_tokens == 22);
  CHECK(server.requests() == 2);
}

TEST_CASE("wire executor: transport failure yields a flagged zero-score result") {
  WorkflowSpec w = make_initial_workflow("w001");
  QueryItem q{"q1", "question", "answer", {}};
  WireConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";  // nothing listens here
  cfg.max_retries = 1;
  cfg.timeout_s = 1;
  WireExecutor executor(cfg);
  executor.client().set_sleep_hook([](int) {});
  ExecutionResult result = executor.execute(w, q);
  CHECK(result.failed);

  QuerySet qs;
  qs.name = "one";
  qs.items = {q};
  auto outcome = evaluate_full(executor, w, qs, EvaluatorSpec{});
  CHECK(outcome.mean_score == 0.0);
  CHECK(outcome.failures == 1);
}

TEST_CASE("wire fixture: JSONL round trip") {
  auto path = fs::temp_directory_path() / "flowsearch_fixture.jsonl";
  std::vector<WireFixtureEntry> fixture{
      {json{{"model", "m"}, {"messages", json::array()}}, chat_response("a", 1, 2)},
      {json{{"model", "m"}, {"messages", json::array()}}, chat_response("b", 3, 4)}};
  save_wire_fixture(path, fixture);
  auto loaded = load_wire_fixture(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].request == fixture[0].request);
  CHECK(loaded[1].response == fixture[1].response);
  fs::remove(path);
}

TEST_CASE("chat llm caller: adapts the chat client for the optimizer") {
  json request{{"model", "stub-model"},
               {"messages",
                json::array({json{{"role", "user"}, {"content", "evaluate this"}}})}};
  StubChatServer server(std::vector<WireFixtureEntry>{{request, chat_response("<box>0.5</box>", 9, 4)}});
  opt::ChatLlmCaller caller(stub_config(server));
  caller.client().set_sleep_hook([](int) {});
  opt::LlmResponse response = caller.complete("evaluate this");
  REQUIRE(response.ok);
  CHECK(response.text == "<box>0.5</box>");
  CHECK(response.tokens.prompt == 9);
}
