#include "flowsearch/exec/wire.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "flowsearch/core/jsonl.hpp"

namespace flowsearch::exec {

WireConfig WireConfig::from_env(WireConfig defaults) {
  if (const char* base = std::getenv("FLOWSEARCH_API_BASE")) defaults.base_url = base;
  if (const char* key = std::getenv("FLOWSEARCH_API_KEY")) defaults.api_key = key;
  if (const char* model = std::getenv("FLOWSEARCH_MODEL")) defaults.model = model;
  return defaults;
}

ChatClient::ChatClient(WireConfig config) : config_(std::move(config)) {
  sleep_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

ChatResult ChatClient::complete(const std::vector<ChatMessage>& messages) {
  ChatResult result;
  if (config_.base_url.empty()) {
    result.error = "wire backend: no endpoint configured (set FLOWSEARCH_API_BASE)";
    return result;
  }

  json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = json::array();
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  const std::string payload = body.dump();

  int backoff = config_.initial_backoff_ms;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleep_(backoff);
      backoff *= 2;
    }
    httplib::Client http(config_.base_url);
    http.set_connection_timeout(config_.timeout_s);
    http.set_read_timeout(config_.timeout_s);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = http.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      result.error = "server error: HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      result.error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      return result;  // 4xx will not improve on retry
    }
    try {
      json reply = json::parse(res->body);
      result.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        result.tokens.prompt = reply["usage"].value("prompt_tokens", std::int64_t{0});
        result.tokens.completion = reply["usage"].value("completion_tokens", std::int64_t{0});
      }
      result.ok = true;
      result.error.clear();
      return result;
    } catch (const json::exception& e) {
      result.error = std::string("malformed chat response: ") + e.what();
      continue;
    }
  }
  return result;
}

ExecutionResult WireExecutor::execute(const WorkflowSpec& w, const QueryItem& q) {
  ExecutionResult r;
  r.query_id = q.id;
  const auto start = std::chrono::steady_clock::now();

  std::string carry = q.input;
  for (const auto& call : w.operators) {
    std::string system = "You are the " + call.name + " step of a multi-step workflow.";
    for (const auto& [key, value] : call.params) {
      std::string resolved = value;
      if (value.rfind("prompt_custom.", 0) == 0) {
        auto it = w.prompts.find(value.substr(std::string("prompt_custom.").size()));
        if (it != w.prompts.end()) resolved = it->second;
      }
      if (!resolved.empty()) system += "\n" + key + ": " + resolved;
    }
    slots_->acquire();
    ChatResult step = client_.complete({{"system", system}, {"user", carry}});
    slots_->release();
    r.prompt_tokens += step.tokens.prompt;
    r.completion_tokens += step.tokens.completion;
    if (!step.ok) {
      r.failed = true;
      r.answer = "";
      break;
    }
    carry = step.content;
  }
  if (!r.failed) r.answer = carry;
  r.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

std::vector<WireFixtureEntry> load_wire_fixture(const std::filesystem::path& path) {
  std::vector<WireFixtureEntry> entries;
  for (const auto& j : read_jsonl(path)) {
    entries.push_back({j.at("request"), j.at("response")});
  }
  return entries;
}

void save_wire_fixture(const std::filesystem::path& path,
                       const std::vector<WireFixtureEntry>& entries) {
  std::vector<json> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) {
    lines.push_back(json{{"request", e.request}, {"response", e.response}});
  }
  write_jsonl(path, lines);
}

}  // namespace flowsearch::exec
