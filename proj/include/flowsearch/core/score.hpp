#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowsearch {

/// Prompt/completion token usage of one or more LLM calls.
struct TokenDelta {
  std::int64_t prompt = 0;
  std::int64_t completion = 0;

  std::int64_t total() const { return prompt + completion; }
  TokenDelta& operator+=(const TokenDelta& o) {
    prompt += o.prompt;
    completion += o.completion;
    return *this;
  }
  friend TokenDelta operator+(TokenDelta a, const TokenDelta& b) { return a += b; }
  friend bool operator==(const TokenDelta&, const TokenDelta&) = default;
};

enum class ScoreKind { kExec, kPred, kFew, kCalibrated };

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& s);

/// One evaluation of one workflow.
struct ScoreRecord {
  std::string workflow_id;
  ScoreKind kind = ScoreKind::kExec;
  double value = 0.0;  // in [0, 1]
  int n_queries = 0;   // 0 for pred
  TokenDelta tokens;
  int round = 0;

  void check() const {
    if (!(value >= 0.0 && value <= 1.0))
      throw std::invalid_argument("score value out of [0,1]: " + std::to_string(value));
    if (n_queries < 0) throw std::invalid_argument("negative n_queries");
  }

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

inline ScoreRecord make_score_record(std::string workflow_id, ScoreKind kind, double value,
                                     int n_queries, TokenDelta tokens, int round) {
  ScoreRecord r{std::move(workflow_id), kind, value, n_queries, tokens, round};
  r.check();
  return r;
}

}  // namespace flowsearch
