#pragma once

#include <optional>
#include <string>

namespace flowsearch::exec {

enum class EvaluatorKind { kExactMatch, kNumericMatch, kWrappedAnswer };

std::string to_string(EvaluatorKind kind);
EvaluatorKind evaluator_kind_from_string(const std::string& s);

/// How an answer is scored against the reference.
struct EvaluatorSpec {
  EvaluatorKind kind = EvaluatorKind::kExactMatch;
  double tolerance = 0.0;  // numeric match; must be >= 0
  EvaluatorKind inner = EvaluatorKind::kExactMatch;  // wrapped: evaluator applied to the payload

  void validate() const;
};

/// Trim plus ASCII case-fold.
std::string normalize_text(const std::string& s);

std::optional<double> parse_number(const std::string& s);

/// Innermost `answer(...)` or `\boxed{...}` payload, if any wrapper is present.
std::optional<std::string> extract_wrapped_answer(const std::string& text);

/// Scores an answer in [0,1]. `flagged` (optional) is set when a numeric
/// evaluator could not parse the answer. Wrapped evaluation falls back to the
/// whole text when no wrapper is present.
double evaluate_answer(const std::string& answer, const std::string& reference,
                       const EvaluatorSpec& spec, bool* flagged = nullptr);

}  // namespace flowsearch::exec
