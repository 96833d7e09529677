#include "flowsearch/exec/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace flowsearch::exec {

std::string to_string(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::kExactMatch: return "exact_match";
    case EvaluatorKind::kNumericMatch: return "numeric_match";
    case EvaluatorKind::kWrappedAnswer: return "wrapped_answer";
  }
  throw std::logic_error("bad EvaluatorKind");
}

EvaluatorKind evaluator_kind_from_string(const std::string& s) {
  if (s == "exact_match" || s == "exact") return EvaluatorKind::kExactMatch;
  if (s == "numeric_match" || s == "numeric") return EvaluatorKind::kNumericMatch;
  if (s == "wrapped_answer" || s == "wrapped") return EvaluatorKind::kWrappedAnswer;
  throw std::invalid_argument("unknown evaluator kind: " + s);
}

void EvaluatorSpec::validate() const {
  if (tolerance < 0.0) throw std::invalid_argument("evaluator tolerance must be >= 0");
  if (kind == EvaluatorKind::kWrappedAnswer && inner == EvaluatorKind::kWrappedAnswer)
    throw std::invalid_argument("wrapped evaluator cannot delegate to itself");
}

std::string normalize_text(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  std::string out = s.substr(begin, end - begin);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  std::string trimmed = normalize_text(s);
  // strip common formatting: thousands separators and a trailing percent sign
  std::string cleaned;
  cleaned.reserve(trimmed.size());
  for (char c : trimmed) {
    if (c == ',' || c == '$') continue;
    cleaned.push_back(c);
  }
  bool percent = !cleaned.empty() && cleaned.back() == '%';
  if (percent) cleaned.pop_back();
  if (cleaned.empty()) return std::nullopt;
  try {
    std::size_t consumed = 0;
    double value = std::stod(cleaned, &consumed);
    if (consumed != cleaned.size()) return std::nullopt;
    return percent ? value / 100.0 : value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace {

// Payload of the first `open`..matching-close span at or after `from`.
std::optional<std::string> balanced_payload(const std::string& text, const std::string& open,
                                            char open_ch, char close_ch, std::size_t from) {
  std::size_t start = text.find(open, from);
  if (start == std::string::npos) return std::nullopt;
  std::size_t pos = start + open.size();
  int depth = 1;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] == open_ch) {
      ++depth;
    } else if (text[i] == close_ch) {
      --depth;
      if (depth == 0) return text.substr(pos, i - pos);
    }
  }
  return std::nullopt;  // unbalanced
}

}  // namespace

std::optional<std::string> extract_wrapped_answer(const std::string& text) {
  auto answer = balanced_payload(text, "answer(", '(', ')', 0);
  auto boxed = balanced_payload(text, "\\boxed{", '{', '}', 0);
  std::optional<std::string> payload;
  if (answer && boxed) {
    payload = text.find("answer(") < text.find("\\boxed{") ? answer : boxed;
  } else if (answer) {
    payload = answer;
  } else if (boxed) {
    payload = boxed;
  }
  if (!payload) return std::nullopt;
  // innermost wrapper wins when payloads nest
  if (auto inner = extract_wrapped_answer(*payload)) return inner;
  return payload;
}

double evaluate_answer(const std::string& answer, const std::string& reference,
                       const EvaluatorSpec& spec, bool* flagged) {
  if (flagged) *flagged = false;
  switch (spec.kind) {
    case EvaluatorKind::kExactMatch:
      return normalize_text(answer) == normalize_text(reference) ? 1.0 : 0.0;
    case EvaluatorKind::kNumericMatch: {
      auto a = parse_number(answer);
      auto r = parse_number(reference);
      if (!a || !r) {
        if (flagged) *flagged = true;
        return 0.0;
      }
      return std::abs(*a - *r) <= spec.tolerance ? 1.0 : 0.0;
    }
    case EvaluatorKind::kWrappedAnswer: {
      std::string payload = extract_wrapped_answer(answer).value_or(answer);
      EvaluatorSpec delegate;
      delegate.kind = spec.inner;
      delegate.tolerance = spec.tolerance;
      return evaluate_answer(payload, reference, delegate, flagged);
    }
  }
  throw std::logic_error("bad EvaluatorKind");
}

}  // namespace flowsearch::exec
