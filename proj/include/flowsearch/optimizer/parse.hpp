#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowsearch/core/types.hpp"

namespace flowsearch::opt {

/// A parsed self-prediction.
struct Prediction {
  double value = 0.0;  // in [0,1]
  std::string reason;
  std::string raw;
  bool clamped = false;  // box payload was outside [0,1]
};

/// Extracts the LAST <box>...</box> payload as the value and the last
/// <reason>...</reason> as the explanation; untagged prose is ignored.
/// Out-of-range values clamp with the flag set. Missing box tag or a
/// non-numeric payload yields nullopt (the caller retries).
std::optional<Prediction> parse_prediction(const std::string& raw, std::string* error = nullptr);

/// Structured fields parsed from an optimizer edit response.
struct ParsedEdit {
  std::string body;
  std::map<std::string, std::string> prompts;
  std::vector<OperatorCall> operators;
  std::string delta;
  bool delta_defaulted = false;  // <modification> section was missing
};

/// Parses the four-section edit envelope (<modification>, <operators>,
/// <prompts>, <workflow>). The workflow section is required; a missing
/// modification section defaults the delta and flags it; operators and
/// prompts default to empty. Prompt-reference consistency is the caller's
/// job, via validate_workflow.
std::optional<ParsedEdit> parse_workflow_edit(const std::string& raw,
                                              std::string* error = nullptr);

/// Renders the envelope parse_workflow_edit consumes; stub and simulated
/// optimizers emit through this so the text path is exercised end to end.
std::string render_workflow_edit(const ParsedEdit& edit);

/// Renders a prediction the way conforming responders do, value at 4
/// decimals.
std::string render_prediction(double value, const std::string& reason);

}  // namespace flowsearch::opt
