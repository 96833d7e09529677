#pragma once

#include <map>
#include <string>
#include <vector>

namespace flowsearch {

/// One benchmark query: an input text plus the expected answer.
struct QueryItem {
  std::string id;
  std::string input;
  std::string reference;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const QueryItem&, const QueryItem&) = default;
};

enum class Split { kValidation, kTest };

std::string to_string(Split split);
Split split_from_string(const std::string& s);

struct QuerySet {
  std::string name;
  Split split = Split::kValidation;
  std::vector<QueryItem> items;

  std::size_t size() const { return items.size(); }
  const QueryItem* find(const std::string& id) const;

  /// Throws std::invalid_argument on empty set, duplicate ids, or empty inputs.
  void validate() const;

  friend bool operator==(const QuerySet&, const QuerySet&) = default;
};

/// A single operator invocation inside a workflow body.
struct OperatorCall {
  std::string name;
  std::map<std::string, std::string> params;

  friend bool operator==(const OperatorCall&, const OperatorCall&) = default;
};

/// A candidate workflow: operator sequence, named prompt templates, and an
/// opaque executable body. The engine never interprets the body; execution is
/// delegated to an Executor implementation.
struct WorkflowSpec {
  std::string id;
  int round = 1;
  std::string parent_id;  // empty for the round-1 root
  std::vector<OperatorCall> operators;
  std::map<std::string, std::string> prompts;
  std::string body;
  std::string notes;

  friend bool operator==(const WorkflowSpec&, const WorkflowSpec&) = default;
};

struct OperatorInfo {
  std::string name;
  std::string signature;    // e.g. "Custom(input, instruction)"
  std::string description;  // one-line behavioral description for prompts
};

class OperatorCatalog {
 public:
  OperatorCatalog() = default;
  explicit OperatorCatalog(std::vector<OperatorInfo> ops) : ops_(std::move(ops)) {}

  /// The default operator set available to generated workflows.
  static const OperatorCatalog& standard();

  bool contains(const std::string& name) const;
  const OperatorInfo* find(const std::string& name) const;
  const std::vector<OperatorInfo>& entries() const { return ops_; }

  /// Text block describing every operator, rendered into prompts.
  std::string describe() const;

 private:
  std::vector<OperatorInfo> ops_;
};

struct ValidationIssue {
  std::string kind;  // "undefined operator" | "undefined prompt" | "dangling parent"
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Prompt names referenced by a workflow body via `prompt_custom.<NAME>`.
std::vector<std::string> referenced_prompts(const std::string& body);

/// Static workflow checks: operators against the catalog, prompt references
/// against the prompt map, parent/round consistency. When `known_ids` is
/// given, a parent id not in it is flagged as dangling.
ValidationReport validate_workflow(const WorkflowSpec& w, const OperatorCatalog& catalog,
                                   const std::vector<std::string>* known_ids = nullptr);

/// Renders a body for a workflow assembled from an operator list; parameter
/// values of the form `prompt_custom.NAME` become prompt references in the
/// body text.
std::string synthesize_body(const std::vector<OperatorCall>& operators);

/// The round-1 root: a single question-answering call with an empty
/// instruction.
WorkflowSpec make_initial_workflow(const std::string& id);

}  // namespace flowsearch
