#include "flowsearch/core/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace flowsearch {

std::string to_string(Split split) {
  return split == Split::kValidation ? "validation" : "test";
}

Split split_from_string(const std::string& s) {
  if (s == "validation") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw std::invalid_argument("unknown split: " + s);
}

const QueryItem* QuerySet::find(const std::string& id) const {
  for (const auto& q : items) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

void QuerySet::validate() const {
  if (items.empty()) throw std::invalid_argument("query set '" + name + "' is empty");
  std::set<std::string> seen;
  for (const auto& q : items) {
    if (q.input.empty()) throw std::invalid_argument("query '" + q.id + "' has empty input");
    if (!seen.insert(q.id).second)
      throw std::invalid_argument("duplicate query id '" + q.id + "' in set '" + name + "'");
  }
}

const OperatorCatalog& OperatorCatalog::standard() {
  static const OperatorCatalog catalog{std::vector<OperatorInfo>{
      {"Custom", "Custom(input, instruction)",
       "Single LLM call applying `instruction` to `input`; returns a free-form response."},
      {"AnswerGenerate", "AnswerGenerate(input)",
       "Step-by-step reasoning call that returns a thought and a final answer."},
      {"ScEnsemble", "ScEnsemble(solutions)",
       "Self-consistency ensemble: picks the most frequent answer among candidate solutions."},
      {"Programmer", "Programmer(problem, analysis)",
       "Writes and mentally executes code for computational problems; returns the result."},
      {"Test", "Test(problem, solution, entry_point)",
       "Checks a candidate solution against the problem statement; returns pass/fail and a fix."},
      {"CustomCodeGenerate", "CustomCodeGenerate(problem, entry_point, instruction)",
       "Generates code for `problem` with the given entry point under `instruction`."},
      {"Review", "Review(problem, solution)",
       "Critiques a candidate solution and lists concrete defects."},
      {"Revise", "Revise(problem, solution, feedback)",
       "Rewrites a candidate solution according to review feedback."},
  }};
  return catalog;
}

bool OperatorCatalog::contains(const std::string& name) const {
  return find(name) != nullptr;
}

const OperatorInfo* OperatorCatalog::find(const std::string& name) const {
  auto it = std::find_if(ops_.begin(), ops_.end(),
                         [&](const OperatorInfo& op) { return op.name == name; });
  return it == ops_.end() ? nullptr : &*it;
}

std::string OperatorCatalog::describe() const {
  std::ostringstream out;
  for (const auto& op : ops_) {
    out << "- " << op.signature << ": " << op.description << "\n";
  }
  return out.str();
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << issue.kind << ": " << issue.detail << "; ";
  }
  return out.str();
}

std::vector<std::string> referenced_prompts(const std::string& body) {
  static const std::string marker = "prompt_custom.";
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::size_t pos = 0;
  while ((pos = body.find(marker, pos)) != std::string::npos) {
    std::size_t start = pos + marker.size();
    std::size_t end = start;
    while (end < body.size() &&
           (std::isalnum(static_cast<unsigned char>(body[end])) || body[end] == '_')) {
      ++end;
    }
    if (end > start) {
      std::string name = body.substr(start, end - start);
      if (seen.insert(name).second) names.push_back(name);
    }
    pos = end;
  }
  return names;
}

ValidationReport validate_workflow(const WorkflowSpec& w, const OperatorCatalog& catalog,
                                   const std::vector<std::string>* known_ids) {
  ValidationReport report;
  for (const auto& call : w.operators) {
    if (!catalog.contains(call.name)) {
      report.issues.push_back({"undefined operator", call.name});
    }
  }
  for (const auto& name : referenced_prompts(w.body)) {
    if (w.prompts.find(name) == w.prompts.end()) {
      report.issues.push_back({"undefined prompt", name});
    }
  }
  if (w.round <= 1) {
    if (!w.parent_id.empty()) {
      report.issues.push_back({"dangling parent", "round-1 workflow must have no parent"});
    }
  } else {
    if (w.parent_id.empty()) {
      report.issues.push_back({"dangling parent", "round " + std::to_string(w.round) +
                                                      " workflow has no parent id"});
    } else if (w.parent_id == w.id) {
      report.issues.push_back({"dangling parent", "workflow is its own parent"});
    } else if (known_ids != nullptr &&
               std::find(known_ids->begin(), known_ids->end(), w.parent_id) == known_ids->end()) {
      report.issues.push_back({"dangling parent", "unknown parent id " + w.parent_id});
    }
  }
  return report;
}

std::string synthesize_body(const std::vector<OperatorCall>& operators) {
  std::ostringstream out;
  out << "async def __call__(self, problem):\n";
  std::string prev = "problem";
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto& call = operators[i];
    std::string var = "step_" + std::to_string(i + 1);
    out << "    " << var << " = await self." << call.name << "(input=" << prev;
    for (const auto& [key, value] : call.params) {
      out << ", " << key << "=";
      if (value.rfind("prompt_custom.", 0) == 0) {
        out << value;
      } else {
        out << '"' << value << '"';
      }
    }
    out << ")\n";
    prev = var;
  }
  out << "    return " << prev << ", self.llm.usage()\n";
  return out.str();
}

WorkflowSpec make_initial_workflow(const std::string& id) {
  WorkflowSpec w;
  w.id = id;
  w.round = 1;
  w.operators = {{"Custom", {{"instruction", ""}}}};
  w.body = synthesize_body(w.operators);
  w.notes = "initial single question-answering call";
  return w;
}

}  // namespace flowsearch
