#include "flowsearch/optimizer/prompt.hpp"

#include <cstdio>
#include <sstream>

#include "flowsearch/core/rng.hpp"

namespace flowsearch::opt {

namespace {

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

std::string digest_of(std::initializer_list<std::string_view> parts) {
  std::uint64_t h = fnv1a64("prompt-digest");
  for (auto part : parts) h = hash_combine(h, fnv1a64(part));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find('{', pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    std::size_t close = text.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    std::string name = text.substr(open + 1, close - open - 1);
    auto it = values.find(name);
    if (it != values.end()) {
      out.append(text, pos, open - pos);
      out.append(it->second);
      pos = close + 1;
    } else {
      out.append(text, pos, open - pos + 1);
      pos = open + 1;
    }
  }
  return out;
}

std::vector<std::string> unfilled_placeholders(const std::string& rendered,
                                               std::span<const std::string> names) {
  std::vector<std::string> left;
  for (const auto& name : names) {
    if (rendered.find("{" + name + "}") != std::string::npos) left.push_back(name);
  }
  return left;
}

std::string workflow_code_block(const WorkflowSpec& w) {
  std::ostringstream out;
  out << "# workflow " << w.id << " (round " << w.round << ")\n";
  out << "# operators: ";
  for (std::size_t i = 0; i < w.operators.size(); ++i) {
    if (i > 0) out << ", ";
    out << w.operators[i].name;
  }
  out << "\n" << w.body;
  return out.str();
}

std::string prompts_code_block(const std::map<std::string, std::string>& prompts) {
  std::ostringstream out;
  for (const auto& [name, text] : prompts) {
    out << name << " = \"\"\"" << text << "\"\"\"\n";
  }
  return out.str();
}

PromptBundle build_optimizer_prompt(const WorkflowSpec& parent,
                                    std::span<const ExperienceEdgeView> local,
                                    std::span<const GlobalScoreView> global, int round,
                                    const OperatorCatalog& catalog, const Template& tmpl,
                                    int experience_limit) {
  std::size_t local_begin = 0;
  if (experience_limit > 0 && local.size() > static_cast<std::size_t>(experience_limit)) {
    local_begin = local.size() - static_cast<std::size_t>(experience_limit);
  }
  std::ostringstream local_text;
  for (std::size_t i = local_begin; i < local.size(); ++i) {
    const auto& e = local[i];
    local_text << "round " << e.round << ": parent score " << format_score(e.parent_score)
               << " -> child score " << format_score(e.child_score) << "; edit: " << e.delta
               << "\n";
  }
  std::ostringstream global_text;
  for (const auto& g : global) {
    global_text << "round " << g.round << ": workflow " << g.workflow_id << " scored "
                << format_score(g.score) << "\n";
  }

  std::map<std::string, std::string> values{
      {"round", std::to_string(round)},
      {"workflow", workflow_code_block(parent)},
      {"prompt", prompts_code_block(parent.prompts)},
      {"operator_description", catalog.describe()},
      {"local_experience", local_text.str()},
      {"global_experience", global_text.str()},
  };

  PromptBundle bundle;
  bundle.kind = PromptKind::kOptimize;
  bundle.template_id = tmpl.id;
  bundle.text = render_template(tmpl.text, values);
  bundle.inputs_digest = digest_of({tmpl.id, values["workflow"], values["prompt"],
                                    values["local_experience"], values["global_experience"],
                                    values["round"]});
  return bundle;
}

PromptBundle build_eval_prompt(const WorkflowSpec& w, const PredictContext& ctx,
                               const Template& tmpl) {
  std::ostringstream experience;
  for (const auto& rec : ctx.history) {
    experience << "record:\n  round: " << rec.round << "\n  score: " << format_score(rec.score)
               << "\n  prediction: "
               << (rec.prediction < 0.0 ? std::string("n/a") : format_score(rec.prediction))
               << "\n  code:\n" << rec.code << "\n";
  }

  std::map<std::string, std::string> values{
      {"dataset_description", ctx.dataset_description},
      {"dataset_few_shots", ctx.dataset_few_shots},
      {"workflow", workflow_code_block(w)},
      {"prompt", prompts_code_block(w.prompts)},
      {"operator_description", ctx.operator_description},
      {"experience", experience.str()},
      {"backbone_model", ctx.backbone_model},
  };

  PromptBundle bundle;
  bundle.kind = PromptKind::kEvaluate;
  bundle.template_id = tmpl.id;
  bundle.text = render_template(tmpl.text, values);
  bundle.inputs_digest =
      digest_of({tmpl.id, values["workflow"], values["prompt"], values["dataset_few_shots"],
                 values["experience"], values["dataset_description"], values["backbone_model"]});
  return bundle;
}

}  // namespace flowsearch::opt
