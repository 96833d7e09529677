#pragma once

#include <filesystem>
#include <string>

namespace flowsearch::opt {

/// A named prompt template with `{placeholder}` slots.
struct Template {
  std::string id;    // disjoint ids keep optimize/evaluate prompts structurally separate
  std::string text;
};

/// Built-in templates plus file overrides. The workflow-evaluation template is
/// deliberately a different document from the workflow-edit template; the two
/// never share a preamble.
class TemplateRepo {
 public:
  static const Template& default_eval();      // id "eval.v1"
  static const Template& default_optimize();  // id "optimize.v1"
  static const Template& default_eval_conf(); // id "eval-conf.v1", confidence-probe variant

  /// Loads a template override from a plain-text file.
  static Template load_file(const std::filesystem::path& path, const std::string& id);
};

}  // namespace flowsearch::opt
