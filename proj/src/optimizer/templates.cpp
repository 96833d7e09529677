#include "flowsearch/optimizer/templates.hpp"

#include "flowsearch/core/jsonl.hpp"

namespace flowsearch::opt {

namespace {

const char* kEvalTemplateText =
    R"tpl(You are an expert evaluator of workflows.
Your task is to predict the probability that a given workflow will correctly execute on the WHOLE DATASET,
which represents your estimation of its overall accuracy.
Respond with a brief explanation first, followed by a single floating-point number between 0.0 and 1.0.

Dataset Description:
<dataset>
{dataset_description}
</dataset>

Few-shot samples of the Dataset (jsonl format):
{dataset_few_shots}

Workflow to evaluate (python code):
<workflow>
{workflow}
</workflow>

Prompt used in the workflow (python code):
<prompt>
{prompt}
</prompt>

The workflow is Python code; the key function is __call__(question), which produces the workflow's response.
The workflow may call LLM-based operators described below:
<operator_description>
{operator_description}
</operator_description>

Reference experiences:
During the warm-up rounds, several workflows have been executed and evaluated.
Each record includes the round (the iteration number of the workflow), the score (the actual reward obtained after execution), the prediction (the reward you predicted in the previous round), and the python code of the workflow and prompt. (these workflows use the same operators as shown above in the <operator_description></operator_description>)
These experiences are provided to help you calibrate your future predictions by comparing your past predicted rewards with the actual scores, you can adjust your estimation strategy to make your predicted rewards as close as possible to the real execution results.
<experience>
{experience}
</experience>

**General Instructions for evaluation:**
1. Step by step, carefully check for critical errors that could prevent execution:
   - Package check (VERY IMPORTANT): The workflow code imports the required packages (for example: import numpy, asyncio and other commonly used Python packages). If any package is used in the workflow but missing or commented out, output 0.0 directly and do not continue other checks.

   - Prompt check (VERY IMPORTANT): The workflow code uses prompts written in Python format.
   If the workflow uses no prompts then just continue other checks.
   If the workflow uses prompts,
   For every prompt referenced in the workflow, you must verify that this prompt is properly defined in the prompt.py file (commonly imported as prompt_custom).
   A prompt is considered properly defined only if: It appears in the prompt.py file without being commented out AND the prompt name matches exactly (including capitalization, underscores, and punctuation).
   If any prompt used in the workflow is missing, misspelled, or commented out in prompt.py, you must immediately output 0.0.
   Check ALL prompts used in the workflow following the same rule.

   - Operator check (VERY IMPORTANT): The operator is provided in text description format. If the workflow uses an operator, it must be among the operators defined in <operator_description>. If the workflow uses an undefined operator (including mismatched names, incorrect parameters, or improper usage) OR the parameters passed when using an operator do not comply with the interface requirements defined in operator_description, output 0.0 directly and do not continue other checks.

   - Workflow check (VERY IMPORTANT): The __call__ funciton must return the output string of the workflow and the token usage only, more or less is totally wrong. The input of the workflow are only the input string, more or less is totally wrong.

2. Step by step, Analyze whether the workflow can logically solve the queries in the WHOLE DATASET.Please carefully analyze the function of each operator and whether the position of each operator can smoothly promote the resolution of the problem.

3. Consider potential hallucinations from the operators, for now, we use {backbone_model} as backbone model in operators.

4. Evaluate carefully and comprehensively across all query types in the WHOLE DATASET.

5. Be fair and rational: do not easily assign 0.0 unless there is a severe problem, and avoid scoring 1.0 with overconfidence.

6. There is no need to focus heavily on output details, such as formatting inconsistencies, since extraction is handled simply or by specialized subsequent steps.

Output format:
- Provide a brief explanation of your reasoning in a <reason> tag.
- Wrap your final probability in a <box> tag **after** the <reason>.

For example:
<reason>The workflow correctly calls all operators and uses only defined prompts.</reason>
<box>0.85</box>
)tpl";

const char* kOptimizeTemplateText =
    R"tpl(You are an expert designer of LLM agent workflows.
Your task is to improve the parent workflow below with ONE concrete edit: add, remove, duplicate, or reorder an operator step, or rewrite one of its prompts. Ground the edit in the experience records; prefer changes that past edits show to raise the score.

Round being generated: {round}

Parent workflow (python code):
<workflow>
{workflow}
</workflow>

Prompts used by the parent (python code):
<prompt>
{prompt}
</prompt>

Operators you may use:
<operator_description>
{operator_description}
</operator_description>

Edit history of this parent (parent score, edit, resulting child score):
<local_experience>
{local_experience}
</local_experience>

All evaluated workflows so far (round, score):
<global_experience>
{global_experience}
</global_experience>

Respond with exactly these four sections and nothing else:
<modification>one sentence describing the edit</modification>
<operators>
one operator call per line, in execution order: Name key=value key2="quoted value"
reference a prompt by writing key=prompt_custom.PROMPT_NAME
</operators>
<prompts>
PROMPT_NAME = """prompt text"""
</prompts>
<workflow>
the full python body of __call__, using only the operators listed above
</workflow>
)tpl";

const char* kEvalConfTemplateText =
    R"tpl(You are an expert designer of LLM agent workflows.
You previously produced the workflow below. Output your confidence on the answer.

Workflow (python code):
<workflow>
{workflow}
</workflow>

Prompts used by the workflow (python code):
<prompt>
{prompt}
</prompt>

Operators it may use:
<operator_description>
{operator_description}
</operator_description>

Output format:
- Provide a brief explanation of your reasoning in a <reason> tag.
- Wrap your confidence, a single floating-point number between 0.0 and 1.0, in a <box> tag **after** the <reason>.
)tpl";

}  // namespace

const Template& TemplateRepo::default_eval() {
  static const Template t{"eval.v1", kEvalTemplateText};
  return t;
}

const Template& TemplateRepo::default_optimize() {
  static const Template t{"optimize.v1", kOptimizeTemplateText};
  return t;
}

const Template& TemplateRepo::default_eval_conf() {
  static const Template t{"eval-conf.v1", kEvalConfTemplateText};
  return t;
}

Template TemplateRepo::load_file(const std::filesystem::path& path, const std::string& id) {
  return Template{id, read_text_file(path)};
}

}  // namespace flowsearch::opt
