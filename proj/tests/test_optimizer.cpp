#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "flowsearch/core/jsonl.hpp"
#include "flowsearch/core/rng.hpp"
#include "flowsearch/exec/sim.hpp"
#include "flowsearch/optimizer/optimizer.hpp"
#include "flowsearch/optimizer/parse.hpp"
#include "flowsearch/optimizer/prompt.hpp"
#include "flowsearch/optimizer/sim_optimizer.hpp"
#include "flowsearch/optimizer/templates.hpp"
#include "support/test_support.hpp"

using namespace flowsearch;
using namespace flowsearch::opt;
namespace fs = std::filesystem;

namespace {

const fs::path kGoldenDir = fs::path(FLOWSEARCH_SOURCE_DIR) / "tests" / "golden";

// Compare against a frozen file; FLOWSEARCH_REGEN_GOLDEN=1 rewrites it.
void check_golden(const std::string& rendered, const std::string& name) {
  const fs::path path = kGoldenDir / name;
  if (std::getenv("FLOWSEARCH_REGEN_GOLDEN") != nullptr) {
    fs::create_directories(kGoldenDir);
    write_text_file(path, rendered);
    MESSAGE("regenerated golden file ", path.string());
    return;
  }
  REQUIRE_MESSAGE(fs::exists(path), "missing golden file ", path.string(),
                  " (run with FLOWSEARCH_REGEN_GOLDEN=1 to create)");
  CHECK_MESSAGE(rendered == read_text_file(path), "rendered text differs from ", name);
}

WorkflowSpec golden_workflow() {
  WorkflowSpec w = make_initial_workflow("w001");
  w.operators.push_back({"ScEnsemble", {}});
  w.operators.push_back({"Custom", {{"instruction", "prompt_custom.FINAL_CHECK"}}});
  w.prompts["FINAL_CHECK"] = "Verify the answer once and restate it tersely.";
  w.body = synthesize_body(w.operators);
  return w;
}

PredictContext golden_context() {
  PredictContext ctx;
  ctx.dataset_description = "Synthetic short-answer benchmark; one factual answer per query.";
  ctx.dataset_few_shots =
      R"({"id":"q1","input":"synthetic task 1","reference":"ans-1"})" "\n"
      R"({"id":"q2","input":"synthetic task 2","reference":"ans-2"})" "\n";
  ctx.operator_description = OperatorCatalog::standard().describe();
  ctx.backbone_model = "test-backbone";
  return ctx;
}

const std::vector<std::string> kEvalPlaceholders = {
    "dataset_description", "dataset_few_shots", "workflow",       "prompt",
    "operator_description", "experience",       "backbone_model"};

}  // namespace

TEST_CASE("render_template substitutes known names and leaves others alone") {
  std::map<std::string, std::string> values{{"a", "X"}, {"b", "Y"}};
  CHECK(render_template("{a}-{b}-{c}", values) == "X-Y-{c}");
  CHECK(render_template("no placeholders", values) == "no placeholders");
  CHECK(render_template("{a}{a}", values) == "XX");
  auto left = unfilled_placeholders("{a} {c}", std::vector<std::string>{"a", "b", "c"});
  CHECK(left == std::vector<std::string>{"a", "c"});
}

TEST_CASE("eval prompt: minimal render contains the instruction blocks verbatim") {
  PromptBundle bundle = build_eval_prompt(golden_workflow(), golden_context());
  CHECK(bundle.kind == PromptKind::kEvaluate);
  CHECK(bundle.template_id == "eval.v1");

  for (const char* block :
       {"Package check (VERY IMPORTANT)", "Prompt check (VERY IMPORTANT)",
        "Operator check (VERY IMPORTANT)", "Workflow check (VERY IMPORTANT)",
        "predict the probability that a given workflow",
        "Wrap your final probability in a <box> tag",
        "comparing your past predicted rewards with the actual scores",
        "<box>0.85</box>"}) {
    CHECK_MESSAGE(bundle.text.find(block) != std::string::npos, "missing block: ", block);
  }
  CHECK(bundle.text.find("test-backbone") != std::string::npos);
  CHECK(unfilled_placeholders(bundle.text, kEvalPlaceholders).empty());

  check_golden(bundle.text, "eval_prompt_minimal.txt");
}

TEST_CASE("eval prompt: history records serialize with round, score, prediction") {
  PredictContext ctx = golden_context();
  ctx.history.push_back({3, 0.62, 0.7, "# code of w003"});
  PromptBundle bundle = build_eval_prompt(golden_workflow(), ctx);
  CHECK(bundle.text.find("round: 3") != std::string::npos);
  CHECK(bundle.text.find("score: 0.6200") != std::string::npos);
  CHECK(bundle.text.find("prediction: 0.7000") != std::string::npos);
  CHECK(bundle.text.find("# code of w003") != std::string::npos);

  ctx.history[0].prediction = -1.0;  // warm-up rounds have no prediction
  CHECK(build_eval_prompt(golden_workflow(), ctx).text.find("prediction: n/a") !=
        std::string::npos);

  check_golden(bundle.text, "eval_prompt_with_history.txt");
}

TEST_CASE("optimizer prompt: experience rendering and determinism") {
  WorkflowSpec parent = golden_workflow();
  std::vector<ExperienceEdgeView> local{{2, 0.40, 0.55, "add ScEnsemble at position 2"},
                                        {4, 0.55, 0.50, "duplicate Custom at position 1"}};
  std::vector<GlobalScoreView> global{{"w001", 1, 0.40}, {"w002", 2, 0.55}, {"w003", 3, 0.50}};

  PromptBundle a = build_optimizer_prompt(parent, local, global, 5,
                                          OperatorCatalog::standard());
  PromptBundle b = build_optimizer_prompt(parent, local, global, 5,
                                          OperatorCatalog::standard());
  CHECK(a.kind == PromptKind::kOptimize);
  CHECK(a.template_id == "optimize.v1");
  CHECK(a.text == b.text);
  CHECK(a.inputs_digest == b.inputs_digest);

  CHECK(a.text.find("add ScEnsemble at position 2") != std::string::npos);
  CHECK(a.text.find("duplicate Custom at position 1") != std::string::npos);
  for (const char* entry : {"workflow w001 scored 0.4000", "workflow w002 scored 0.5500",
                            "workflow w003 scored 0.5000"}) {
    CHECK(a.text.find(entry) != std::string::npos);
  }
  check_golden(a.text, "optimize_prompt_with_experience.txt");

  // empty experience: parent and catalog only
  PromptBundle bare = build_optimizer_prompt(parent, {}, {}, 2, OperatorCatalog::standard());
  CHECK(bare.text.find("scored") == std::string::npos);
  CHECK(bare.text.find("ScEnsemble(solutions)") != std::string::npos);
  CHECK(bare.text.find(parent.body) != std::string::npos);
  CHECK(bare.inputs_digest != a.inputs_digest);

  // experience cap keeps the most recent entries
  PromptBundle capped = build_optimizer_prompt(parent, local, global, 5,
                                               OperatorCatalog::standard(),
                                               TemplateRepo::default_optimize(), 1);
  CHECK(capped.text.find("duplicate Custom") != std::string::npos);
  CHECK(capped.text.find("add ScEnsemble at position 2") == std::string::npos);
}

TEST_CASE("optimize and evaluate prompts never share a preamble") {
  CHECK(TemplateRepo::default_eval().id != TemplateRepo::default_optimize().id);
  auto first_line = [](const std::string& text) {
    return text.substr(0, text.find('\n'));
  };
  CHECK(first_line(TemplateRepo::default_eval().text) !=
        first_line(TemplateRepo::default_optimize().text));
}

TEST_CASE("template files on disk match the embedded defaults") {
  const fs::path dir = fs::path(FLOWSEARCH_SOURCE_DIR) / "templates";
  CHECK(read_text_file(dir / "eval_prompt.txt") == TemplateRepo::default_eval().text);
  CHECK(read_text_file(dir / "optimize_prompt.txt") == TemplateRepo::default_optimize().text);
  CHECK(read_text_file(dir / "eval_prompt_conf.txt") == TemplateRepo::default_eval_conf().text);
  Template loaded = TemplateRepo::load_file(dir / "eval_prompt_conf.txt", "eval-conf.file");
  CHECK(loaded.text.find("Output your confidence on the answer") != std::string::npos);
}

TEST_CASE("parse_prediction: tagged values, clamping, and failures") {
  auto p = parse_prediction("<reason>ok</reason><box>0.85</box>");
  REQUIRE(p.has_value());
  CHECK(p->value == doctest::Approx(0.85));
  CHECK(p->reason == "ok");
  CHECK_FALSE(p->clamped);

  auto zero = parse_prediction("<box>0.0</box>");
  REQUIRE(zero.has_value());
  CHECK(zero->value == 0.0);
  CHECK(zero->reason.empty());

  std::string error;
  CHECK_FALSE(parse_prediction("no tags here", &error).has_value());
  CHECK(error.find("box") != std::string::npos);
  CHECK_FALSE(parse_prediction("<box>almost</box>", &error).has_value());

  auto clamped = parse_prediction("<box>1.2</box>");
  REQUIRE(clamped.has_value());
  CHECK(clamped->value == 1.0);
  CHECK(clamped->clamped);

  auto last = parse_prediction("<box>0.2</box> revised: <box>0.6</box>");
  REQUIRE(last.has_value());
  CHECK(last->value == doctest::Approx(0.6));

  // untagged prose around the tags is ignored
  auto wordy = parse_prediction("I think 0.9.\n<reason>solid</reason>\n<box>0.25</box>\nbye");
  REQUIRE(wordy.has_value());
  CHECK(wordy->value == doctest::Approx(0.25));
}

TEST_CASE("parse_prediction composed with render is identity at 4 decimals") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    double value = std::round(rng.uniform() * 10000.0) / 10000.0;
    auto parsed = parse_prediction(render_prediction(value, "r"));
    REQUIRE(parsed.has_value());
    CHECK(parsed->value == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("parse_workflow_edit: well-formed, lenient, and error paths") {
  ParsedEdit edit;
  edit.delta = "add ScEnsemble after the generator";
  edit.operators = {{"AnswerGenerate", {}},
                    {"ScEnsemble", {}},
                    {"Custom", {{"instruction", "prompt_custom.TIDY"}}}};
  edit.prompts["TIDY"] = "Restate the final answer only.";
  edit.body = synthesize_body(edit.operators);

  std::string raw = render_workflow_edit(edit);
  auto parsed = parse_workflow_edit(raw);
  REQUIRE(parsed.has_value());
  CHECK(parsed->delta == edit.delta);
  CHECK(parsed->operators == edit.operators);
  CHECK(parsed->prompts == edit.prompts);
  CHECK_FALSE(parsed->delta_defaulted);

  WorkflowSpec draft;
  draft.id = "w002";
  draft.round = 2;
  draft.parent_id = "w001";
  draft.operators = parsed->operators;
  draft.prompts = parsed->prompts;
  draft.body = parsed->body;
  std::vector<std::string> known{"w001"};
  CHECK(validate_workflow(draft, OperatorCatalog::standard(), &known).ok());

  // missing modification: delta defaults and is flagged
  std::string no_mod =
      raw.substr(raw.find("</modification>") + std::string("</modification>").size());
  auto lenient = parse_workflow_edit(no_mod);
  REQUIRE(lenient.has_value());
  CHECK(lenient->delta == "unspecified edit");
  CHECK(lenient->delta_defaulted);

  // missing workflow section: hard error
  std::string error;
  CHECK_FALSE(parse_workflow_edit("<modification>x</modification>", &error).has_value());
  CHECK(error.find("workflow") != std::string::npos);

  // malformed operator line
  CHECK_FALSE(
      parse_workflow_edit("<operators>\nBad Line =\n</operators>\n<workflow>\nx\n</workflow>",
                          &error)
          .has_value());

  // quoted parameter values keep their spaces
  auto quoted = parse_workflow_edit(
      "<operators>\nCustom instruction=\"two words\"\n</operators>\n<workflow>\nbody\n</workflow>");
  REQUIRE(quoted.has_value());
  CHECK(quoted->operators[0].params.at("instruction") == "two words");
}

TEST_CASE("parse_workflow_edit round-trips random edits through the emitter") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    WorkflowSpec w = testsupport::random_workflow(rng);
    ParsedEdit edit;
    edit.delta = "edit " + std::to_string(i);
    edit.operators = w.operators;
    edit.prompts = w.prompts;
    edit.body = w.body;
    auto parsed = parse_workflow_edit(render_workflow_edit(edit));
    REQUIRE(parsed.has_value());
    CHECK(parsed->operators == edit.operators);
    CHECK(parsed->prompts == edit.prompts);
    CHECK(parsed->delta == edit.delta);
  }
}

TEST_CASE("self_predict: plumb-through, clamping, and retry exhaustion") {
  WorkflowSpec w = golden_workflow();
  PredictContext ctx = golden_context();

  testsupport::ScriptedLlmCaller fixed({"<reason>fine</reason><box>0.7</box>"});
  auto out = self_predict(w, ctx, fixed);
  CHECK(out.ok);
  CHECK(out.prediction.value == doctest::Approx(0.7));
  CHECK(out.tokens.total() > 0);
  CHECK(out.attempts == 1);

  testsupport::ScriptedLlmCaller overflow({"<box>1.2</box>"});
  auto clamped = self_predict(w, ctx, overflow);
  CHECK(clamped.ok);
  CHECK(clamped.prediction.value == 1.0);
  CHECK(clamped.prediction.clamped);

  testsupport::ScriptedLlmCaller prose({"thinking...", "still thinking", "no tags"});
  auto failed = self_predict(w, ctx, prose, TemplateRepo::default_eval(), 3);
  CHECK_FALSE(failed.ok);
  CHECK(failed.attempts == 3);
  CHECK(prose.calls() == 3);
  CHECK(failed.tokens.total() > 0);  // failed attempts still cost tokens
}

TEST_CASE("llm optimizer: edit parsing, validation, retries") {
  ParsedEdit edit;
  edit.delta = "append an ensemble";
  edit.operators = {{"Custom", {{"instruction", ""}}}, {"ScEnsemble", {}}};
  edit.body = synthesize_body(edit.operators);
  const std::string good = render_workflow_edit(edit);

  WorkflowSpec parent = make_initial_workflow("w001");

  SUBCASE("valid response on the second attempt") {
    testsupport::ScriptedLlmCaller caller({"garbage", good, good});
    LlmOptimizer optimizer(caller, OperatorCatalog::standard());
    auto proposal = optimizer.propose_edit(parent, {}, {}, 2);
    CHECK(proposal.ok);
    CHECK(proposal.attempts == 2);
    CHECK(proposal.draft.round == 2);
    CHECK(proposal.draft.parent_id == "w001");
    CHECK(proposal.draft.operators.size() == 2);
    CHECK(proposal.delta == "append an ensemble");
  }

  SUBCASE("malformed responses exhaust the retry budget") {
    testsupport::ScriptedLlmCaller caller({"nope", "nothing", "still nothing"});
    LlmOptimizer optimizer(caller, OperatorCatalog::standard());
    auto proposal = optimizer.propose_edit(parent, {}, {}, 2);
    CHECK_FALSE(proposal.ok);
    CHECK(proposal.attempts == 3);
    CHECK(caller.calls() == 3);
  }

  SUBCASE("responses with undefined prompt references are rejected") {
    ParsedEdit broken = edit;
    broken.operators[0].params["instruction"] = "prompt_custom.GHOST";
    broken.body = synthesize_body(broken.operators);
    testsupport::ScriptedLlmCaller caller({render_workflow_edit(broken)});
    LlmOptimizer optimizer(caller, OperatorCatalog::standard());
    auto proposal = optimizer.propose_edit(parent, {}, {}, 2);
    CHECK_FALSE(proposal.ok);
    CHECK(proposal.error.find("undefined prompt") != std::string::npos);
  }
}

TEST_CASE("sim optimizer: proposals validate and predictions carry the configured bias") {
  QuerySet qs = exec::make_synthetic_queryset(60, 3);
  exec::SimParams params;
  params.seed = 3;
  exec::SimWorkflowModel model(params);

  SimOptimizerParams opt_params;
  opt_params.prediction_bias = 0.2;
  opt_params.prediction_noise = 0.0;
  SimOptimizer optimizer(model, qs, OperatorCatalog::standard(), Rng(5), opt_params);

  WorkflowSpec parent = make_initial_workflow("w001");
  auto proposal = optimizer.propose_edit(parent, {}, {}, 2);
  REQUIRE(proposal.ok);
  CHECK(proposal.draft.round == 2);
  CHECK_FALSE(proposal.delta.empty());
  WorkflowSpec child = proposal.draft;
  child.id = "w002";
  std::vector<std::string> known{"w001"};
  CHECK(validate_workflow(child, OperatorCatalog::standard(), &known).ok());

  auto predicted = optimizer.predict(parent, golden_context());
  REQUIRE(predicted.ok);
  const double expected = std::min(1.0, model.true_mean_score(parent, qs) + 0.2);
  CHECK(predicted.prediction.value == doctest::Approx(expected).epsilon(5e-4));

  SimOptimizerParams failing;
  failing.fail_every = 1;
  SimOptimizer broken(model, qs, OperatorCatalog::standard(), Rng(5), failing);
  CHECK_FALSE(broken.propose_edit(parent, {}, {}, 2).ok);
}
