#include "flowsearch/core/ledger.hpp"

#include <numeric>
#include <stdexcept>

namespace flowsearch {

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kExec: return "exec";
    case ScoreKind::kPred: return "pred";
    case ScoreKind::kFew: return "few";
    case ScoreKind::kCalibrated: return "calibrated";
  }
  throw std::logic_error("bad ScoreKind");
}

ScoreKind score_kind_from_string(const std::string& s) {
  if (s == "exec") return ScoreKind::kExec;
  if (s == "pred") return ScoreKind::kPred;
  if (s == "few") return ScoreKind::kFew;
  if (s == "calibrated") return ScoreKind::kCalibrated;
  throw std::invalid_argument("unknown score kind: " + s);
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kOptimize: return "optimize";
    case Phase::kPredict: return "predict";
    case Phase::kExecuteFull: return "execute_full";
    case Phase::kExecuteFew: return "execute_few";
  }
  throw std::logic_error("bad Phase");
}

Phase phase_from_string(const std::string& s) {
  if (s == "optimize") return Phase::kOptimize;
  if (s == "predict") return Phase::kPredict;
  if (s == "execute_full") return Phase::kExecuteFull;
  if (s == "execute_few") return Phase::kExecuteFew;
  throw std::invalid_argument("unknown phase: " + s);
}

void TokenLedger::add(Phase phase, std::int64_t prompt_tokens, std::int64_t completion_tokens) {
  if (prompt_tokens < 0 || completion_tokens < 0)
    throw std::invalid_argument("negative token count");
  counters_[static_cast<std::size_t>(phase)] += prompt_tokens + completion_tokens;
}

std::int64_t TokenLedger::phase_total(Phase phase) const {
  return counters_[static_cast<std::size_t>(phase)];
}

std::int64_t TokenLedger::total() const {
  return std::accumulate(counters_.begin(), counters_.end(), std::int64_t{0});
}

LedgerSnapshot TokenLedger::current(int round) const {
  LedgerSnapshot snap;
  snap.round = round;
  snap.optimize = phase_total(Phase::kOptimize);
  snap.predict = phase_total(Phase::kPredict);
  snap.execute_full = phase_total(Phase::kExecuteFull);
  snap.execute_few = phase_total(Phase::kExecuteFew);
  snap.total = total();
  return snap;
}

void TokenLedger::take_snapshot(int round) { snapshots_.push_back(current(round)); }

}  // namespace flowsearch
