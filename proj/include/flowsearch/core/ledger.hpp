#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flowsearch/core/score.hpp"

namespace flowsearch {

/// Which stage of the loop spent the tokens.
enum class Phase { kOptimize, kPredict, kExecuteFull, kExecuteFew };

inline constexpr std::array<Phase, 4> kAllPhases = {Phase::kOptimize, Phase::kPredict,
                                                    Phase::kExecuteFull, Phase::kExecuteFew};

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& s);

struct LedgerSnapshot {
  int round = 0;
  std::int64_t optimize = 0;
  std::int64_t predict = 0;
  std::int64_t execute_full = 0;
  std::int64_t execute_few = 0;
  std::int64_t total = 0;
  friend bool operator==(const LedgerSnapshot&, const LedgerSnapshot&) = default;
};

/// Cumulative token counts partitioned by phase. Counters only grow; mutation
/// is confined to a single owner, concurrent contributors hand in TokenDelta
/// values that the owner folds in.
class TokenLedger {
 public:
  /// Throws std::invalid_argument on negative counts.
  void add(Phase phase, std::int64_t prompt_tokens, std::int64_t completion_tokens);
  void add(Phase phase, const TokenDelta& delta) { add(phase, delta.prompt, delta.completion); }

  std::int64_t phase_total(Phase phase) const;
  std::int64_t total() const;

  void take_snapshot(int round);
  const std::vector<LedgerSnapshot>& snapshots() const { return snapshots_; }
  LedgerSnapshot current(int round) const;

  friend bool operator==(const TokenLedger&, const TokenLedger&) = default;

 private:
  std::array<std::int64_t, 4> counters_{0, 0, 0, 0};
  std::vector<LedgerSnapshot> snapshots_;
};

}  // namespace flowsearch
