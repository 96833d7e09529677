#pragma once

#include <nlohmann/json.hpp>

#include "flowsearch/core/config.hpp"
#include "flowsearch/core/ledger.hpp"
#include "flowsearch/core/score.hpp"
#include "flowsearch/core/types.hpp"

namespace flowsearch {

using json = nlohmann::json;

void to_json(json& j, const QueryItem& q);
void from_json(const json& j, QueryItem& q);

void to_json(json& j, const QuerySet& qs);
void from_json(const json& j, QuerySet& qs);

void to_json(json& j, const OperatorCall& c);
void from_json(const json& j, OperatorCall& c);

void to_json(json& j, const WorkflowSpec& w);
void from_json(const json& j, WorkflowSpec& w);

void to_json(json& j, const TokenDelta& d);
void from_json(const json& j, TokenDelta& d);

void to_json(json& j, const ScoreRecord& r);
void from_json(const json& j, ScoreRecord& r);

void to_json(json& j, const LedgerSnapshot& s);
void from_json(const json& j, LedgerSnapshot& s);

void to_json(json& j, const SelectionConfig& c);
void from_json(const json& j, SelectionConfig& c);

void to_json(json& j, const SamplerConfig& c);
void from_json(const json& j, SamplerConfig& c);

void to_json(json& j, const CalibrationConfig& c);
void from_json(const json& j, CalibrationConfig& c);

void to_json(json& j, const RunConfig& c);
void from_json(const json& j, RunConfig& c);

}  // namespace flowsearch
