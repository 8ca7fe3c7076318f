#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sdd/criteria.hpp"
#include "sdd/decision.hpp"
#include "sdd/dominance.hpp"
#include "sdd/monotone.hpp"
#include "sdd/treatment.hpp"

namespace sdd {

using json = nlohmann::json;

// Parsers throw std::invalid_argument with the offending context and field in
// the message.  `ctx` is typically the input file name.

DecisionProblem problem_from_json(const json& j, const std::string& ctx);
json to_json(const DecisionProblem& problem);

/// Accepts a single rule (2-D array [sample_point][action]) or an array of
/// such rules.
std::vector<DecisionRule> rules_from_json(const json& j, const std::string& ctx);
json to_json(const DecisionRule& rule);

Prior prior_from_json(const json& j, const std::string& ctx);

CriterionSpec criterion_spec_from_json(const json& j, const std::string& ctx);
json to_json(const CriterionResult& result);

json to_json(const DominanceVerdict& verdict);
json to_json(const AdmissibilityReport& report);

TreatmentProblem treatment_from_json(const json& j, const std::string& ctx);
json to_json(const TreatmentProblem& tp);

std::vector<TestRule> test_rules_from_json(const json& j, const std::string& ctx);
json to_json(const TestRule& rule);

GridFamily family_from_json(const json& j, const std::string& ctx);
DosePayoff payoff_from_json(const json& j, const std::string& ctx);
RandomizedDoseRule dose_rule_from_json(const json& j, std::size_t grid_points,
                                       const std::string& ctx);

json to_json(const MlrStateReport& report);
json to_json(const RearrangementReport& report);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace sdd
