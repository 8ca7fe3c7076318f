#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdd/decision.hpp"

namespace sdd {

enum class CriterionKind {
  MinimaxRisk,
  MinimaxRegret,
  BayesRisk,
  QuantileMinimax,
  QuantileMinimaxRegret,
  HybridQuantileBayes,  // prior-weighted mean of per-state loss quantiles
  BayesQuantile,        // quantile of the Bayes loss distribution
};

std::string to_string(CriterionKind k);
CriterionKind criterion_kind_from_string(const std::string& name);

bool requires_lambda(CriterionKind k);
bool requires_prior(CriterionKind k);

struct CriterionSpec {
  CriterionKind kind = CriterionKind::MinimaxRisk;
  std::optional<double> lambda;  // required for the quantile kinds, in (0,1)
  std::optional<Prior> prior;    // required for the Bayes-flavored kinds

  void validate(std::size_t num_states) const;
};

struct CriterionResult {
  std::vector<std::size_t> optimal_rules;  // all optima within kTieTol
  double value = 0.0;
  std::vector<double> per_rule_values;
};

/// One rule's criterion value.  Lower is better for every kind; the library
/// always minimizes loss (welfare problems are negated at the CLI boundary).
double evaluate_criterion(const DecisionProblem& problem, const DecisionRule& rule,
                          const CriterionSpec& spec);

/// Evaluates all candidate rules and reports every minimizer within kTieTol.
CriterionResult solve(const DecisionProblem& problem, const std::vector<DecisionRule>& rules,
                      const CriterionSpec& spec);

/// Tie-aware argmin/argmax over a value table.
CriterionResult pick_optimum(std::vector<double> per_rule_values, bool minimize);

}  // namespace sdd
