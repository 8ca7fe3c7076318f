#include "sdd/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdd {

std::string to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::MinimaxRisk: return "MinimaxRisk";
    case CriterionKind::MinimaxRegret: return "MinimaxRegret";
    case CriterionKind::BayesRisk: return "BayesRisk";
    case CriterionKind::QuantileMinimax: return "QuantileMinimax";
    case CriterionKind::QuantileMinimaxRegret: return "QuantileMinimaxRegret";
    case CriterionKind::HybridQuantileBayes: return "HybridQuantileBayes";
    case CriterionKind::BayesQuantile: return "BayesQuantile";
  }
  return "Unknown";
}

CriterionKind criterion_kind_from_string(const std::string& name) {
  for (CriterionKind k :
       {CriterionKind::MinimaxRisk, CriterionKind::MinimaxRegret, CriterionKind::BayesRisk,
        CriterionKind::QuantileMinimax, CriterionKind::QuantileMinimaxRegret,
        CriterionKind::HybridQuantileBayes, CriterionKind::BayesQuantile}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown criterion kind '" + name + "'");
}

bool requires_lambda(CriterionKind k) {
  switch (k) {
    case CriterionKind::QuantileMinimax:
    case CriterionKind::QuantileMinimaxRegret:
    case CriterionKind::HybridQuantileBayes:
    case CriterionKind::BayesQuantile:
      return true;
    default:
      return false;
  }
}

bool requires_prior(CriterionKind k) {
  switch (k) {
    case CriterionKind::BayesRisk:
    case CriterionKind::HybridQuantileBayes:
    case CriterionKind::BayesQuantile:
      return true;
    default:
      return false;
  }
}

void CriterionSpec::validate(std::size_t num_states) const {
  if (requires_lambda(kind)) {
    if (!lambda) throw std::invalid_argument(to_string(kind) + " requires lambda");
    if (!(*lambda > 0.0) || !(*lambda < 1.0))
      throw std::domain_error(to_string(kind) + ": lambda outside (0, 1)");
  }
  if (requires_prior(kind)) {
    if (!prior) throw std::invalid_argument(to_string(kind) + " requires a prior");
    if (prior->weights.size() != num_states)
      throw std::invalid_argument(to_string(kind) + ": prior has " +
                                  std::to_string(prior->weights.size()) + " entries for " +
                                  std::to_string(num_states) + " states");
  }
}

double evaluate_criterion(const DecisionProblem& problem, const DecisionRule& rule,
                          const CriterionSpec& spec) {
  spec.validate(problem.num_states());
  const std::size_t S = problem.num_states();
  switch (spec.kind) {
    case CriterionKind::MinimaxRisk: {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < S; ++s) worst = std::max(worst, risk(problem, rule, s));
      return worst;
    }
    case CriterionKind::MinimaxRegret: {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < S; ++s)
        worst = std::max(worst, risk(problem, rule, s) - problem.min_loss(s));
      return worst;
    }
    case CriterionKind::BayesRisk:
      return bayes_risk(problem, rule, *spec.prior);
    case CriterionKind::QuantileMinimax: {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < S; ++s)
        worst = std::max(worst, loss_distribution(problem, rule, s).quantile(*spec.lambda));
      return worst;
    }
    case CriterionKind::QuantileMinimaxRegret: {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < S; ++s) {
        const double v = loss_distribution(problem, rule, s).quantile(*spec.lambda);
        worst = std::max(worst, v - problem.min_loss(s));
      }
      return worst;
    }
    case CriterionKind::HybridQuantileBayes: {
      double acc = 0.0;
      for (std::size_t s = 0; s < S; ++s)
        acc += spec.prior->weights[s] *
               loss_distribution(problem, rule, s).quantile(*spec.lambda);
      return acc;
    }
    case CriterionKind::BayesQuantile:
      return bayes_loss_distribution(problem, rule, *spec.prior).quantile(*spec.lambda);
  }
  throw std::logic_error("evaluate_criterion: unhandled kind");
}

CriterionResult pick_optimum(std::vector<double> per_rule_values, bool minimize) {
  if (per_rule_values.empty()) throw std::invalid_argument("pick_optimum: empty value table");
  CriterionResult result;
  result.per_rule_values = std::move(per_rule_values);
  const auto& v = result.per_rule_values;
  result.value = minimize ? *std::min_element(v.begin(), v.end())
                          : *std::max_element(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i] - result.value) <= kTieTol) result.optimal_rules.push_back(i);
  }
  return result;
}

CriterionResult solve(const DecisionProblem& problem, const std::vector<DecisionRule>& rules,
                      const CriterionSpec& spec) {
  if (rules.empty()) throw std::invalid_argument("solve: empty rule list");
  spec.validate(problem.num_states());
  std::vector<double> values;
  values.reserve(rules.size());
  for (const DecisionRule& rule : rules) values.push_back(evaluate_criterion(problem, rule, spec));
  return pick_optimum(std::move(values), /*minimize=*/true);
}

}  // namespace sdd
