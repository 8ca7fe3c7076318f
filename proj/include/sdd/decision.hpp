#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdd/common.hpp"
#include "sdd/distribution.hpp"

namespace sdd {

/// Finite decision problem: states S, sample space Psi, actions D, a
/// non-negative loss matrix L[state][action] and a sampling matrix
/// Q[state][sample_point] whose rows are probability vectors.
struct DecisionProblem {
  std::vector<std::string> states;
  std::vector<std::string> sample_points;
  std::vector<std::string> actions;
  Matrix loss;      // [state][action]
  Matrix sampling;  // [state][sample_point]

  DecisionProblem(std::vector<std::string> states_in, std::vector<std::string> sample_points_in,
                  std::vector<std::string> actions_in, Matrix loss_in, Matrix sampling_in);

  std::size_t num_states() const { return states.size(); }
  std::size_t num_sample_points() const { return sample_points.size(); }
  std::size_t num_actions() const { return actions.size(); }

  /// Smallest loss achievable in the given state across actions.
  double min_loss(std::size_t state) const;
};

/// Row-stochastic map from sample points to action probabilities.  A
/// deterministic rule is the one-hot special case.
struct DecisionRule {
  Matrix allocation;  // [sample_point][action]

  explicit DecisionRule(Matrix allocation_in);

  static DecisionRule deterministic(const std::vector<std::size_t>& action_by_sample,
                                    std::size_t num_actions);

  std::size_t num_sample_points() const { return allocation.size(); }
  std::size_t num_actions() const { return allocation.empty() ? 0 : allocation.front().size(); }
};

/// Subjective probability vector over states.
struct Prior {
  std::vector<double> weights;

  explicit Prior(std::vector<double> weights_in);

  static Prior uniform(std::size_t num_states);
  static Prior degenerate(std::size_t state, std::size_t num_states);
};

/// State-dependent distribution of loss generated by a rule across samples:
/// mass sum_psi Q_s(psi) * delta(psi)(d) at each loss value L(s, d).
DiscreteDistribution loss_distribution(const DecisionProblem& problem, const DecisionRule& rule,
                                       std::size_t state);

/// State-dependent mean loss.
double risk(const DecisionProblem& problem, const DecisionRule& rule, std::size_t state);

/// Prior-weighted mixture of the per-state loss distributions.
DiscreteDistribution bayes_loss_distribution(const DecisionProblem& problem,
                                             const DecisionRule& rule, const Prior& prior);

/// Prior-weighted mean of risk across states.
double bayes_risk(const DecisionProblem& problem, const DecisionRule& rule, const Prior& prior);

}  // namespace sdd
