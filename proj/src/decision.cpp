#include "sdd/decision.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdd {

namespace {

void check_state(const DecisionProblem& problem, std::size_t state) {
  if (state >= problem.num_states())
    throw std::out_of_range("state index " + std::to_string(state) + " out of range (" +
                            std::to_string(problem.num_states()) + " states)");
}

void check_rule(const DecisionProblem& problem, const DecisionRule& rule) {
  if (rule.num_sample_points() != problem.num_sample_points() ||
      rule.num_actions() != problem.num_actions())
    throw std::invalid_argument("rule allocation is " + std::to_string(rule.num_sample_points()) +
                                "x" + std::to_string(rule.num_actions()) + ", problem needs " +
                                std::to_string(problem.num_sample_points()) + "x" +
                                std::to_string(problem.num_actions()));
}

void check_prior(const DecisionProblem& problem, const Prior& prior) {
  if (prior.weights.size() != problem.num_states())
    throw std::invalid_argument("prior has " + std::to_string(prior.weights.size()) +
                                " entries, problem has " + std::to_string(problem.num_states()) +
                                " states");
}

}  // namespace

DecisionProblem::DecisionProblem(std::vector<std::string> states_in,
                                 std::vector<std::string> sample_points_in,
                                 std::vector<std::string> actions_in, Matrix loss_in,
                                 Matrix sampling_in)
    : states(std::move(states_in)),
      sample_points(std::move(sample_points_in)),
      actions(std::move(actions_in)),
      loss(std::move(loss_in)),
      sampling(std::move(sampling_in)) {
  if (states.empty()) throw std::invalid_argument("DecisionProblem: empty state set");
  if (sample_points.empty()) throw std::invalid_argument("DecisionProblem: empty sample space");
  if (actions.empty()) throw std::invalid_argument("DecisionProblem: empty action set");
  check_rectangular(loss, states.size(), actions.size(), "DecisionProblem loss");
  check_rectangular(sampling, states.size(), sample_points.size(), "DecisionProblem sampling");
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (double v : loss[s]) {
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("DecisionProblem: loss in state '" + states[s] +
                                    "' is negative or not finite");
    }
    check_probability_vector(sampling[s], "DecisionProblem sampling row " + std::to_string(s));
  }
}

double DecisionProblem::min_loss(std::size_t state) const {
  double m = loss[state][0];
  for (double v : loss[state]) m = std::min(m, v);
  return m;
}

DecisionRule::DecisionRule(Matrix allocation_in) : allocation(std::move(allocation_in)) {
  if (allocation.empty()) throw std::invalid_argument("DecisionRule: empty allocation");
  const std::size_t cols = allocation.front().size();
  check_rectangular(allocation, allocation.size(), cols, "DecisionRule allocation");
  for (std::size_t r = 0; r < allocation.size(); ++r) {
    check_probability_vector(allocation[r], "DecisionRule row " + std::to_string(r));
    for (double v : allocation[r]) {
      if (v > 1.0 + kWeightTol)
        throw std::invalid_argument("DecisionRule: allocation entry above 1");
    }
  }
}

DecisionRule DecisionRule::deterministic(const std::vector<std::size_t>& action_by_sample,
                                         std::size_t num_actions) {
  Matrix alloc(action_by_sample.size(), std::vector<double>(num_actions, 0.0));
  for (std::size_t psi = 0; psi < action_by_sample.size(); ++psi) {
    if (action_by_sample[psi] >= num_actions)
      throw std::out_of_range("DecisionRule::deterministic: action index out of range");
    alloc[psi][action_by_sample[psi]] = 1.0;
  }
  return DecisionRule(std::move(alloc));
}

Prior::Prior(std::vector<double> weights_in) : weights(std::move(weights_in)) {
  check_probability_vector(weights, "Prior");
}

Prior Prior::uniform(std::size_t num_states) {
  if (num_states == 0) throw std::invalid_argument("Prior::uniform: no states");
  return Prior(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)));
}

Prior Prior::degenerate(std::size_t state, std::size_t num_states) {
  if (state >= num_states) throw std::out_of_range("Prior::degenerate: state out of range");
  std::vector<double> w(num_states, 0.0);
  w[state] = 1.0;
  return Prior(std::move(w));
}

DiscreteDistribution loss_distribution(const DecisionProblem& problem, const DecisionRule& rule,
                                       std::size_t state) {
  check_state(problem, state);
  check_rule(problem, rule);
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(problem.num_sample_points() * problem.num_actions());
  for (std::size_t psi = 0; psi < problem.num_sample_points(); ++psi) {
    const double q = problem.sampling[state][psi];
    if (q == 0.0) continue;
    for (std::size_t d = 0; d < problem.num_actions(); ++d) {
      const double w = q * rule.allocation[psi][d];
      if (w > 0.0) atoms.push_back({problem.loss[state][d], w});
    }
  }
  if (atoms.empty()) {
    // All sampling mass sits on rows with zero allocation weight; cannot
    // happen for valid inputs, but guard against a degenerate construction.
    throw std::invalid_argument("loss_distribution: no probability mass");
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

double risk(const DecisionProblem& problem, const DecisionRule& rule, std::size_t state) {
  check_state(problem, state);
  check_rule(problem, rule);
  double r = 0.0;
  for (std::size_t psi = 0; psi < problem.num_sample_points(); ++psi) {
    const double q = problem.sampling[state][psi];
    if (q == 0.0) continue;
    double inner = 0.0;
    for (std::size_t d = 0; d < problem.num_actions(); ++d)
      inner += rule.allocation[psi][d] * problem.loss[state][d];
    r += q * inner;
  }
  return r;
}

DiscreteDistribution bayes_loss_distribution(const DecisionProblem& problem,
                                             const DecisionRule& rule, const Prior& prior) {
  check_prior(problem, prior);
  std::vector<DiscreteDistribution> parts;
  parts.reserve(problem.num_states());
  for (std::size_t s = 0; s < problem.num_states(); ++s)
    parts.push_back(loss_distribution(problem, rule, s));
  std::vector<std::pair<double, const DiscreteDistribution*>> components;
  components.reserve(parts.size());
  for (std::size_t s = 0; s < parts.size(); ++s)
    components.emplace_back(prior.weights[s], &parts[s]);
  return DiscreteDistribution::mixture(components);
}

double bayes_risk(const DecisionProblem& problem, const DecisionRule& rule, const Prior& prior) {
  check_prior(problem, prior);
  double r = 0.0;
  for (std::size_t s = 0; s < problem.num_states(); ++s)
    r += prior.weights[s] * risk(problem, rule, s);
  return r;
}

}  // namespace sdd
