#pragma once

#include <random>
#include <vector>

#include "sdd/decision.hpp"
#include "sdd/distribution.hpp"
#include "sdd/treatment.hpp"

namespace sdd::testing {

inline std::vector<double> random_probability_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = unif(rng);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

inline DiscreteDistribution random_distribution(std::mt19937& rng, std::size_t max_support = 20) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_support);
  std::uniform_real_distribution<double> value_dist(0.0, 10.0);
  const std::size_t n = size_dist(rng);
  std::vector<DiscreteDistribution::Atom> atoms(n);
  const std::vector<double> w = random_probability_vector(rng, n);
  for (std::size_t i = 0; i < n; ++i) atoms[i] = {value_dist(rng), w[i]};
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

inline DecisionProblem random_problem(std::mt19937& rng, std::size_t max_states = 4,
                                      std::size_t max_samples = 5, std::size_t max_actions = 4) {
  std::uniform_int_distribution<std::size_t> s_dist(1, max_states);
  std::uniform_int_distribution<std::size_t> m_dist(1, max_samples);
  std::uniform_int_distribution<std::size_t> a_dist(1, max_actions);
  std::uniform_real_distribution<double> loss_dist(0.0, 10.0);
  const std::size_t S = s_dist(rng);
  const std::size_t M = m_dist(rng);
  const std::size_t A = a_dist(rng);
  std::vector<std::string> states, samples, actions;
  for (std::size_t i = 0; i < S; ++i) states.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < M; ++i) samples.push_back("psi" + std::to_string(i));
  for (std::size_t i = 0; i < A; ++i) actions.push_back("d" + std::to_string(i));
  Matrix loss(S, std::vector<double>(A));
  Matrix sampling(S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) loss[s][a] = loss_dist(rng);
    sampling[s] = random_probability_vector(rng, M);
  }
  return DecisionProblem(std::move(states), std::move(samples), std::move(actions),
                         std::move(loss), std::move(sampling));
}

inline DecisionRule random_rule(std::mt19937& rng, std::size_t samples, std::size_t actions) {
  Matrix alloc(samples);
  for (std::size_t psi = 0; psi < samples; ++psi)
    alloc[psi] = random_probability_vector(rng, actions);
  return DecisionRule(std::move(alloc));
}

/// Two-state two-treatment problem with one state favoring each treatment and
/// a full-support random sampling matrix.
inline TreatmentProblem random_treatment_problem(std::mt19937& rng, std::size_t max_samples = 10) {
  std::uniform_int_distribution<std::size_t> m_dist(2, max_samples);
  std::uniform_real_distribution<double> welfare(0.0, 5.0);
  const std::size_t M = m_dist(rng);
  const double gap0 = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
  const double gap1 = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
  const double base0 = welfare(rng);
  const double base1 = welfare(rng);
  std::vector<TreatmentState> states = {{"s0", base0 + gap0, base0}, {"s1", base1, base1 + gap1}};
  Matrix sampling = {random_probability_vector(rng, M), random_probability_vector(rng, M)};
  return TreatmentProblem(std::move(states), std::move(sampling));
}

}  // namespace sdd::testing
