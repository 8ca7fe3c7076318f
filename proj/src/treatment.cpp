#include "sdd/treatment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdd/math.hpp"

namespace sdd {

namespace {

void check_state_index(const TreatmentProblem& tp, std::size_t state) {
  if (state >= tp.num_states())
    throw std::out_of_range("state index " + std::to_string(state) + " out of range (" +
                            std::to_string(tp.num_states()) + " states)");
}

void check_test_rule(const TreatmentProblem& tp, const TestRule& rule) {
  for (std::size_t psi : rule.accept_b) {
    if (psi >= tp.num_sample_points())
      throw std::out_of_range("test rule refers to sample point " + std::to_string(psi) +
                              ", sample space has " + std::to_string(tp.num_sample_points()));
  }
}

void check_metric(const Matrix& metric, std::size_t n) {
  check_rectangular(metric, n, n, "TreatmentProblem metric");
  for (std::size_t i = 0; i < n; ++i) {
    if (metric[i][i] != 0.0)
      throw std::invalid_argument("TreatmentProblem metric: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(metric[i][j] >= 0.0) || !std::isfinite(metric[i][j]))
        throw std::invalid_argument("TreatmentProblem metric: negative or non-finite entry");
      if (std::fabs(metric[i][j] - metric[j][i]) > kWeightTol)
        throw std::invalid_argument("TreatmentProblem metric: not symmetric");
      for (std::size_t k = 0; k < n; ++k) {
        if (metric[i][j] > metric[i][k] + metric[k][j] + kWeightTol)
          throw std::invalid_argument("TreatmentProblem metric: triangle inequality fails at (" +
                                      std::to_string(i) + "," + std::to_string(j) + "," +
                                      std::to_string(k) + ")");
      }
    }
  }
}

double quantile_welfare_from_error(double alpha, double beta, double rho, double lambda) {
  return rho >= lambda ? std::min(alpha, beta) : std::max(alpha, beta);
}

}  // namespace

TreatmentProblem::TreatmentProblem(std::vector<TreatmentState> states, Matrix sampling,
                                   std::vector<std::string> sample_points,
                                   std::optional<Matrix> metric)
    : states_(std::move(states)),
      sample_points_(std::move(sample_points)),
      sampling_(std::move(sampling)),
      metric_(std::move(metric)) {
  if (states_.empty()) throw std::invalid_argument("TreatmentProblem: empty state set");
  if (sampling_.empty() || sampling_.front().empty())
    throw std::invalid_argument("TreatmentProblem: empty sampling matrix");
  const std::size_t m = sampling_.front().size();
  if (sample_points_.empty()) {
    sample_points_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) sample_points_.push_back("psi" + std::to_string(i));
  }
  check_rectangular(sampling_, states_.size(), sample_points_.size(),
                    "TreatmentProblem sampling");
  bool has_a_better = false;
  bool has_b_better = false;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (!std::isfinite(states_[s].alpha) || !std::isfinite(states_[s].beta))
      throw std::invalid_argument("TreatmentProblem: non-finite welfare in state '" +
                                  states_[s].label + "'");
    has_a_better |= states_[s].alpha > states_[s].beta;
    has_b_better |= states_[s].alpha < states_[s].beta;
    check_probability_vector(sampling_[s], "TreatmentProblem sampling row " + std::to_string(s));
  }
  if (!has_a_better || !has_b_better)
    throw std::invalid_argument(
        "TreatmentProblem: need at least one state favoring each treatment");
  if (metric_) check_metric(*metric_, states_.size());
}

TreatmentProblem TreatmentProblem::binomial(std::vector<TreatmentState> states, int n,
                                            const std::vector<double>& p_by_state,
                                            std::optional<Matrix> metric) {
  if (p_by_state.size() != states.size())
    throw std::invalid_argument("TreatmentProblem::binomial: p_by_state size mismatch");
  Matrix sampling;
  sampling.reserve(states.size());
  for (double p : p_by_state) sampling.push_back(binomial_pmf(n, p));
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) labels.push_back(std::to_string(k));
  return TreatmentProblem(std::move(states), std::move(sampling), std::move(labels),
                          std::move(metric));
}

TestRule TestRule::from_mask(std::uint32_t mask, std::size_t num_sample_points) {
  if (num_sample_points > 32)
    throw std::invalid_argument("TestRule::from_mask: more than 32 sample points");
  TestRule rule;
  for (std::size_t psi = 0; psi < num_sample_points; ++psi) {
    if (mask & (std::uint32_t{1} << psi)) rule.accept_b.push_back(psi);
  }
  return rule;
}

std::uint32_t TestRule::to_mask(std::size_t num_sample_points) const {
  if (num_sample_points > 32)
    throw std::invalid_argument("TestRule::to_mask: more than 32 sample points");
  std::uint32_t mask = 0;
  for (std::size_t psi : accept_b) {
    if (psi >= num_sample_points) throw std::out_of_range("TestRule::to_mask: index out of range");
    mask |= std::uint32_t{1} << psi;
  }
  return mask;
}

bool TestRule::is_data_invariant(std::size_t num_sample_points) const {
  return accept_b.empty() || accept_b.size() == num_sample_points;
}

FractionalRule::FractionalRule(std::vector<double> fraction_b_in)
    : fraction_b(std::move(fraction_b_in)) {
  if (fraction_b.empty()) throw std::invalid_argument("FractionalRule: empty");
  for (double f : fraction_b) {
    if (!(f >= 0.0 && f <= 1.0))
      throw std::invalid_argument("FractionalRule: fraction outside [0, 1]");
  }
}

FractionalRule FractionalRule::from_test_rule(const TestRule& rule,
                                              std::size_t num_sample_points) {
  std::vector<double> f(num_sample_points, 0.0);
  for (std::size_t psi : rule.accept_b) {
    if (psi >= num_sample_points)
      throw std::out_of_range("FractionalRule::from_test_rule: index out of range");
    f[psi] = 1.0;
  }
  return FractionalRule(std::move(f));
}

double error_probability(const TreatmentProblem& tp, const TestRule& rule, std::size_t state) {
  check_state_index(tp, state);
  check_test_rule(tp, rule);
  const TreatmentState& st = tp.states()[state];
  if (st.alpha == st.beta) return 0.0;
  // Error region: accept_b when a is better, its complement when b is better.
  std::vector<bool> in_b(tp.num_sample_points(), false);
  for (std::size_t psi : rule.accept_b) in_b[psi] = true;
  const bool error_on_b = st.alpha > st.beta;
  double rho = 0.0;
  for (std::size_t psi = 0; psi < tp.num_sample_points(); ++psi) {
    if (in_b[psi] == error_on_b) rho += tp.sampling()[state][psi];
  }
  return rho;
}

double expected_welfare(const TreatmentProblem& tp, const FractionalRule& rule,
                        std::size_t state) {
  check_state_index(tp, state);
  if (rule.fraction_b.size() != tp.num_sample_points())
    throw std::invalid_argument("expected_welfare: rule covers " +
                                std::to_string(rule.fraction_b.size()) + " sample points, need " +
                                std::to_string(tp.num_sample_points()));
  double mean_fraction = 0.0;
  for (std::size_t psi = 0; psi < tp.num_sample_points(); ++psi)
    mean_fraction += tp.sampling()[state][psi] * rule.fraction_b[psi];
  const TreatmentState& st = tp.states()[state];
  return st.alpha * (1.0 - mean_fraction) + st.beta * mean_fraction;
}

double expected_welfare(const TreatmentProblem& tp, const TestRule& rule, std::size_t state) {
  return expected_welfare(tp, FractionalRule::from_test_rule(rule, tp.num_sample_points()), state);
}

double quantile_welfare(const TreatmentProblem& tp, const TestRule& rule, std::size_t state,
                        double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::domain_error("quantile_welfare: lambda outside (0, 1)");
  const double rho = error_probability(tp, rule, state);
  const TreatmentState& st = tp.states()[state];
  return quantile_welfare_from_error(st.alpha, st.beta, rho, lambda);
}

TestRule lr_rule(const TreatmentProblem& tp, double eta) {
  if (tp.num_states() != 2)
    throw std::invalid_argument("lr_rule: needs exactly two states, got " +
                                std::to_string(tp.num_states()));
  if (!(eta >= 0.0)) throw std::domain_error("lr_rule: eta must be non-negative");
  const TreatmentState& s0 = tp.states()[0];
  const TreatmentState& s1 = tp.states()[1];
  if (!(s0.alpha > s0.beta) || !(s1.alpha < s1.beta))
    throw std::invalid_argument(
        "lr_rule: state 0 must favor treatment a and state 1 treatment b");
  bool distinct = false;
  for (std::size_t psi = 0; psi < tp.num_sample_points(); ++psi)
    distinct |= tp.sampling()[0][psi] != tp.sampling()[1][psi];
  if (!distinct) throw std::invalid_argument("lr_rule: the two sampling distributions coincide");
  TestRule rule;
  for (std::size_t psi = 0; psi < tp.num_sample_points(); ++psi) {
    if (tp.sampling()[1][psi] > eta * tp.sampling()[0][psi]) rule.accept_b.push_back(psi);
  }
  return rule;
}

std::vector<TestRule> all_test_rules(std::size_t num_sample_points) {
  if (num_sample_points > kEnumerationLimit)
    throw capacity_error("all_test_rules: " + std::to_string(num_sample_points) +
                         " sample points exceed the enumeration bound of " +
                         std::to_string(kEnumerationLimit) + " (2^" +
                         std::to_string(num_sample_points) + " rules)");
  const std::uint64_t count = std::uint64_t{1} << num_sample_points;
  std::vector<TestRule> rules;
  rules.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask)
    rules.push_back(TestRule::from_mask(static_cast<std::uint32_t>(mask), num_sample_points));
  return rules;
}

AdmissibilityReport test_rule_admissibility(const TreatmentProblem& tp,
                                            const std::vector<TestRule>& rules) {
  if (rules.empty()) throw std::invalid_argument("test_rule_admissibility: empty rule list");
  std::vector<std::vector<double>> rho(rules.size(), std::vector<double>(tp.num_states(), 0.0));
  for (std::size_t r = 0; r < rules.size(); ++r)
    for (std::size_t s = 0; s < tp.num_states(); ++s)
      rho[r][s] = error_probability(tp, rules[r], s);
  return vector_admissible_set(rho);
}

DecisionProblem induced_binary_loss_problem(const TreatmentProblem& tp) {
  std::vector<std::string> state_labels;
  state_labels.reserve(tp.num_states());
  Matrix loss;
  loss.reserve(tp.num_states());
  for (const TreatmentState& st : tp.states()) {
    state_labels.push_back(st.label);
    const double top = std::max(st.alpha, st.beta);
    loss.push_back({top - st.alpha, top - st.beta});
  }
  return DecisionProblem(std::move(state_labels), tp.sample_points(), {"a", "b"},
                         std::move(loss), tp.sampling());
}

DecisionRule to_decision_rule(const TestRule& rule, std::size_t num_sample_points) {
  std::vector<std::size_t> choice(num_sample_points, 0);
  for (std::size_t psi : rule.accept_b) {
    if (psi >= num_sample_points)
      throw std::out_of_range("to_decision_rule: index out of range");
    choice[psi] = 1;
  }
  return DecisionRule::deterministic(choice, 2);
}

namespace {

double welfare_value(const TreatmentProblem& tp, const TestRule& rule, std::size_t state,
                     WelfareMode mode, const std::optional<double>& lambda) {
  if (mode == WelfareMode::Mean) return expected_welfare(tp, rule, state);
  return quantile_welfare(tp, rule, state, *lambda);
}

void check_mode(WelfareMode mode, const std::optional<double>& lambda) {
  if (mode == WelfareMode::Quantile) {
    if (!lambda) throw std::invalid_argument("quantile mode requires lambda");
    if (!(*lambda > 0.0) || !(*lambda < 1.0))
      throw std::domain_error("quantile mode: lambda outside (0, 1)");
  }
}

}  // namespace

CriterionResult maximin(const TreatmentProblem& tp, const std::vector<TestRule>& rules,
                        WelfareMode mode, std::optional<double> lambda) {
  if (rules.empty()) throw std::invalid_argument("maximin: empty rule list");
  check_mode(mode, lambda);
  std::vector<double> values;
  values.reserve(rules.size());
  for (const TestRule& rule : rules) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < tp.num_states(); ++s)
      worst = std::min(worst, welfare_value(tp, rule, s, mode, lambda));
    values.push_back(worst);
  }
  return pick_optimum(std::move(values), /*minimize=*/false);
}

CriterionResult minimax_regret(const TreatmentProblem& tp, const std::vector<TestRule>& rules,
                               WelfareMode mode, std::optional<double> lambda) {
  if (rules.empty()) throw std::invalid_argument("minimax_regret: empty rule list");
  check_mode(mode, lambda);
  std::vector<double> values;
  values.reserve(rules.size());
  for (const TestRule& rule : rules) {
    double worst = 0.0;
    for (std::size_t s = 0; s < tp.num_states(); ++s) {
      const TreatmentState& st = tp.states()[s];
      const double gap = std::fabs(st.beta - st.alpha);
      if (gap == 0.0) continue;
      const double rho = error_probability(tp, rule, s);
      const double regret =
          mode == WelfareMode::Mean ? gap * rho : (rho >= *lambda ? gap : 0.0);
      worst = std::max(worst, regret);
    }
    values.push_back(worst);
  }
  return pick_optimum(std::move(values), /*minimize=*/true);
}

StatePartition default_partition(const TreatmentProblem& tp) {
  StatePartition partition;
  partition.in_b.reserve(tp.num_states());
  for (const TreatmentState& st : tp.states()) partition.in_b.push_back(st.alpha < st.beta);
  return partition;
}

double min_cross_distance(const TreatmentProblem& tp, const StatePartition& partition) {
  if (!tp.metric()) throw std::invalid_argument("min_cross_distance: problem has no metric");
  if (partition.in_b.size() != tp.num_states())
    throw std::invalid_argument("min_cross_distance: partition size mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tp.num_states(); ++i) {
    if (partition.in_b[i]) continue;
    for (std::size_t j = 0; j < tp.num_states(); ++j) {
      if (!partition.in_b[j]) continue;
      best = std::min(best, (*tp.metric())[i][j]);
    }
  }
  if (!std::isfinite(best))
    throw std::invalid_argument("min_cross_distance: partition has an empty side");
  return best;
}

TestRule min_distance_rule(const TreatmentProblem& tp, const StatePartition& partition,
                           const Matrix& estimator_distances) {
  if (!tp.metric()) throw std::invalid_argument("min_distance_rule: problem has no metric");
  if (partition.in_b.size() != tp.num_states())
    throw std::invalid_argument("min_distance_rule: partition size mismatch");
  bool any_a = false;
  bool any_b = false;
  for (bool b : partition.in_b) (b ? any_b : any_a) = true;
  if (!any_a || !any_b)
    throw std::invalid_argument("min_distance_rule: partition has an empty side");
  check_rectangular(estimator_distances, tp.num_sample_points(), tp.num_states(),
                    "min_distance_rule estimator distances");
  TestRule rule;
  for (std::size_t psi = 0; psi < tp.num_sample_points(); ++psi) {
    double da = std::numeric_limits<double>::infinity();
    double db = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < tp.num_states(); ++s) {
      const double d = estimator_distances[psi][s];
      if (!(d >= 0.0) || !std::isfinite(d))
        throw std::invalid_argument("min_distance_rule: invalid distance at sample point " +
                                    std::to_string(psi));
      double& side = partition.in_b[s] ? db : da;
      side = std::min(side, d);
    }
    if (db < da) rule.accept_b.push_back(psi);  // ties resolve to treatment a
  }
  return rule;
}

Matrix absolute_distances(const std::vector<double>& estimates,
                          const std::vector<double>& state_positions) {
  Matrix d(estimates.size(), std::vector<double>(state_positions.size(), 0.0));
  for (std::size_t i = 0; i < estimates.size(); ++i)
    for (std::size_t s = 0; s < state_positions.size(); ++s)
      d[i][s] = std::fabs(estimates[i] - state_positions[s]);
  return d;
}

namespace {

// Max-state quantile regret of one mask, summed cleanly per state.
double exact_quantile_regret(const TreatmentProblem& tp, std::uint32_t mask, double lambda) {
  const std::size_t m = tp.num_sample_points();
  double worst = 0.0;
  for (std::size_t s = 0; s < tp.num_states(); ++s) {
    const TreatmentState& st = tp.states()[s];
    if (st.alpha == st.beta) continue;
    double qb = 0.0;
    for (std::size_t psi = 0; psi < m; ++psi) {
      if (mask & (std::uint32_t{1} << psi)) qb += tp.sampling()[s][psi];
    }
    const double rho = st.alpha > st.beta ? qb : 1.0 - qb;
    if (rho >= lambda) worst = std::max(worst, std::fabs(st.beta - st.alpha));
  }
  return worst;
}

}  // namespace

ScanResult quantile_regret_scan(const TreatmentProblem& tp, double lambda) {
  const std::size_t m = tp.num_sample_points();
  if (m > kEnumerationLimit)
    throw capacity_error("quantile_regret_scan: " + std::to_string(m) +
                         " sample points exceed the enumeration bound of " +
                         std::to_string(kEnumerationLimit) + " (2^" + std::to_string(m) +
                         " rules)");
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::domain_error("quantile_regret_scan: lambda outside (0, 1)");

  const std::size_t S = tp.num_states();
  std::vector<double> gap(S);
  std::vector<int> sign(S);  // +1: a better (rho = qb); -1: b better; 0: tie
  for (std::size_t s = 0; s < S; ++s) {
    gap[s] = std::fabs(tp.states()[s].beta - tp.states()[s].alpha);
    sign[s] = tp.states()[s].alpha > tp.states()[s].beta
                  ? 1
                  : (tp.states()[s].alpha < tp.states()[s].beta ? -1 : 0);
  }

  const std::uint64_t count = std::uint64_t{1} << m;
  // Gray-code walk keeps the accept-b mass per state incrementally updated;
  // float drift over the walk is bounded well below kScanSlack.
  constexpr double kScanSlack = 1e-9;
  std::vector<double> qb(S, 0.0);
  auto gray_regret = [&](std::uint64_t step) {
    if (step > 0) {
      const unsigned bit = std::countr_zero(step);
      const std::uint64_t gray = step ^ (step >> 1);
      const bool added = (gray >> bit) & 1u;
      for (std::size_t s = 0; s < S; ++s) {
        const double q = tp.sampling()[s][bit];
        qb[s] += added ? q : -q;
      }
    }
    double worst = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (sign[s] == 0) continue;
      const double rho = sign[s] > 0 ? qb[s] : 1.0 - qb[s];
      if (rho >= lambda) worst = std::max(worst, gap[s]);
    }
    return worst;
  };

  double approx_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t step = 0; step < count; ++step)
    approx_min = std::min(approx_min, gray_regret(step));

  // Second pass: collect candidates near the approximate minimum, then settle
  // the exact values without incremental drift.
  std::fill(qb.begin(), qb.end(), 0.0);
  std::vector<std::uint32_t> candidates;
  for (std::uint64_t step = 0; step < count; ++step) {
    if (gray_regret(step) <= approx_min + kScanSlack)
      candidates.push_back(static_cast<std::uint32_t>(step ^ (step >> 1)));
  }

  ScanResult result;
  result.rules_scanned = count;
  double exact_min = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::uint32_t, double>> exact;
  exact.reserve(candidates.size());
  for (std::uint32_t mask : candidates) {
    const double regret = exact_quantile_regret(tp, mask, lambda);
    exact.emplace_back(mask, regret);
    exact_min = std::min(exact_min, regret);
  }
  result.min_max_regret = exact_min;
  for (const auto& [mask, regret] : exact) {
    if (regret <= exact_min + kTieTol) result.attaining_masks.push_back(mask);
  }
  std::sort(result.attaining_masks.begin(), result.attaining_masks.end());
  return result;
}

}  // namespace sdd
