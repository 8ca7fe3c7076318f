#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdd/common.hpp"
#include "sdd/criteria.hpp"
#include "sdd/decision.hpp"
#include "sdd/dominance.hpp"

namespace sdd {

/// One state of a two-treatment problem: mean welfare alpha under treatment a
/// and beta under treatment b.
struct TreatmentState {
  std::string label;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Two-treatment choice problem.  Requires at least one state with
/// alpha > beta and one with alpha < beta.  The optional metric is a
/// state-by-state distance matrix used by minimum-distance rules.
class TreatmentProblem {
 public:
  TreatmentProblem(std::vector<TreatmentState> states, Matrix sampling,
                   std::vector<std::string> sample_points = {},
                   std::optional<Matrix> metric = std::nullopt);

  /// Expands Binomial(n, p_s) sampling into an explicit matrix over counts
  /// {0, ..., n}; sample points are labeled by count.
  static TreatmentProblem binomial(std::vector<TreatmentState> states, int n,
                                   const std::vector<double>& p_by_state,
                                   std::optional<Matrix> metric = std::nullopt);

  const std::vector<TreatmentState>& states() const { return states_; }
  const std::vector<std::string>& sample_points() const { return sample_points_; }
  const Matrix& sampling() const { return sampling_; }
  const std::optional<Matrix>& metric() const { return metric_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_sample_points() const { return sample_points_.size(); }

 private:
  std::vector<TreatmentState> states_;
  std::vector<std::string> sample_points_;
  Matrix sampling_;
  std::optional<Matrix> metric_;
};

/// Test rule: the subset of sample points on which the whole population is
/// assigned to treatment b; the complement assigns to a.
struct TestRule {
  std::vector<std::size_t> accept_b;  // sorted, unique

  static TestRule from_mask(std::uint32_t mask, std::size_t num_sample_points);
  std::uint32_t to_mask(std::size_t num_sample_points) const;
  bool is_data_invariant(std::size_t num_sample_points) const;
};

/// Randomized allocation: fraction of the population assigned to b at each
/// sample point.  A TestRule is the 0/1 special case.
struct FractionalRule {
  std::vector<double> fraction_b;

  explicit FractionalRule(std::vector<double> fraction_b_in);
  static FractionalRule from_test_rule(const TestRule& rule, std::size_t num_sample_points);
};

/// Probability that the rule selects the inferior treatment in the given
/// state; zero when alpha equals beta.
double error_probability(const TreatmentProblem& tp, const TestRule& rule, std::size_t state);

/// Mean welfare across samples: alpha*(1 - E[delta]) + beta*E[delta].
double expected_welfare(const TreatmentProblem& tp, const FractionalRule& rule, std::size_t state);
double expected_welfare(const TreatmentProblem& tp, const TestRule& rule, std::size_t state);

/// lambda-quantile of the welfare distribution of a test rule: min(alpha,beta)
/// when the error probability reaches lambda, max(alpha,beta) otherwise.
double quantile_welfare(const TreatmentProblem& tp, const TestRule& rule, std::size_t state,
                        double lambda);

/// Likelihood-ratio rule for a two-state problem (state 0 a-better, state 1
/// b-better): accept b where q1(psi) > eta * q0(psi).
TestRule lr_rule(const TreatmentProblem& tp, double eta);

/// Enumeration bound for exhaustive test-rule scans.
inline constexpr std::size_t kEnumerationLimit = 22;

/// All 2^m test rules in mask order; refuses beyond kEnumerationLimit.
std::vector<TestRule> all_test_rules(std::size_t num_sample_points);

/// Classification of test rules by their error-probability vectors.
AdmissibilityReport test_rule_admissibility(const TreatmentProblem& tp,
                                            const std::vector<TestRule>& rules);

/// Equivalent finite decision problem with per-state binary loss
/// {0, |beta - alpha|} (welfare shifted so the better treatment has zero
/// loss; per-state shifts do not affect any admissibility relation).
DecisionProblem induced_binary_loss_problem(const TreatmentProblem& tp);

DecisionRule to_decision_rule(const TestRule& rule, std::size_t num_sample_points);

enum class WelfareMode { Mean, Quantile };

/// Maximizes the minimum (across states) mean or lambda-quantile welfare.
CriterionResult maximin(const TreatmentProblem& tp, const std::vector<TestRule>& rules,
                        WelfareMode mode, std::optional<double> lambda = std::nullopt);

/// Minimizes the maximum (across states) regret |beta - alpha| * rho (mean
/// mode) or |beta - alpha| * 1[rho >= lambda] (quantile mode).
CriterionResult minimax_regret(const TreatmentProblem& tp, const std::vector<TestRule>& rules,
                               WelfareMode mode, std::optional<double> lambda = std::nullopt);

/// Which states count as b-superior for hypothesis formation; states with
/// alpha == beta may sit on either side.
struct StatePartition {
  std::vector<bool> in_b;
};

/// alpha > beta to side a, alpha < beta to side b, ties to side a.
StatePartition default_partition(const TreatmentProblem& tp);

/// Minimum over cross-partition state pairs of the metric distance.
double min_cross_distance(const TreatmentProblem& tp, const StatePartition& partition);

/// Minimum-distance test rule: accept b iff the estimated state is strictly
/// closer to the b side; ties go to a.  estimator_distances[psi][s] is the
/// distance from the estimate at sample point psi to state s.
TestRule min_distance_rule(const TreatmentProblem& tp, const StatePartition& partition,
                           const Matrix& estimator_distances);

/// Convenience for real-line metric spaces: distances |estimate - position|.
Matrix absolute_distances(const std::vector<double>& estimates,
                          const std::vector<double>& state_positions);

struct ScanResult {
  double min_max_regret = 0.0;
  std::vector<std::uint32_t> attaining_masks;  // ascending
  std::uint64_t rules_scanned = 0;
};

/// Exhaustive minimum of max-state lambda-quantile regret over all 2^m test
/// rules; refuses beyond kEnumerationLimit sample points.
ScanResult quantile_regret_scan(const TreatmentProblem& tp, double lambda);

}  // namespace sdd
