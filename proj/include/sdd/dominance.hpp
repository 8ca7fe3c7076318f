#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdd/decision.hpp"
#include "sdd/distribution.hpp"

namespace sdd {

enum class Relation { Equal, FirstDominates, SecondDominates, Incomparable };

std::string to_string(Relation r);

/// Outcome of a first-order stochastic dominance comparison.  FirstDominates
/// means the first distribution puts more mass on larger values (its CDF lies
/// weakly below the second's, strictly somewhere).  The witness is the
/// threshold t (or quantile level, for the quantile route) at which
/// strictness or the sign reversal occurs; absent only for Equal.
struct DominanceVerdict {
  Relation relation = Relation::Equal;
  std::optional<double> witness;
};

/// Comparison by CDF ordering on the union support.
DominanceVerdict sd_compare_cdf(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Comparison by quantile ordering at the cumulative-weight breakpoints of
/// both distributions plus midpoints; witness is a quantile level in (0,1).
DominanceVerdict sd_compare_quantiles(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Comparison by expectations of the threshold family f_t(y) = 1[y > t] over
/// the union support; for finite supports these generate the orderings of all
/// increasing functions.
DominanceVerdict sd_compare_increasing(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct InadmissibilityCertificate {
  std::size_t rule;          // the eliminated rule
  std::size_t dominated_by;  // a rule that weakly improves on it everywhere
  std::size_t state;         // a state where the improvement is strict
  double witness;            // comparison witness at that state
};

struct AdmissibilityReport {
  std::vector<std::size_t> admissible;
  std::vector<InadmissibilityCertificate> inadmissible;
  /// Partition of the admissible rules into equivalence groups (distributional
  /// equality per state for the SD mode, value equality for vector modes).
  std::vector<std::vector<std::size_t>> equivalence_groups;

  /// Lowest-index representative of each equivalence group.
  std::vector<std::size_t> representatives() const;
};

/// SD-admissibility over whole loss distributions: a rule is eliminated iff
/// another rule's loss distribution is weakly better (SD-dominated, in the
/// lower-loss sense) in every state and strictly better in some state.
AdmissibilityReport sd_admissible_set(const DecisionProblem& problem,
                                      const std::vector<DecisionRule>& rules);

/// Classical admissibility on risk vectors.
AdmissibilityReport mean_admissible_set(const DecisionProblem& problem,
                                        const std::vector<DecisionRule>& rules);

/// Shared elimination engine on per-state scalar performance (lower better):
/// values[rule][state].  Used for risk vectors and error-probability vectors.
AdmissibilityReport vector_admissible_set(const std::vector<std::vector<double>>& values);

}  // namespace sdd
