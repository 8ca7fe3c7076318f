#include "sdd/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdd {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "Equal";
    case Relation::FirstDominates: return "FirstDominates";
    case Relation::SecondDominates: return "SecondDominates";
    case Relation::Incomparable: return "Incomparable";
  }
  return "Unknown";
}

namespace {

// Union of the two supports with values within kMergeTol coalesced; each run
// is represented by its largest member so that cdf evaluation at the
// representative includes every atom of the run for both distributions.
std::vector<double> merged_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::vector<double> all;
  all.reserve(p.size() + q.size());
  all.insert(all.end(), p.support().begin(), p.support().end());
  all.insert(all.end(), q.support().begin(), q.support().end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.reserve(all.size());
  std::size_t i = 0;
  while (i < all.size()) {
    const double rep = all[i];
    double top = rep;
    while (i < all.size() && all[i] - rep <= kMergeTol) top = all[i++];
    out.push_back(top);
  }
  return out;
}

struct StrictTracker {
  bool p_strict = false;  // p's value weakly "better" with a strict gap somewhere
  bool q_strict = false;
  double p_witness = 0.0;
  double q_witness = 0.0;

  // gap > 0 favors p (p dominates direction), gap < 0 favors q.
  void observe(double gap, double where) {
    if (gap > kStrictTol && !p_strict) {
      p_strict = true;
      p_witness = where;
    } else if (gap < -kStrictTol && !q_strict) {
      q_strict = true;
      q_witness = where;
    }
  }

  DominanceVerdict verdict() const {
    DominanceVerdict v;
    if (p_strict && q_strict) {
      v.relation = Relation::Incomparable;
      // The later of the two first-strict points is where the sign reverses.
      v.witness = std::max(p_witness, q_witness);
    } else if (p_strict) {
      v.relation = Relation::FirstDominates;
      v.witness = p_witness;
    } else if (q_strict) {
      v.relation = Relation::SecondDominates;
      v.witness = q_witness;
    } else {
      v.relation = Relation::Equal;
    }
    return v;
  }
};

}  // namespace

DominanceVerdict sd_compare_cdf(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  StrictTracker tracker;
  for (double t : merged_support(p, q)) {
    // Lower CDF means more mass on larger values, i.e. the dominating side.
    tracker.observe(q.cdf(t) - p.cdf(t), t);
  }
  return tracker.verdict();
}

DominanceVerdict sd_compare_quantiles(const DiscreteDistribution& p,
                                      const DiscreteDistribution& q) {
  // Candidate levels: cumulative-weight breakpoints of both distributions in
  // (0,1), plus midpoints between consecutive anchors {0, breakpoints..., 1}.
  std::vector<double> breaks;
  auto add_breaks = [&breaks](const DiscreteDistribution& d) {
    double cum = 0.0;
    for (double w : d.weights()) {
      cum += w;
      if (cum > 0.0 && cum < 1.0) breaks.push_back(cum);
    }
  };
  add_breaks(p);
  add_breaks(q);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> levels;
  levels.reserve(2 * breaks.size() + 1);
  // Midpoints next to a breakpoint one ulp under 1 can round onto the
  // boundary; only levels strictly inside (0,1) are usable.
  const auto push_level = [&levels](double x) {
    if (x > 0.0 && x < 1.0) levels.push_back(x);
  };
  double prev = 0.0;
  for (double b : breaks) {
    push_level(0.5 * (prev + b));
    push_level(b);
    prev = b;
  }
  push_level(0.5 * (prev + 1.0));

  StrictTracker tracker;
  for (double lambda : levels) {
    // The dominating side has the larger quantiles.
    tracker.observe(p.quantile(lambda) - q.quantile(lambda), lambda);
  }
  return tracker.verdict();
}

DominanceVerdict sd_compare_increasing(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q) {
  // Survival masses computed by suffix accumulation, independent of the
  // prefix-sum path used by cdf().
  auto survival_table = [](const DiscreteDistribution& d) {
    std::vector<double> suffix(d.size() + 1, 0.0);
    for (std::size_t i = d.size(); i-- > 0;) suffix[i] = suffix[i + 1] + d.weights()[i];
    return suffix;
  };
  const std::vector<double> sp = survival_table(p);
  const std::vector<double> sq = survival_table(q);
  auto survival = [](const DiscreteDistribution& d, const std::vector<double>& suffix, double t) {
    const auto it = std::upper_bound(d.support().begin(), d.support().end(), t);
    return suffix[static_cast<std::size_t>(it - d.support().begin())];
  };

  StrictTracker tracker;
  for (double t : merged_support(p, q)) {
    // E f_t = P(X > t); the dominating side has the larger expectation.
    tracker.observe(survival(p, sp, t) - survival(q, sq, t), t);
  }
  return tracker.verdict();
}

std::vector<std::size_t> AdmissibilityReport::representatives() const {
  std::vector<std::size_t> reps;
  reps.reserve(equivalence_groups.size());
  for (const auto& g : equivalence_groups)
    reps.push_back(*std::min_element(g.begin(), g.end()));
  return reps;
}

namespace {

// Generic pairwise elimination.  dominates(i, j) must fill a certificate when
// i weakly-beats j everywhere and strictly somewhere; equivalent(i, j) groups
// the surviving rules.
template <typename DominatesFn, typename EquivalentFn>
AdmissibilityReport eliminate(std::size_t n, DominatesFn&& dominates, EquivalentFn&& equivalent) {
  if (n == 0) throw std::invalid_argument("admissibility: empty rule list");
  AdmissibilityReport report;
  std::vector<bool> dominated(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      InadmissibilityCertificate cert{j, i, 0, 0.0};
      if (dominates(i, j, cert)) {
        dominated[j] = true;
        report.inadmissible.push_back(cert);
        break;
      }
    }
    if (!dominated[j]) report.admissible.push_back(j);
  }
  // First-fit grouping of the admissible rules.
  for (std::size_t idx : report.admissible) {
    bool placed = false;
    for (auto& group : report.equivalence_groups) {
      if (equivalent(group.front(), idx)) {
        group.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) report.equivalence_groups.push_back({idx});
  }
  return report;
}

}  // namespace

AdmissibilityReport sd_admissible_set(const DecisionProblem& problem,
                                      const std::vector<DecisionRule>& rules) {
  if (rules.empty()) throw std::invalid_argument("sd_admissible_set: empty rule list");
  const std::size_t n = rules.size();
  const std::size_t num_states = problem.num_states();
  std::vector<std::vector<DiscreteDistribution>> dists;
  dists.reserve(n);
  for (const DecisionRule& rule : rules) {
    std::vector<DiscreteDistribution> per_state;
    per_state.reserve(num_states);
    for (std::size_t s = 0; s < num_states; ++s)
      per_state.push_back(loss_distribution(problem, rule, s));
    dists.push_back(std::move(per_state));
  }

  auto dominates = [&](std::size_t i, std::size_t j, InadmissibilityCertificate& cert) {
    bool strict = false;
    for (std::size_t s = 0; s < num_states; ++s) {
      // j's loss distribution must put weakly more mass on larger losses.
      const DominanceVerdict v = sd_compare_cdf(dists[j][s], dists[i][s]);
      if (v.relation == Relation::SecondDominates || v.relation == Relation::Incomparable)
        return false;
      if (v.relation == Relation::FirstDominates && !strict) {
        strict = true;
        cert.state = s;
        cert.witness = *v.witness;
      }
    }
    return strict;
  };
  auto equivalent = [&](std::size_t a, std::size_t b) {
    for (std::size_t s = 0; s < num_states; ++s) {
      if (sd_compare_cdf(dists[a][s], dists[b][s]).relation != Relation::Equal) return false;
    }
    return true;
  };
  return eliminate(n, dominates, equivalent);
}

AdmissibilityReport mean_admissible_set(const DecisionProblem& problem,
                                        const std::vector<DecisionRule>& rules) {
  if (rules.empty()) throw std::invalid_argument("mean_admissible_set: empty rule list");
  std::vector<std::vector<double>> risks(rules.size(),
                                         std::vector<double>(problem.num_states(), 0.0));
  for (std::size_t r = 0; r < rules.size(); ++r)
    for (std::size_t s = 0; s < problem.num_states(); ++s)
      risks[r][s] = risk(problem, rules[r], s);
  return vector_admissible_set(risks);
}

AdmissibilityReport vector_admissible_set(const std::vector<std::vector<double>>& values) {
  if (values.empty()) throw std::invalid_argument("vector_admissible_set: empty rule list");
  const std::size_t num_states = values.front().size();
  for (const auto& row : values) {
    if (row.size() != num_states)
      throw std::invalid_argument("vector_admissible_set: ragged value table");
  }
  auto dominates = [&](std::size_t i, std::size_t j, InadmissibilityCertificate& cert) {
    bool strict = false;
    for (std::size_t s = 0; s < num_states; ++s) {
      const double gap = values[j][s] - values[i][s];
      if (gap < -kStrictTol) return false;
      if (gap > kStrictTol && !strict) {
        strict = true;
        cert.state = s;
        cert.witness = gap;
      }
    }
    return strict;
  };
  auto equivalent = [&](std::size_t a, std::size_t b) {
    for (std::size_t s = 0; s < num_states; ++s) {
      if (std::fabs(values[a][s] - values[b][s]) > kStrictTol) return false;
    }
    return true;
  };
  return eliminate(values.size(), dominates, equivalent);
}

}  // namespace sdd
