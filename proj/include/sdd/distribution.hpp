#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sdd/common.hpp"

namespace sdd {

/// A finite distribution on the real line: strictly increasing support with
/// non-negative weights summing to one (within kWeightTol).  Construction
/// canonicalizes the atoms: values within kMergeTol are merged (weights
/// summed, first value kept) and exact zero weights are dropped.
class DiscreteDistribution {
 public:
  struct Atom {
    double value;
    double weight;
  };

  /// Support must be sorted (non-decreasing up to kMergeTol wiggle).
  DiscreteDistribution(std::vector<double> support, std::vector<double> weights);

  static DiscreteDistribution point_mass(double value);

  /// Builds from unsorted atoms.
  static DiscreteDistribution from_atoms(std::vector<Atom> atoms);

  /// Mixture sum_k weight_k * component_k.  Component weights must be
  /// non-negative; the result is validated like any other distribution.
  static DiscreteDistribution mixture(
      const std::vector<std::pair<double, const DiscreteDistribution*>>& components);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }
  double min_value() const { return support_.front(); }
  double max_value() const { return support_.back(); }

  /// P(X <= t), right-continuous.
  double cdf(double t) const;

  /// Left-continuous generalized inverse: min{t in support : cdf(t) >= lambda}.
  /// Requires lambda in (0, 1); throws std::domain_error otherwise.
  double quantile(double lambda) const;

  double mean() const;

 private:
  DiscreteDistribution() = default;
  void finalize(std::vector<Atom>&& sorted_atoms);

  std::vector<double> support_;
  std::vector<double> weights_;
  std::vector<double> cum_;  // prefix sums of weights_
};

/// sup_t |F_p(t) - F_q(t)| over the union of jump points.
double kolmogorov_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

}  // namespace sdd
