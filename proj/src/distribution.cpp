#include "sdd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sdd {

void DiscreteDistribution::finalize(std::vector<Atom>&& atoms) {
  if (atoms.empty()) throw std::invalid_argument("DiscreteDistribution: no atoms");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value))
      throw std::invalid_argument("DiscreteDistribution: non-finite support value");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("DiscreteDistribution: weight " + std::to_string(a.weight) +
                                  " is negative or not finite");
  }
  support_.clear();
  weights_.clear();
  support_.reserve(atoms.size());
  weights_.reserve(atoms.size());
  // Merge runs of values within kMergeTol of the run's first value.
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double rep = atoms[i].value;
    double w = 0.0;
    while (i < atoms.size() && atoms[i].value - rep <= kMergeTol) {
      if (atoms[i].value < rep - kMergeTol)
        throw std::invalid_argument("DiscreteDistribution: support not sorted");
      w += atoms[i].weight;
      ++i;
    }
    if (w > 0.0) {
      support_.push_back(rep);
      weights_.push_back(w);
    }
  }
  if (support_.empty())
    throw std::invalid_argument("DiscreteDistribution: all weights are zero");

  long double total = 0.0L;
  cum_.resize(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    total += weights_[k];
    cum_[k] = static_cast<double>(total);
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kWeightTol)
    throw std::invalid_argument("DiscreteDistribution: weights sum to " +
                                std::to_string(static_cast<double>(total)) + ", expected 1");
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> support,
                                           std::vector<double> weights) {
  if (support.size() != weights.size())
    throw std::invalid_argument("DiscreteDistribution: support and weights differ in length");
  std::vector<Atom> atoms(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) atoms[i] = {support[i], weights[i]};
  finalize(std::move(atoms));
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({value}, {1.0});
}

DiscreteDistribution DiscreteDistribution::from_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  DiscreteDistribution d;
  d.finalize(std::move(atoms));
  return d;
}

DiscreteDistribution DiscreteDistribution::mixture(
    const std::vector<std::pair<double, const DiscreteDistribution*>>& components) {
  if (components.empty())
    throw std::invalid_argument("DiscreteDistribution::mixture: no components");
  std::vector<Atom> atoms;
  std::size_t total = 0;
  for (const auto& [w, dist] : components) total += dist->size();
  atoms.reserve(total);
  for (const auto& [w, dist] : components) {
    if (!(w >= 0.0))
      throw std::invalid_argument("DiscreteDistribution::mixture: negative component weight");
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < dist->size(); ++i)
      atoms.push_back({dist->support()[i], w * dist->weights()[i]});
  }
  return from_atoms(std::move(atoms));
}

double DiscreteDistribution::cdf(double t) const {
  const auto it = std::upper_bound(support_.begin(), support_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - support_.begin());
  return k == 0 ? 0.0 : cum_[k - 1];
}

double DiscreteDistribution::quantile(double lambda) const {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::domain_error("DiscreteDistribution::quantile: lambda " + std::to_string(lambda) +
                            " outside (0, 1)");
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), lambda);
  std::size_t k = static_cast<std::size_t>(it - cum_.begin());
  // Inside the normalization slack the cumulative may top out just below 1.
  if (k >= support_.size()) k = support_.size() - 1;
  return support_[k];
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * weights_[i];
  return m;
}

double kolmogorov_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  double d = 0.0;
  for (double t : p.support()) d = std::max(d, std::fabs(p.cdf(t) - q.cdf(t)));
  for (double t : q.support()) d = std::max(d, std::fabs(p.cdf(t) - q.cdf(t)));
  return d;
}

}  // namespace sdd
