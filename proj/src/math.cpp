#include "sdd/math.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdd {

std::vector<double> binomial_pmf(int n, double p) {
  if (n < 0) throw std::invalid_argument("binomial_pmf: negative n");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_pmf: p outside [0, 1]");
  // Pascal row; exact in double up to n = 1028 overflow-wise, and exact as
  // integers for the n used here.
  std::vector<double> coeff(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = 1; i <= n; ++i) {
    for (int k = i - 1; k >= 1; --k) coeff[static_cast<std::size_t>(k)] += coeff[k - 1];
  }
  std::vector<double> pmf(coeff.size());
  const double q = 1.0 - p;
  for (int k = 0; k <= n; ++k)
    pmf[static_cast<std::size_t>(k)] =
        coeff[static_cast<std::size_t>(k)] * std::pow(p, k) * std::pow(q, n - k);
  return pmf;
}

double binomial_cdf(int n, double p, int k) {
  if (k < 0) return 0.0;
  const std::vector<double> pmf = binomial_pmf(n, p);
  double acc = 0.0;
  for (int i = 0; i <= k && i <= n; ++i) acc += pmf[static_cast<std::size_t>(i)];
  return std::min(acc, 1.0);
}

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

}  // namespace sdd
