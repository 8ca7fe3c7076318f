#pragma once

#include <cstddef>
#include <vector>

namespace sdd {

/// Probability mass function of Binomial(n, p) on {0, ..., n}.  Coefficients
/// come from a Pascal-triangle row, exact in double for the n used here.
std::vector<double> binomial_pmf(int n, double p);

/// P(Binomial(n, p) <= k); -1 gives 0.
double binomial_cdf(int n, double p, int k);

double normal_pdf(double x, double mu, double sigma);
double normal_cdf(double x, double mu, double sigma);

}  // namespace sdd
