#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdd {

// Dense row-major matrix as nested vectors; shapes are validated at the
// boundaries where a matrix enters a domain type.
using Matrix = std::vector<std::vector<double>>;

// Probability normalization slack (sums of weights / sampling rows).
inline constexpr double kWeightTol = 1e-9;
// Support values closer than this are treated as the same atom.
inline constexpr double kMergeTol = 1e-12;
// A gap counts as strict dominance only beyond this threshold.
inline constexpr double kStrictTol = 1e-12;
// Optimizer values within this of the optimum are reported as ties.
inline constexpr double kTieTol = 1e-12;

// Thrown when an enumeration would exceed a hard capacity bound.  The CLI
// maps this to exit code 2, as opposed to 1 for validation failures.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_probability_vector(const std::vector<double>& w, const std::string& what);
void check_rectangular(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what);

}  // namespace sdd
