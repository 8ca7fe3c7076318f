#include "sdd/common.hpp"

#include <cmath>

namespace sdd {

void check_probability_vector(const std::vector<double>& w, const std::string& what) {
  if (w.empty()) throw std::invalid_argument(what + ": empty probability vector");
  long double total = 0.0L;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument(what + ": entry " + std::to_string(x) +
                                  " is not a probability");
    total += x;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kWeightTol)
    throw std::invalid_argument(what + ": entries sum to " +
                                std::to_string(static_cast<double>(total)) + ", expected 1");
}

void check_rectangular(const Matrix& m, std::size_t rows, std::size_t cols,
                       const std::string& what) {
  if (m.size() != rows)
    throw std::invalid_argument(what + ": expected " + std::to_string(rows) + " rows, got " +
                                std::to_string(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() != cols)
      throw std::invalid_argument(what + ": row " + std::to_string(r) + " has " +
                                  std::to_string(m[r].size()) + " entries, expected " +
                                  std::to_string(cols));
  }
}

}  // namespace sdd
