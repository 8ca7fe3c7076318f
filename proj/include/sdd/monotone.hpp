#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "sdd/common.hpp"
#include "sdd/distribution.hpp"
#include "sdd/dominance.hpp"

namespace sdd {

/// Continuous sampling densities discretized on a real grid.  Each state's
/// density must integrate to one (within 1e-6) under the trapezoid cell
/// quadrature; rows are then normalized to unit quadrature mass exactly.
class GridFamily {
 public:
  static constexpr std::size_t kDefaultGridPoints = 4001;
  static constexpr double kIntegralTol = 1e-6;

  GridFamily(std::vector<double> grid, Matrix densities, std::size_t reference_state);

  /// Normal location family N(mu_s, sigma) on a uniform grid spanning
  /// [min mu - 8 sigma, max mu + 8 sigma].
  static GridFamily normal_location(const std::vector<double>& mus, double sigma,
                                    std::size_t reference_state,
                                    std::size_t grid_points = kDefaultGridPoints);

  const std::vector<double>& grid() const { return grid_; }
  const Matrix& densities() const { return densities_; }
  const std::vector<double>& cell_widths() const { return cell_widths_; }
  std::size_t reference_state() const { return reference_state_; }
  std::size_t num_states() const { return densities_.size(); }
  std::size_t num_points() const { return grid_.size(); }
  double max_cell_width() const;

  double cell_mass(std::size_t state, std::size_t i) const {
    return densities_[state][i] * cell_widths_[i];
  }

 private:
  std::vector<double> grid_;
  Matrix densities_;
  std::vector<double> cell_widths_;
  std::size_t reference_state_;
};

/// u(a) = (b - c) * a: marginal benefit b, known marginal cost c.
struct LinearPayoff {
  double b = 0.0;
  double c = 0.0;
};

/// Piecewise-linear payoff tabulated on an action grid.
struct TabulatedPayoff {
  std::vector<double> actions;  // strictly increasing
  std::vector<double> values;
};

using StatePayoff = std::variant<LinearPayoff, TabulatedPayoff>;

/// Per-state dose payoff, weakly monotone in the action for every state and
/// constant for the reference state of the family it is used with.
class DosePayoff {
 public:
  DosePayoff(double action_low, double action_high, std::vector<StatePayoff> per_state);

  double action_low() const { return action_low_; }
  double action_high() const { return action_high_; }
  std::size_t num_states() const { return per_state_.size(); }

  double value(std::size_t state, double action) const;
  /// -1 non-increasing, 0 constant, +1 non-decreasing.
  int direction(std::size_t state) const;
  double max_slope() const;

 private:
  double action_low_;
  double action_high_;
  std::vector<StatePayoff> per_state_;
  std::vector<int> directions_;
};

/// delta(psi, v) on the product of the sample grid and an equal-weight grid
/// of the Uniform[0,1] randomization variable.
struct RandomizedDoseRule {
  static constexpr std::size_t kDefaultVPoints = 101;

  Matrix values;  // [grid point][v point]

  explicit RandomizedDoseRule(Matrix values_in);
  static RandomizedDoseRule deterministic(const std::vector<double>& per_grid_values,
                                          std::size_t v_points = kDefaultVPoints);

  std::size_t num_grid_points() const { return values.size(); }
  std::size_t num_v_points() const { return values.empty() ? 0 : values.front().size(); }
};

struct MlrStateReport {
  bool required = false;  // false when the payoff is constant in this state
  bool holds = true;
  double worst_violation = 0.0;  // relative ratio decrease in the forbidden direction
  std::size_t unverifiable_points = 0;  // adjacent pairs with zero reference density
};

/// Checks the monotone likelihood ratio property of q_s / q_ref per state, in
/// the direction demanded by the payoff's monotonicity; tolerance 1e-9
/// relative.
std::vector<MlrStateReport> verify_mlr(const GridFamily& family, const DosePayoff& payoff);

/// Distribution of delta(psi, v) under Q_s x Uniform(v).
DiscreteDistribution action_distribution(const RandomizedDoseRule& rule, const GridFamily& family,
                                         std::size_t state);

/// Monotone rearrangement: the quantile function of the reference-state
/// action distribution evaluated at the reference CDF.  Output is
/// non-decreasing in psi and preserves the reference-state action
/// distribution up to grid resolution.
std::vector<double> monotone_rearrange(const RandomizedDoseRule& rule, const GridFamily& family);

/// Pushforward of the state's sampling distribution through psi -> u(rule(psi), s).
DiscreteDistribution payoff_distribution(const std::vector<double>& rule_values,
                                         const GridFamily& family, const DosePayoff& payoff,
                                         std::size_t state);
DiscreteDistribution payoff_distribution(const RandomizedDoseRule& rule, const GridFamily& family,
                                         const DosePayoff& payoff, std::size_t state);

struct RearrangementStateCheck {
  DominanceVerdict verdict;            // rearranged vs original payoff distribution
  bool dominates_within_slack = true;  // no quantile shortfall beyond the grid slack
  double worst_violation = 0.0;        // max over levels of V(original) - V(rearranged)
  bool mlr_verified = true;
};

struct RearrangementReport {
  double slack = 0.0;  // 2 * max cell width * max payoff slope
  std::vector<double> rearranged;
  std::vector<RearrangementStateCheck> states;
};

/// Rearranges the rule and verifies that the rearranged payoff distribution
/// weakly dominates the original one in every state, within discretization
/// slack.  States where MLR could not be verified are flagged, not failed.
RearrangementReport check_rearrangement_dominance(const RandomizedDoseRule& rule,
                                                  const GridFamily& family,
                                                  const DosePayoff& payoff);

}  // namespace sdd
