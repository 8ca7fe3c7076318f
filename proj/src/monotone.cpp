#include "sdd/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sdd/math.hpp"

namespace sdd {

namespace {

constexpr double kMlrTol = 1e-9;

// Quantile clamped to the open interval the distribution can answer;
// evaluation points at the very edges map to the extreme support values.
double quantile_clamped(const DiscreteDistribution& d, double level) {
  const double lo = 1e-15;
  const double hi = 1.0 - 1e-15;
  return d.quantile(std::clamp(level, lo, hi));
}

}  // namespace

GridFamily::GridFamily(std::vector<double> grid, Matrix densities, std::size_t reference_state)
    : grid_(std::move(grid)), densities_(std::move(densities)), reference_state_(reference_state) {
  if (grid_.size() < 3) throw std::invalid_argument("GridFamily: need at least 3 grid points");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1]))
      throw std::invalid_argument("GridFamily: grid not strictly increasing at index " +
                                  std::to_string(i));
  }
  if (densities_.empty()) throw std::invalid_argument("GridFamily: no states");
  if (reference_state_ >= densities_.size())
    throw std::out_of_range("GridFamily: reference state out of range");
  check_rectangular(densities_, densities_.size(), grid_.size(), "GridFamily densities");

  // Trapezoid cell weights on a possibly non-uniform grid.
  const std::size_t n = grid_.size();
  cell_widths_.assign(n, 0.0);
  cell_widths_[0] = 0.5 * (grid_[1] - grid_[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) cell_widths_[i] = 0.5 * (grid_[i + 1] - grid_[i - 1]);
  cell_widths_[n - 1] = 0.5 * (grid_[n - 1] - grid_[n - 2]);

  for (std::size_t s = 0; s < densities_.size(); ++s) {
    long double mass = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = densities_[s][i];
      if (!(q >= 0.0) || !std::isfinite(q))
        throw std::invalid_argument("GridFamily: negative or non-finite density in state " +
                                    std::to_string(s));
      mass += static_cast<long double>(q) * cell_widths_[i];
    }
    const double total = static_cast<double>(mass);
    if (std::fabs(total - 1.0) > kIntegralTol)
      throw std::invalid_argument("GridFamily: density of state " + std::to_string(s) +
                                  " integrates to " + std::to_string(total) + ", expected 1");
    // Normalize to unit quadrature mass so downstream distributions are exact.
    for (std::size_t i = 0; i < n; ++i) densities_[s][i] /= total;
  }
}

GridFamily GridFamily::normal_location(const std::vector<double>& mus, double sigma,
                                       std::size_t reference_state, std::size_t grid_points) {
  if (mus.empty()) throw std::invalid_argument("GridFamily::normal_location: no states");
  if (!(sigma > 0.0)) throw std::invalid_argument("GridFamily::normal_location: sigma <= 0");
  if (grid_points < 3)
    throw std::invalid_argument("GridFamily::normal_location: need at least 3 grid points");
  const double lo = *std::min_element(mus.begin(), mus.end()) - 8.0 * sigma;
  const double hi = *std::max_element(mus.begin(), mus.end()) + 8.0 * sigma;
  std::vector<double> grid(grid_points);
  const double h = (hi - lo) / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) grid[i] = lo + h * static_cast<double>(i);
  Matrix densities(mus.size(), std::vector<double>(grid_points, 0.0));
  for (std::size_t s = 0; s < mus.size(); ++s)
    for (std::size_t i = 0; i < grid_points; ++i)
      densities[s][i] = normal_pdf(grid[i], mus[s], sigma);
  return GridFamily(std::move(grid), std::move(densities), reference_state);
}

double GridFamily::max_cell_width() const {
  return *std::max_element(cell_widths_.begin(), cell_widths_.end());
}

DosePayoff::DosePayoff(double action_low, double action_high, std::vector<StatePayoff> per_state)
    : action_low_(action_low), action_high_(action_high), per_state_(std::move(per_state)) {
  if (!(action_low_ < action_high_))
    throw std::invalid_argument("DosePayoff: action bounds not increasing");
  if (per_state_.empty()) throw std::invalid_argument("DosePayoff: no states");
  directions_.reserve(per_state_.size());
  for (std::size_t s = 0; s < per_state_.size(); ++s) {
    if (const auto* lin = std::get_if<LinearPayoff>(&per_state_[s])) {
      const double slope = lin->b - lin->c;
      directions_.push_back(slope > 0.0 ? 1 : (slope < 0.0 ? -1 : 0));
      continue;
    }
    const auto& tab = std::get<TabulatedPayoff>(per_state_[s]);
    if (tab.actions.size() < 2 || tab.actions.size() != tab.values.size())
      throw std::invalid_argument("DosePayoff: tabulated state " + std::to_string(s) +
                                  " needs matching action/value grids of length >= 2");
    bool up = false;
    bool down = false;
    for (std::size_t i = 1; i < tab.actions.size(); ++i) {
      if (!(tab.actions[i] > tab.actions[i - 1]))
        throw std::invalid_argument("DosePayoff: action grid not increasing in state " +
                                    std::to_string(s));
      if (tab.values[i] > tab.values[i - 1]) up = true;
      if (tab.values[i] < tab.values[i - 1]) down = true;
    }
    if (up && down)
      throw std::invalid_argument("DosePayoff: payoff not weakly monotone in state " +
                                  std::to_string(s));
    directions_.push_back(up ? 1 : (down ? -1 : 0));
  }
}

double DosePayoff::value(std::size_t state, double action) const {
  if (state >= per_state_.size()) throw std::out_of_range("DosePayoff::value: state out of range");
  if (action < action_low_ - kMergeTol || action > action_high_ + kMergeTol)
    throw std::out_of_range("DosePayoff::value: action " + std::to_string(action) +
                            " outside bounds");
  if (const auto* lin = std::get_if<LinearPayoff>(&per_state_[state]))
    return (lin->b - lin->c) * action;
  const auto& tab = std::get<TabulatedPayoff>(per_state_[state]);
  if (action <= tab.actions.front()) return tab.values.front();
  if (action >= tab.actions.back()) return tab.values.back();
  const auto it = std::upper_bound(tab.actions.begin(), tab.actions.end(), action);
  const std::size_t k = static_cast<std::size_t>(it - tab.actions.begin());
  const double t = (action - tab.actions[k - 1]) / (tab.actions[k] - tab.actions[k - 1]);
  return tab.values[k - 1] + t * (tab.values[k] - tab.values[k - 1]);
}

int DosePayoff::direction(std::size_t state) const {
  if (state >= directions_.size())
    throw std::out_of_range("DosePayoff::direction: state out of range");
  return directions_[state];
}

double DosePayoff::max_slope() const {
  double worst = 0.0;
  for (const StatePayoff& sp : per_state_) {
    if (const auto* lin = std::get_if<LinearPayoff>(&sp)) {
      worst = std::max(worst, std::fabs(lin->b - lin->c));
      continue;
    }
    const auto& tab = std::get<TabulatedPayoff>(sp);
    for (std::size_t i = 1; i < tab.actions.size(); ++i)
      worst = std::max(worst, std::fabs((tab.values[i] - tab.values[i - 1]) /
                                        (tab.actions[i] - tab.actions[i - 1])));
  }
  return worst;
}

RandomizedDoseRule::RandomizedDoseRule(Matrix values_in) : values(std::move(values_in)) {
  if (values.empty() || values.front().empty())
    throw std::invalid_argument("RandomizedDoseRule: empty value matrix");
  const std::size_t nv = values.front().size();
  check_rectangular(values, values.size(), nv, "RandomizedDoseRule values");
  for (const auto& row : values) {
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("RandomizedDoseRule: non-finite action");
    }
  }
}

RandomizedDoseRule RandomizedDoseRule::deterministic(const std::vector<double>& per_grid_values,
                                                     std::size_t v_points) {
  if (v_points == 0) throw std::invalid_argument("RandomizedDoseRule: need v points");
  Matrix values(per_grid_values.size(), std::vector<double>(v_points, 0.0));
  for (std::size_t i = 0; i < per_grid_values.size(); ++i)
    std::fill(values[i].begin(), values[i].end(), per_grid_values[i]);
  return RandomizedDoseRule(std::move(values));
}

std::vector<MlrStateReport> verify_mlr(const GridFamily& family, const DosePayoff& payoff) {
  if (payoff.num_states() != family.num_states())
    throw std::invalid_argument("verify_mlr: payoff covers " +
                                std::to_string(payoff.num_states()) + " states, family has " +
                                std::to_string(family.num_states()));
  const std::size_t s0 = family.reference_state();
  std::vector<MlrStateReport> reports(family.num_states());
  for (std::size_t s = 0; s < family.num_states(); ++s) {
    MlrStateReport& rep = reports[s];
    const int dir = payoff.direction(s);
    rep.required = (s != s0) && dir != 0;
    if (!rep.required) continue;
    const std::vector<double>& qs = family.densities()[s];
    const std::vector<double>& qr = family.densities()[s0];
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < family.num_points(); ++i) {
      if (qr[i] == 0.0 || qr[i + 1] == 0.0) {
        ++rep.unverifiable_points;
        continue;
      }
      const double r_lo = qs[i] / qr[i];
      const double r_hi = qs[i + 1] / qr[i + 1];
      // Non-decreasing payoff needs a non-decreasing ratio, non-increasing
      // payoff the reverse.
      const double drop = dir > 0 ? (r_lo - r_hi) : (r_hi - r_lo);
      const double scale = std::max({1.0, std::fabs(r_lo), std::fabs(r_hi)});
      worst = std::max(worst, drop / scale);
    }
    rep.worst_violation = worst;
    rep.holds = worst <= kMlrTol;
  }
  return reports;
}

DiscreteDistribution action_distribution(const RandomizedDoseRule& rule, const GridFamily& family,
                                         std::size_t state) {
  if (state >= family.num_states())
    throw std::out_of_range("action_distribution: state out of range");
  if (rule.num_grid_points() != family.num_points())
    throw std::invalid_argument("action_distribution: rule covers " +
                                std::to_string(rule.num_grid_points()) +
                                " grid points, family has " + std::to_string(family.num_points()));
  const std::size_t nv = rule.num_v_points();
  const double v_weight = 1.0 / static_cast<double>(nv);
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(family.num_points() * nv);
  for (std::size_t i = 0; i < family.num_points(); ++i) {
    const double mass = family.cell_mass(state, i) * v_weight;
    if (mass == 0.0) continue;
    for (std::size_t j = 0; j < nv; ++j) atoms.push_back({rule.values[i][j], mass});
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

std::vector<double> monotone_rearrange(const RandomizedDoseRule& rule, const GridFamily& family) {
  if (rule.num_grid_points() != family.num_points())
    throw std::invalid_argument("monotone_rearrange: rule covers " +
                                std::to_string(rule.num_grid_points()) +
                                " grid points, family has " + std::to_string(family.num_points()));
  const std::size_t n = family.num_points();
  const std::size_t nv = rule.num_v_points();
  const std::size_t s0 = family.reference_state();
  const double v_weight = 1.0 / static_cast<double>(nv);

  // Sorted action atoms under the reference measure.  The quantile levels are
  // matched in extended precision from whichever end is closer, so the
  // rearrangement stays exact deep into the tails where cell masses fall
  // below the double-precision resolution of cumulative sums near one.
  std::vector<std::pair<double, double>> atoms;  // (value, mass)
  atoms.reserve(n * nv);
  for (std::size_t i = 0; i < n; ++i) {
    const double mass = family.cell_mass(s0, i) * v_weight;
    if (mass == 0.0) continue;
    for (std::size_t j = 0; j < nv; ++j) atoms.emplace_back(rule.values[i][j], mass);
  }
  if (atoms.empty()) throw std::invalid_argument("monotone_rearrange: no probability mass");
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t m = atoms.size();

  std::vector<long double> from_below(m);  // inclusive prefix of atom mass
  std::vector<long double> from_above(m);  // inclusive suffix of atom mass
  long double acc = 0.0L;
  for (std::size_t j = 0; j < m; ++j) from_below[j] = (acc += atoms[j].second);
  acc = 0.0L;
  for (std::size_t j = m; j-- > 0;) from_above[j] = (acc += atoms[j].second);
  const long double total = from_below[m - 1];

  std::vector<long double> level_below(n);  // cumulative to the cell midpoint
  std::vector<long double> level_above(n);
  acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double p = family.cell_mass(s0, i);
    level_below[i] = acc + 0.5L * p;
    acc += p;
  }
  acc = 0.0L;
  for (std::size_t i = n; i-- > 0;) {
    const long double p = family.cell_mass(s0, i);
    level_above[i] = acc + 0.5L * p;
    acc += p;
  }

  std::vector<double> rearranged(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j;
    if (level_below[i] <= 0.5L * total) {
      // Smallest j whose inclusive prefix reaches the level.
      j = static_cast<std::size_t>(
          std::lower_bound(from_below.begin(), from_below.end(), level_below[i]) -
          from_below.begin());
      if (j >= m) j = m - 1;
    } else {
      // Same inverse expressed through suffix masses: smallest j whose
      // successor suffix has dropped to the level.
      const auto it = std::lower_bound(from_above.begin(), from_above.end(), level_above[i],
                                       [](long double a, long double b) { return a > b; });
      const std::size_t k = static_cast<std::size_t>(it - from_above.begin());
      j = k == 0 ? 0 : k - 1;
    }
    rearranged[i] = atoms[j].first;
  }
  // The two accumulation directions can disagree by one atom right at the
  // crossover; restore the exact invariant.
  for (std::size_t i = 1; i < n; ++i)
    rearranged[i] = std::max(rearranged[i], rearranged[i - 1]);
  return rearranged;
}

DiscreteDistribution payoff_distribution(const std::vector<double>& rule_values,
                                         const GridFamily& family, const DosePayoff& payoff,
                                         std::size_t state) {
  if (state >= family.num_states())
    throw std::out_of_range("payoff_distribution: state out of range");
  if (rule_values.size() != family.num_points())
    throw std::invalid_argument("payoff_distribution: rule covers " +
                                std::to_string(rule_values.size()) + " grid points, family has " +
                                std::to_string(family.num_points()));
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(family.num_points());
  for (std::size_t i = 0; i < family.num_points(); ++i) {
    const double mass = family.cell_mass(state, i);
    if (mass == 0.0) continue;
    atoms.push_back({payoff.value(state, rule_values[i]), mass});
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

DiscreteDistribution payoff_distribution(const RandomizedDoseRule& rule, const GridFamily& family,
                                         const DosePayoff& payoff, std::size_t state) {
  if (state >= family.num_states())
    throw std::out_of_range("payoff_distribution: state out of range");
  if (rule.num_grid_points() != family.num_points())
    throw std::invalid_argument("payoff_distribution: rule/family grid mismatch");
  const std::size_t nv = rule.num_v_points();
  const double v_weight = 1.0 / static_cast<double>(nv);
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(family.num_points() * nv);
  for (std::size_t i = 0; i < family.num_points(); ++i) {
    const double mass = family.cell_mass(state, i) * v_weight;
    if (mass == 0.0) continue;
    for (std::size_t j = 0; j < nv; ++j)
      atoms.push_back({payoff.value(state, rule.values[i][j]), mass});
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

namespace {

// Largest shortfall of p's quantiles below q's across the merged breakpoint
// levels; positive values measure how far p falls short of dominating q.
double max_quantile_shortfall(const DiscreteDistribution& p, const DiscreteDistribution& q) {
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
  double worst = -std::numeric_limits<double>::infinity();
  double prev = 0.0;
  auto probe = [&](double level) {
    worst = std::max(worst, quantile_clamped(q, level) - quantile_clamped(p, level));
  };
  for (double b : breaks) {
    probe(0.5 * (prev + b));
    probe(b);
    prev = b;
  }
  probe(0.5 * (prev + 1.0));
  return worst;
}

}  // namespace

RearrangementReport check_rearrangement_dominance(const RandomizedDoseRule& rule,
                                                  const GridFamily& family,
                                                  const DosePayoff& payoff) {
  for (const auto& row : rule.values) {
    for (double v : row) {
      if (v < payoff.action_low() - kMergeTol || v > payoff.action_high() + kMergeTol)
        throw std::invalid_argument(
            "check_rearrangement_dominance: rule action outside payoff bounds");
    }
  }
  RearrangementReport report;
  report.slack = 2.0 * family.max_cell_width() * payoff.max_slope();
  report.rearranged = monotone_rearrange(rule, family);
  const std::vector<MlrStateReport> mlr = verify_mlr(family, payoff);
  report.states.resize(family.num_states());
  for (std::size_t s = 0; s < family.num_states(); ++s) {
    RearrangementStateCheck& check = report.states[s];
    const DiscreteDistribution rearranged_payoff =
        payoff_distribution(report.rearranged, family, payoff, s);
    const DiscreteDistribution original_payoff = payoff_distribution(rule, family, payoff, s);
    check.verdict = sd_compare_cdf(rearranged_payoff, original_payoff);
    check.worst_violation = max_quantile_shortfall(rearranged_payoff, original_payoff);
    check.dominates_within_slack = check.worst_violation <= report.slack;
    check.mlr_verified = !mlr[s].required || (mlr[s].holds && mlr[s].unverifiable_points == 0);
  }
  return report;
}

}  // namespace sdd
