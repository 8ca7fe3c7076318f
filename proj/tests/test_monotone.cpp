#include <doctest.h>

#include <cmath>
#include <random>

#include "sdd/math.hpp"
#include "sdd/monotone.hpp"

using namespace sdd;

namespace {

// The three-state normal location family used throughout: payoff decreasing
// in the low state, constant at the reference, increasing in the high state.
GridFamily test_family(std::size_t points = 801) {
  return GridFamily::normal_location({-1.0, 0.0, 1.0}, 1.0, 1, points);
}

DosePayoff test_payoff() {
  return DosePayoff(0.0, 1.0,
                    {LinearPayoff{0.0, 1.0}, LinearPayoff{1.0, 1.0}, LinearPayoff{2.0, 1.0}});
}

RandomizedDoseRule scrambled_rule(const GridFamily& family, std::size_t nv = 101) {
  Matrix values(family.num_points(), std::vector<double>(nv));
  for (std::size_t i = 0; i < family.num_points(); ++i)
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(nv);
      values[i][j] = 0.5 + 0.3 * std::sin(2.5 * family.grid()[i] + 1.6) + 0.3 * (v - 0.5);
    }
  return RandomizedDoseRule(std::move(values));
}

}  // namespace

TEST_CASE("family validation and normalization") {
  // Uniform density on [0,1] integrates to 1 exactly under trapezoid weights.
  const GridFamily uniform({0.0, 0.25, 0.5, 0.75, 1.0},
                           {{1.0, 1.0, 1.0, 1.0, 1.0}}, 0);
  double mass = 0.0;
  for (std::size_t i = 0; i < uniform.num_points(); ++i) mass += uniform.cell_mass(0, i);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(GridFamily({0.0, 0.5, 1.0}, {{5.0, 5.0, 5.0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(GridFamily({0.0, 0.5, 0.5}, {{1.0, 1.0, 1.0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(GridFamily({0.0, 0.5, 1.0}, {{1.0, 1.0, 1.0}}, 3), std::out_of_range);

  const auto normal = test_family();
  for (std::size_t s = 0; s < normal.num_states(); ++s) {
    double m = 0.0;
    for (std::size_t i = 0; i < normal.num_points(); ++i) m += normal.cell_mass(s, i);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a shared density satisfies MLR trivially") {
  Matrix densities(3);
  const GridFamily base = test_family(401);
  densities[0] = base.densities()[1];
  densities[1] = base.densities()[1];
  densities[2] = base.densities()[1];
  const GridFamily family(base.grid(), densities, 1);
  const auto reports = verify_mlr(family, test_payoff());
  for (const auto& r : reports) {
    CHECK(r.holds);
    CHECK(r.unverifiable_points == 0);
  }
}

TEST_CASE("normal location family satisfies MLR in the payoff directions") {
  const auto family = test_family();
  const auto reports = verify_mlr(family, test_payoff());
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].required);
  CHECK(reports[0].holds);
  CHECK_FALSE(reports[1].required);  // constant payoff at the reference
  CHECK(reports[2].required);
  CHECK(reports[2].holds);
}

TEST_CASE("a scrambled density is flagged") {
  const GridFamily base = test_family(401);
  Matrix densities = base.densities();
  std::swap(densities[2][100], densities[2][300]);  // breaks ratio monotonicity
  const GridFamily family(base.grid(), densities, 1);
  const auto reports = verify_mlr(family, test_payoff());
  CHECK_FALSE(reports[2].holds);
  CHECK(reports[2].worst_violation > 1e-6);
}

TEST_CASE("action distribution of simple rules") {
  const auto family = test_family(401);
  SUBCASE("constant rule collapses to a point mass") {
    const auto rule = RandomizedDoseRule::deterministic(
        std::vector<double>(family.num_points(), 0.4), 11);
    const auto dist = action_distribution(rule, family, 0);
    CHECK(dist.size() == 1);
    CHECK(dist.support()[0] == 0.4);
  }
  SUBCASE("data-independent randomized rule reproduces the v marginal") {
    Matrix values(family.num_points(), std::vector<double>(4));
    for (auto& row : values) row = {0.1, 0.2, 0.3, 0.4};
    const auto dist = action_distribution(RandomizedDoseRule(values), family, 2);
    REQUIRE(dist.size() == 4);
    for (double w : dist.weights()) CHECK(w == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("total mass is one") {
    std::mt19937 rng(61);
    Matrix values(family.num_points(), std::vector<double>(7));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& row : values)
      for (double& x : row) x = unif(rng);
    const auto dist = action_distribution(RandomizedDoseRule(values), family, 1);
    double mass = 0.0;
    for (double w : dist.weights()) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("rearranging a monotone deterministic rule is the identity") {
  const auto family = test_family(801);
  std::vector<double> increasing(family.num_points());
  for (std::size_t i = 0; i < increasing.size(); ++i)
    increasing[i] = 0.1 + 0.8 * static_cast<double>(i) / (increasing.size() - 1);
  const auto rule = RandomizedDoseRule::deterministic(increasing, 21);
  const auto rearranged = monotone_rearrange(rule, family);
  for (std::size_t i = 0; i < increasing.size(); ++i)
    CHECK(rearranged[i] == doctest::Approx(increasing[i]).epsilon(1e-12));
}

TEST_CASE("an anti-monotone rule on a symmetric family reflects to the increasing one") {
  // Single state centered at zero: the grid is symmetric, so the
  // rearrangement of delta(psi) = -psi is exactly the identity map psi.
  const GridFamily family = GridFamily::normal_location({0.0}, 1.0, 0, 2001);
  std::vector<double> anti(family.num_points());
  for (std::size_t i = 0; i < anti.size(); ++i) anti[i] = -family.grid()[i];
  const auto rearranged = monotone_rearrange(RandomizedDoseRule::deterministic(anti, 5), family);
  for (std::size_t i = 0; i < anti.size(); ++i)
    CHECK(rearranged[i] == doctest::Approx(family.grid()[i]).epsilon(1e-9));
}

TEST_CASE("rearrangement output is non-decreasing and preserves the reference distribution") {
  const auto family = test_family(GridFamily::kDefaultGridPoints);
  const auto rule = scrambled_rule(family);
  const auto rearranged = monotone_rearrange(rule, family);
  for (std::size_t i = 1; i < rearranged.size(); ++i) CHECK(rearranged[i] >= rearranged[i - 1]);

  const auto before = action_distribution(rule, family, family.reference_state());
  const auto after = action_distribution(
      RandomizedDoseRule::deterministic(rearranged, rule.num_v_points()), family,
      family.reference_state());
  CHECK(kolmogorov_distance(before, after) <= 1e-3);
}

TEST_CASE("halving the grid spacing roughly halves the preservation error") {
  const auto coarse = test_family(2001);
  const auto fine = test_family(4001);
  const auto d = [](const GridFamily& family) {
    const auto rule = scrambled_rule(family);
    const auto rearranged = monotone_rearrange(rule, family);
    return kolmogorov_distance(
        action_distribution(rule, family, 1),
        action_distribution(RandomizedDoseRule::deterministic(rearranged, 101), family, 1));
  };
  const double ratio = d(fine) / d(coarse);
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
}

TEST_CASE("payoff distributions of degenerate states") {
  const auto family = test_family(401);
  const auto payoff = test_payoff();
  std::vector<double> values(family.num_points(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = 0.5 + 0.4 * std::sin(family.grid()[i]);
  SUBCASE("constant payoff state is a point mass at zero") {
    const auto dist = payoff_distribution(values, family, payoff, 1);
    CHECK(dist.size() == 1);
    CHECK(dist.support()[0] == 0.0);
  }
  SUBCASE("pushforward mass is one") {
    const auto dist = payoff_distribution(values, family, payoff, 2);
    double mass = 0.0;
    for (double w : dist.weights()) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("rearranged rule dominates the original in every state") {
  const auto family = test_family(2001);
  const auto payoff = test_payoff();
  const auto report = check_rearrangement_dominance(scrambled_rule(family), family, payoff);
  REQUIRE(report.states.size() == 3);
  for (const auto& check : report.states) {
    CHECK(check.verdict.relation != Relation::SecondDominates);
    CHECK(check.dominates_within_slack);
    CHECK(check.mlr_verified);
    CHECK(check.worst_violation <= report.slack);
  }
  for (std::size_t i = 1; i < report.rearranged.size(); ++i)
    CHECK(report.rearranged[i] >= report.rearranged[i - 1]);
}

TEST_CASE("constant payoffs make every state compare Equal") {
  const auto family = test_family(401);
  const DosePayoff flat(0.0, 1.0,
                        {LinearPayoff{1.0, 1.0}, LinearPayoff{2.0, 2.0}, LinearPayoff{0.5, 0.5}});
  const auto report = check_rearrangement_dominance(scrambled_rule(family), family, flat);
  CHECK(report.slack == 0.0);
  for (const auto& check : report.states) {
    CHECK(check.verdict.relation == Relation::Equal);
    CHECK(check.dominates_within_slack);
  }
}

TEST_CASE("rearranging an already rearranged rule changes nothing") {
  const auto family = test_family(801);
  const auto payoff = test_payoff();
  const auto first = monotone_rearrange(scrambled_rule(family), family);
  const auto report = check_rearrangement_dominance(
      RandomizedDoseRule::deterministic(first, 101), family, payoff);
  for (const auto& check : report.states) CHECK(check.verdict.relation == Relation::Equal);
}

TEST_CASE("states failing MLR are labeled unverified but still compared") {
  const GridFamily base = test_family(401);
  Matrix densities = base.densities();
  std::swap(densities[2][100], densities[2][300]);
  const GridFamily family(base.grid(), densities, 1);
  const auto report = check_rearrangement_dominance(scrambled_rule(family), family, test_payoff());
  CHECK_FALSE(report.states[2].mlr_verified);
  CHECK(report.states[0].mlr_verified);
}

TEST_CASE("payoff validation") {
  CHECK_THROWS_AS(DosePayoff(1.0, 0.0, {LinearPayoff{1.0, 0.0}}), std::invalid_argument);
  TabulatedPayoff bad;
  bad.actions = {0.0, 0.5, 1.0};
  bad.values = {0.0, 1.0, 0.5};  // not monotone
  CHECK_THROWS_AS(DosePayoff(0.0, 1.0, {StatePayoff{bad}}), std::invalid_argument);
  TabulatedPayoff good;
  good.actions = {0.0, 0.5, 1.0};
  good.values = {0.0, 0.2, 1.0};
  const DosePayoff payoff(0.0, 1.0, {StatePayoff{good}});
  CHECK(payoff.direction(0) == 1);
  CHECK(payoff.value(0, 0.25) == doctest::Approx(0.1));
  CHECK(payoff.max_slope() == doctest::Approx(1.6));
}
