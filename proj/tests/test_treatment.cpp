#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sdd/dominance.hpp"
#include "sdd/math.hpp"
#include "sdd/treatment.hpp"

using namespace sdd;

namespace {

// Two states, Bernoulli(0.2) and Bernoulli(0.8) success indicators.
TreatmentProblem bernoulli_problem() {
  return TreatmentProblem({{"s0", 1.0, 0.0}, {"s1", 0.0, 1.0}},
                          {{0.8, 0.2}, {0.2, 0.8}});
}

// Uninformative coin: two sample points, uniform in every state.
TreatmentProblem coin_problem() {
  return TreatmentProblem({{"a_better", 1.0, 0.0}, {"b_better", 0.0, 1.0}},
                          {{0.5, 0.5}, {0.5, 0.5}});
}

// Three-state Binomial(10, p_s) instance: the knife-edge state pins mean
// maximin to the always-a rule, while quantile maximin at lambda = 0.1
// prefers a data-varying rule.
TreatmentProblem maximin_contrast_problem() {
  return TreatmentProblem::binomial(
      {{"b_low", 1.0, 2.0}, {"a_strong", 1.5, 0.0}, {"knife_edge", 1.000001, 0.9}}, 10,
      {0.8, 0.2, 0.35});
}

}  // namespace

TEST_CASE("binomial expansion matches the pmf") {
  const auto tp = TreatmentProblem::binomial({{"lo", 1.0, 0.0}, {"hi", 0.0, 1.0}}, 6, {0.3, 0.7});
  CHECK(tp.num_sample_points() == 7);
  const auto pmf = binomial_pmf(6, 0.3);
  for (int k = 0; k <= 6; ++k) CHECK(tp.sampling()[0][k] == doctest::Approx(pmf[k]).epsilon(1e-15));
}

TEST_CASE("error probabilities of the data-invariant rules") {
  const auto tp = bernoulli_problem();
  const TestRule always_a;  // empty accept set
  CHECK(error_probability(tp, always_a, 0) == 0.0);
  CHECK(error_probability(tp, always_a, 1) == 1.0);
}

TEST_CASE("error vanishes when the treatments tie") {
  const TreatmentProblem tp({{"tie", 1.0, 1.0}, {"a", 2.0, 0.0}, {"b", 0.0, 2.0}},
                            {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  const TestRule rule{{1}};
  CHECK(error_probability(tp, rule, 0) == 0.0);
}

TEST_CASE("coin rule has error probability one half everywhere") {
  const auto tp = coin_problem();
  const TestRule coin{{1}};
  CHECK(error_probability(tp, coin, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(error_probability(tp, coin, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Bernoulli instance error probabilities") {
  const auto tp = bernoulli_problem();
  const TestRule rule{{1}};
  CHECK(error_probability(tp, rule, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(error_probability(tp, rule, 1) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("expected welfare of simple rules") {
  const auto tp = coin_problem();
  const TestRule always_b{{0, 1}};
  CHECK(expected_welfare(tp, always_b, 0) == doctest::Approx(0.0));
  CHECK(expected_welfare(tp, always_b, 1) == doctest::Approx(1.0));
  const TestRule coin{{1}};
  CHECK(expected_welfare(tp, coin, 0) == doctest::Approx(0.5));  // (alpha+beta)/2
}

TEST_CASE("mean welfare agrees with the error-probability form") {
  std::mt19937 rng(51);
  int checked = 0;
  while (checked < 500) {
    const auto tp = testing::random_treatment_problem(rng);
    std::uniform_int_distribution<std::uint32_t> mask_dist(
        0, static_cast<std::uint32_t>((1u << tp.num_sample_points()) - 1));
    const auto rule = TestRule::from_mask(mask_dist(rng), tp.num_sample_points());
    for (std::size_t s = 0; s < tp.num_states(); ++s) {
      const auto& st = tp.states()[s];
      const double rho = error_probability(tp, rule, s);
      CHECK(rho >= 0.0);
      CHECK(rho <= 1.0 + 1e-12);
      const double via_error =
          std::min(st.alpha, st.beta) * rho + std::max(st.alpha, st.beta) * (1.0 - rho);
      CHECK(expected_welfare(tp, rule, s) == doctest::Approx(via_error).epsilon(1e-12));
      ++checked;
    }
  }
}

TEST_CASE("quantile welfare is the stated step function") {
  const auto tp = coin_problem();
  const TestRule always_a;
  CHECK(quantile_welfare(tp, always_a, 0, 0.3) == 1.0);  // rho = 0 -> max
  const TestRule coin{{1}};
  CHECK(quantile_welfare(tp, coin, 0, 0.6) == 1.0);  // rho = 1/2 < 0.6
  CHECK(quantile_welfare(tp, coin, 0, 0.4) == 0.0);  // rho = 1/2 >= 0.4
  CHECK_THROWS_AS(quantile_welfare(tp, coin, 0, 1.0), std::domain_error);
}

TEST_CASE("quantile welfare matches the quantile of the welfare distribution") {
  std::mt19937 rng(52);
  std::uniform_real_distribution<double> level(0.05, 0.95);
  for (int rep = 0; rep < 200; ++rep) {
    const auto tp = testing::random_treatment_problem(rng);
    std::uniform_int_distribution<std::uint32_t> mask_dist(
        0, static_cast<std::uint32_t>((1u << tp.num_sample_points()) - 1));
    const auto rule = TestRule::from_mask(mask_dist(rng), tp.num_sample_points());
    const double lambda = level(rng);
    for (std::size_t s = 0; s < tp.num_states(); ++s) {
      const auto& st = tp.states()[s];
      const double rho = error_probability(tp, rule, s);
      // Two-point welfare distribution {min: rho, max: 1-rho}.
      std::vector<DiscreteDistribution::Atom> atoms = {
          {std::min(st.alpha, st.beta), rho}, {std::max(st.alpha, st.beta), 1.0 - rho}};
      const auto welfare = DiscreteDistribution::from_atoms(std::move(atoms));
      CHECK(quantile_welfare(tp, rule, s, lambda) ==
            doctest::Approx(welfare.quantile(lambda)).epsilon(1e-14));
    }
  }
}

TEST_CASE("likelihood-ratio rules") {
  const auto tp = bernoulli_problem();
  SUBCASE("threshold zero accepts b wherever q1 is positive") {
    const auto rule = lr_rule(tp, 0.0);
    CHECK(rule.accept_b == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("threshold one singles out the informative point") {
    // Likelihood ratios are 0.25 at psi=0 and 4 at psi=1.
    const auto rule = lr_rule(tp, 1.0);
    CHECK(rule.accept_b == std::vector<std::size_t>{1});
    CHECK(error_probability(tp, rule, 0) == doctest::Approx(0.2));
    CHECK(error_probability(tp, rule, 1) == doctest::Approx(0.2));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(lr_rule(tp, -0.5), std::domain_error);
    const TreatmentProblem three({{"x", 1.0, 0.0}, {"y", 0.0, 1.0}, {"z", 1.0, 0.0}},
                                 {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
    CHECK_THROWS_AS(lr_rule(three, 1.0), std::invalid_argument);
    const TreatmentProblem same({{"x", 1.0, 0.0}, {"y", 0.0, 1.0}}, {{0.5, 0.5}, {0.5, 0.5}});
    CHECK_THROWS_AS(lr_rule(same, 1.0), std::invalid_argument);
  }
}

TEST_CASE("every Bernoulli test rule is matched or beaten by a likelihood-ratio rule") {
  const auto tp = bernoulli_problem();
  // Enumerate all 4 rules; {0} has errors (0.8, 0.8), beaten by eta=1's (0.2, 0.2).
  const auto rules = all_test_rules(tp.num_sample_points());
  REQUIRE(rules.size() == 4);
  const auto report = test_rule_admissibility(tp, rules);
  CHECK(report.admissible == std::vector<std::size_t>{0, 2, 3});
  REQUIRE(report.inadmissible.size() == 1);
  CHECK(report.inadmissible[0].rule == 1);
  CHECK(report.inadmissible[0].dominated_by == 2);
  CHECK(rules[2].accept_b == lr_rule(tp, 1.0).accept_b);
}

TEST_CASE("admissibility routes coincide on random instances") {
  std::mt19937 rng(53);
  for (int rep = 0; rep < 30; ++rep) {
    const auto tp = testing::random_treatment_problem(rng, 6);
    const auto rules = all_test_rules(tp.num_sample_points());
    const auto via_error = test_rule_admissibility(tp, rules);

    const auto problem = induced_binary_loss_problem(tp);
    std::vector<DecisionRule> decision_rules;
    decision_rules.reserve(rules.size());
    for (const auto& r : rules)
      decision_rules.push_back(to_decision_rule(r, tp.num_sample_points()));
    const auto via_sd = sd_admissible_set(problem, decision_rules);
    const auto via_mean = mean_admissible_set(problem, decision_rules);

    CHECK(via_error.admissible == via_sd.admissible);
    CHECK(via_error.admissible == via_mean.admissible);
  }
}

TEST_CASE("likelihood-ratio dominance is sufficient for inadmissibility") {
  // One direction is a theorem, the other is open: a rule whose error pair is
  // weakly beaten by some threshold rule must be inadmissible, and threshold
  // rules themselves survive exhaustive elimination.  (Pure threshold rules
  // do not coordinate-wise dominate every interior rule once the sample space
  // has three or more points, so no converse is asserted.)
  std::mt19937 rng(54);
  for (int rep = 0; rep < 15; ++rep) {
    const auto tp = testing::random_treatment_problem(rng, 8);
    const std::size_t m = tp.num_sample_points();
    // Candidate thresholds: 0, every observed ratio, midpoints, and above max.
    std::vector<double> etas = {0.0};
    for (std::size_t psi = 0; psi < m; ++psi) {
      if (tp.sampling()[0][psi] > 0.0)
        etas.push_back(tp.sampling()[1][psi] / tp.sampling()[0][psi]);
    }
    std::sort(etas.begin(), etas.end());
    const double top = etas.back() + 1.0;
    for (std::size_t i = etas.size(); i-- > 1;)
      etas.push_back(0.5 * (etas[i] + etas[i - 1]));
    etas.push_back(top);

    std::vector<std::pair<double, double>> frontier;
    std::vector<std::uint32_t> frontier_masks;
    for (double eta : etas) {
      const auto rule = lr_rule(tp, eta);
      frontier.emplace_back(error_probability(tp, rule, 0), error_probability(tp, rule, 1));
      frontier_masks.push_back(rule.to_mask(m));
    }

    const auto rules = all_test_rules(m);
    const auto report = test_rule_admissibility(tp, rules);
    std::vector<bool> admissible(rules.size(), false);
    for (std::size_t idx : report.admissible) admissible[idx] = true;

    for (std::size_t idx = 0; idx < rules.size(); ++idx) {
      const double r0 = error_probability(tp, rules[idx], 0);
      const double r1 = error_probability(tp, rules[idx], 1);
      bool beaten = false;
      for (std::size_t f = 0; f < frontier.size(); ++f) {
        if (frontier_masks[f] == static_cast<std::uint32_t>(idx)) continue;
        const auto& [f0, f1] = frontier[f];
        beaten |= f0 <= r0 + 1e-12 && f1 <= r1 + 1e-12 &&
                  (r0 - f0 > 1e-12 || r1 - f1 > 1e-12);
      }
      if (beaten) CHECK_FALSE(admissible[idx]);
    }
    for (std::uint32_t mask : frontier_masks) CHECK(admissible[mask]);
  }
}

TEST_CASE("maximin: single rule is trivially optimal") {
  const auto tp = bernoulli_problem();
  const auto result = maximin(tp, {TestRule{{1}}}, WelfareMode::Mean);
  CHECK(result.optimal_rules == std::vector<std::size_t>{0});
}

TEST_CASE("mean maximin uniquely selects always-a on the contrast instance") {
  const auto tp = maximin_contrast_problem();
  const auto rules = all_test_rules(tp.num_sample_points());
  const auto result = maximin(tp, rules, WelfareMode::Mean);
  REQUIRE(result.optimal_rules.size() == 1);
  CHECK(rules[result.optimal_rules[0]].accept_b.empty());
  CHECK(result.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantile maximin admits a data-varying rule on the contrast instance") {
  const auto tp = maximin_contrast_problem();
  const auto rules = all_test_rules(tp.num_sample_points());
  const auto result = maximin(tp, rules, WelfareMode::Quantile, 0.1);
  CHECK(result.value > 1.0 + 1e-9);
  for (std::size_t idx : result.optimal_rules)
    CHECK(!rules[idx].is_data_invariant(tp.num_sample_points()));
}

TEST_CASE("minimax regret modes") {
  const auto tp = coin_problem();
  const TestRule coin{{1}};
  SUBCASE("coin rule has zero quantile regret above one half") {
    const auto result = minimax_regret(tp, {coin}, WelfareMode::Quantile, 0.6);
    CHECK(result.value == 0.0);
  }
  SUBCASE("coin rule has positive quantile regret below one half") {
    const auto result = minimax_regret(tp, {coin}, WelfareMode::Quantile, 0.4);
    CHECK(result.value == doctest::Approx(1.0));
  }
  SUBCASE("mean regret is positive whenever every rule errs somewhere") {
    const auto tp2 = TreatmentProblem::binomial({{"lo", 1.0, 0.0}, {"hi", 0.0, 1.0}}, 4,
                                                {0.3, 0.7});
    const auto rules = all_test_rules(tp2.num_sample_points());
    const auto result = minimax_regret(tp2, rules, WelfareMode::Mean);
    CHECK(result.value > 0.0);
  }
  SUBCASE("a rule with no errors has zero regret in both modes") {
    const TreatmentProblem tp3({{"a", 1.0, 0.0}, {"b", 0.0, 1.0}},
                               {{1.0, 0.0}, {0.0, 1.0}});
    const TestRule oracle_rule{{1}};
    CHECK(minimax_regret(tp3, {oracle_rule}, WelfareMode::Mean).value == 0.0);
    CHECK(minimax_regret(tp3, {oracle_rule}, WelfareMode::Quantile, 0.2).value == 0.0);
  }
}

TEST_CASE("minimum-distance rule on the two-state binomial instance") {
  const Matrix metric = {{0.0, 0.4}, {0.4, 0.0}};
  const auto tp = TreatmentProblem::binomial({{"0.3", 0.5, 0.3}, {"0.7", 0.5, 0.7}}, 20,
                                             {0.3, 0.7}, metric);
  // Estimator distances |k/20 - s| built from integers so the tie at k = 10
  // is exact: |10k - 60| / 200 versus |10k - 140| / 200.
  Matrix distances(21, std::vector<double>(2));
  for (int k = 0; k <= 20; ++k) {
    distances[k][0] = std::fabs(10.0 * k - 60.0) / 200.0;
    distances[k][1] = std::fabs(10.0 * k - 140.0) / 200.0;
  }
  const auto rule = min_distance_rule(tp, default_partition(tp), distances);
  // Sample means strictly above 0.5 are closer to 0.7; the tie at k=10 goes
  // to treatment a.
  std::vector<std::size_t> expected;
  for (std::size_t k = 11; k <= 20; ++k) expected.push_back(k);
  CHECK(rule.accept_b == expected);

  // Exact binomial tail oracle for the error probabilities.
  double tail_03 = 0.0;
  const auto pmf03 = binomial_pmf(20, 0.3);
  for (int k = 11; k <= 20; ++k) tail_03 += pmf03[k];
  CHECK(error_probability(tp, rule, 0) == doctest::Approx(tail_03).epsilon(1e-12));
  const double head_07 = binomial_cdf(20, 0.7, 10);
  CHECK(error_probability(tp, rule, 1) == doctest::Approx(head_07).epsilon(1e-12));
}

TEST_CASE("estimator pinned to the a side yields always-a") {
  const Matrix metric = {{0.0, 0.4}, {0.4, 0.0}};
  const auto tp = TreatmentProblem::binomial({{"0.3", 0.5, 0.3}, {"0.7", 0.5, 0.7}}, 4,
                                             {0.3, 0.7}, metric);
  Matrix distances(5, {0.0, 0.4});  // estimate always sits on the a-side state
  const auto rule = min_distance_rule(tp, default_partition(tp), distances);
  CHECK(rule.accept_b.empty());

  StatePartition lopsided{{false, false}};
  CHECK_THROWS_AS(min_distance_rule(tp, lopsided, distances), std::invalid_argument);
  const auto no_metric = TreatmentProblem::binomial({{"0.3", 0.5, 0.3}, {"0.7", 0.5, 0.7}}, 4,
                                                    {0.3, 0.7});
  CHECK_THROWS_AS(min_distance_rule(no_metric, default_partition(no_metric), distances),
                  std::invalid_argument);
}

TEST_CASE("precise estimation gives zero quantile regret at the derived sample size") {
  // Smallest n with Q_s(|mean - s| >= 0.2) < 0.1 for both states.
  const double lambda = 0.1;
  int derived_n = -1;
  for (int n = 1; n <= 60 && derived_n < 0; ++n) {
    bool ok = true;
    for (double s : {0.3, 0.7}) {
      const auto pmf = binomial_pmf(n, s);
      double bad = 0.0;
      for (int k = 0; k <= n; ++k)
        if (std::fabs(static_cast<double>(k) / n - s) >= 0.2) bad += pmf[k];
      ok &= bad < lambda;
    }
    if (ok) derived_n = n;
  }
  REQUIRE(derived_n > 0);

  const Matrix metric = {{0.0, 0.4}, {0.4, 0.0}};
  const auto tp = TreatmentProblem::binomial({{"0.3", 0.5, 0.3}, {"0.7", 0.5, 0.7}}, derived_n,
                                             {0.3, 0.7}, metric);
  CHECK(min_cross_distance(tp, default_partition(tp)) == doctest::Approx(0.4));
  std::vector<double> estimates(static_cast<std::size_t>(derived_n) + 1);
  for (int k = 0; k <= derived_n; ++k) estimates[k] = static_cast<double>(k) / derived_n;
  const auto rule = min_distance_rule(tp, default_partition(tp),
                                      absolute_distances(estimates, {0.3, 0.7}));
  for (std::size_t s = 0; s < 2; ++s) CHECK(error_probability(tp, rule, s) < lambda);
  double worst = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    const auto& st = tp.states()[s];
    if (error_probability(tp, rule, s) >= lambda)
      worst = std::max(worst, std::fabs(st.beta - st.alpha));
  }
  CHECK(worst == 0.0);
}

TEST_CASE("exhaustive quantile regret scan") {
  SUBCASE("coin sample space attains zero above one half") {
    const auto tp = coin_problem();
    const auto scan = quantile_regret_scan(tp, 0.6);
    CHECK(scan.min_max_regret == 0.0);
    CHECK(scan.rules_scanned == 4);
    // The two coin rules attain it; the data-invariant rules err for sure in
    // one state.
    CHECK(scan.attaining_masks == std::vector<std::uint32_t>{1, 2});
  }
  SUBCASE("single informative sample point leaves only data-invariant rules") {
    const TreatmentProblem tp({{"a", 1.0, 0.0}, {"b", 0.0, 1.0}}, {{1.0}, {1.0}});
    const auto scan = quantile_regret_scan(tp, 0.3);
    CHECK(scan.rules_scanned == 2);
    CHECK(scan.min_max_regret == doctest::Approx(1.0));
  }
  SUBCASE("matches brute force on random instances") {
    std::mt19937 rng(55);
    for (int rep = 0; rep < 20; ++rep) {
      const auto tp = testing::random_treatment_problem(rng, 7);
      const double lambda = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
      const auto scan = quantile_regret_scan(tp, lambda);
      // Brute force oracle over all masks.
      double best = 1e300;
      for (const auto& rule : all_test_rules(tp.num_sample_points())) {
        double worst = 0.0;
        for (std::size_t s = 0; s < tp.num_states(); ++s) {
          const auto& st = tp.states()[s];
          if (error_probability(tp, rule, s) >= lambda)
            worst = std::max(worst, std::fabs(st.beta - st.alpha));
        }
        best = std::min(best, worst);
      }
      CHECK(scan.min_max_regret == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("enumeration refuses beyond the capacity bound") {
  CHECK_THROWS_AS(all_test_rules(23), capacity_error);
  std::vector<TreatmentState> states = {{"a", 1.0, 0.0}, {"b", 0.0, 1.0}};
  const auto tp = TreatmentProblem::binomial(states, 22, {0.3, 0.7});  // 23 sample points
  CHECK_THROWS_AS(quantile_regret_scan(tp, 0.5), capacity_error);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(TreatmentProblem({{"a", 1.0, 0.0}, {"b", 2.0, 1.0}}, {{1.0}, {1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TreatmentProblem({{"a", 1.0, 0.0}, {"b", 0.0, 1.0}}, {{0.9, 0.2}, {1.0, 0.0}}),
                  std::invalid_argument);
  Matrix bad_metric = {{0.0, 1.0}, {2.0, 0.0}};
  CHECK_THROWS_AS(TreatmentProblem({{"a", 1.0, 0.0}, {"b", 0.0, 1.0}},
                                   {{0.5, 0.5}, {0.5, 0.5}}, {}, bad_metric),
                  std::invalid_argument);
}
