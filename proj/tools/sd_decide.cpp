// Command-line front door: JSON problem files in, JSON reports plus CSV/SVG
// renderings out.  Core modules work in loss terms; the treatment subcommand
// reports welfare and performs the sign handling at this boundary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdd/criteria.hpp"
#include "sdd/decision.hpp"
#include "sdd/dominance.hpp"
#include "sdd/figure.hpp"
#include "sdd/json_io.hpp"
#include "sdd/monotone.hpp"
#include "sdd/stein.hpp"
#include "sdd/treatment.hpp"
#include "sdd/version.hpp"

namespace {

using sdd::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& subcommand, const std::vector<std::string>& inputs,
              json parameters) {
  return json{{"tool", sdd::kToolName},
              {"version", sdd::kToolVersion},
              {"subcommand", subcommand},
              {"inputs", inputs},
              {"parameters", std::move(parameters)},
              {"generated_at", utc_timestamp()}};
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    sdd::write_json_file(out_path, j);
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

// ---------------------------------------------------------------------------
// validate

int run_validate(const std::string& path) {
  const json j = sdd::load_json_file(path);
  json summary{{"file", path}};

  if (j.is_object() && j.contains("loss") && j.contains("sampling")) {
    // Itemize every violation instead of stopping at the first.
    std::vector<std::string> issues;
    try {
      const auto problem = sdd::problem_from_json(j, path);
      summary["kind"] = "decision_problem";
      summary["states"] = problem.num_states();
      summary["sample_points"] = problem.num_sample_points();
      summary["actions"] = problem.num_actions();
    } catch (const std::exception& first) {
      issues.push_back(first.what());
      if (j.contains("sampling") && j["sampling"].is_array()) {
        for (std::size_t r = 0; r < j["sampling"].size(); ++r) {
          const auto& row = j["sampling"][r];
          if (!row.is_array()) continue;
          double total = 0.0;
          bool negative = false;
          for (const auto& x : row) {
            if (!x.is_number()) continue;
            total += x.get<double>();
            negative |= x.get<double>() < 0.0;
          }
          if (std::fabs(total - 1.0) > 1e-9)
            issues.push_back(path + ": sampling row " + std::to_string(r) + " sums to " +
                             fmt17(total));
          if (negative)
            issues.push_back(path + ": sampling row " + std::to_string(r) +
                             " has a negative entry");
        }
      }
      if (j.contains("loss") && j["loss"].is_array()) {
        for (std::size_t r = 0; r < j["loss"].size(); ++r) {
          const auto& row = j["loss"][r];
          if (!row.is_array()) continue;
          for (const auto& x : row) {
            if (x.is_number() && x.get<double>() < 0.0) {
              issues.push_back(path + ": loss row " + std::to_string(r) +
                               " has a negative entry");
              break;
            }
          }
        }
      }
    }
    if (!issues.empty()) {
      for (const auto& issue : issues) std::cerr << "error: " << issue << '\n';
      return 1;
    }
  } else if (j.is_object() && j.contains("states") && (j.contains("binomial") ||
                                                       (j["states"].is_array() &&
                                                        !j["states"].empty() &&
                                                        j["states"][0].is_object()))) {
    const auto tp = sdd::treatment_from_json(j, path);
    summary["kind"] = "treatment_problem";
    summary["states"] = tp.num_states();
    summary["sample_points"] = tp.num_sample_points();
    summary["has_metric"] = tp.metric().has_value();
  } else if (j.is_object() && (j.contains("densities") || j.contains("normal_family"))) {
    const auto family = sdd::family_from_json(j, path);
    summary["kind"] = "grid_family";
    summary["states"] = family.num_states();
    summary["grid_points"] = family.num_points();
    summary["reference"] = family.reference_state();
  } else if (j.is_object() && j.contains("action_bounds")) {
    const auto payoff = sdd::payoff_from_json(j, path);
    summary["kind"] = "dose_payoff";
    summary["states"] = payoff.num_states();
  } else if (j.is_object() && j.contains("accept_b")) {
    const auto rules = sdd::test_rules_from_json(j, path);
    summary["kind"] = "test_rule";
    summary["rules"] = rules.size();
  } else if (j.is_array()) {
    const auto rules = sdd::rules_from_json(j, path);
    summary["kind"] = "decision_rules";
    summary["rules"] = rules.size();
    summary["sample_points"] = rules.front().num_sample_points();
    summary["actions"] = rules.front().num_actions();
  } else {
    throw std::invalid_argument(path + ": unrecognized file shape");
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// admissibility / criteria

int run_admissibility(const std::string& problem_path, const std::string& rules_path,
                      const std::string& mode, const std::string& out_path) {
  const auto problem = sdd::problem_from_json(sdd::load_json_file(problem_path), problem_path);
  const auto rules = sdd::rules_from_json(sdd::load_json_file(rules_path), rules_path);
  const auto report = mode == "mean" ? sdd::mean_admissible_set(problem, rules)
                                     : sdd::sd_admissible_set(problem, rules);
  json out = sdd::to_json(report);
  out["mode"] = mode;
  out["orientation"] = "loss (lower is better)";
  out["manifest"] = manifest("admissibility", {problem_path, rules_path}, json{{"mode", mode}});
  emit(out, out_path);
  return 0;
}

int run_criteria(const std::string& problem_path, const std::string& rules_path,
                 const std::string& spec_path, const std::string& out_path) {
  const auto problem = sdd::problem_from_json(sdd::load_json_file(problem_path), problem_path);
  const auto rules = sdd::rules_from_json(sdd::load_json_file(rules_path), rules_path);
  const json spec_json = sdd::load_json_file(spec_path);
  const auto spec = sdd::criterion_spec_from_json(spec_json, spec_path);
  const auto result = sdd::solve(problem, rules, spec);
  json out = sdd::to_json(result);
  out["kind"] = sdd::to_string(spec.kind);
  if (spec.lambda) out["lambda"] = *spec.lambda;
  if (spec.prior) out["prior"] = spec.prior->weights;
  out["orientation"] = "loss (lower is better)";
  out["manifest"] = manifest("criteria", {problem_path, rules_path, spec_path},
                             json{{"spec", spec_json}});
  emit(out, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// treatment

int run_treatment(const std::string& problem_path, const std::string& rules_path, bool enumerate,
                  const std::string& criterion, const std::string& mode,
                  std::optional<double> lambda, bool scan_regret, const std::string& out_path) {
  const auto tp = sdd::treatment_from_json(sdd::load_json_file(problem_path), problem_path);

  std::vector<sdd::TestRule> rules;
  if (enumerate) {
    rules = sdd::all_test_rules(tp.num_sample_points());
  } else if (!rules_path.empty()) {
    rules = sdd::test_rules_from_json(sdd::load_json_file(rules_path), rules_path);
  }

  json out;
  out["orientation"] = "welfare (higher is better)";
  std::vector<std::string> inputs = {problem_path};
  if (!rules_path.empty()) inputs.push_back(rules_path);

  if (!rules.empty()) {
    json rules_json = json::array();
    json errors = json::array();
    for (const auto& rule : rules) {
      rules_json.push_back(sdd::to_json(rule));
      json row = json::array();
      for (std::size_t s = 0; s < tp.num_states(); ++s)
        row.push_back(sdd::error_probability(tp, rule, s));
      errors.push_back(std::move(row));
    }
    out["rules"] = std::move(rules_json);
    out["error_probabilities"] = std::move(errors);
    out["admissibility"] = sdd::to_json(sdd::test_rule_admissibility(tp, rules));
  }

  if (!criterion.empty()) {
    if (rules.empty())
      throw std::invalid_argument("treatment: --criterion needs --rules or --enumerate");
    const auto welfare_mode =
        mode == "quantile" ? sdd::WelfareMode::Quantile : sdd::WelfareMode::Mean;
    const auto result = criterion == "maximin"
                            ? sdd::maximin(tp, rules, welfare_mode, lambda)
                            : sdd::minimax_regret(tp, rules, welfare_mode, lambda);
    json r = sdd::to_json(result);
    r["criterion"] = criterion;
    r["mode"] = mode;
    if (lambda) r["lambda"] = *lambda;
    out["criterion_result"] = std::move(r);
  }

  if (scan_regret) {
    if (!lambda) throw std::invalid_argument("treatment: --scan-regret needs --lambda");
    const auto scan = sdd::quantile_regret_scan(tp, *lambda);
    json attaining = json::array();
    for (std::uint32_t mask : scan.attaining_masks)
      attaining.push_back(sdd::to_json(sdd::TestRule::from_mask(mask, tp.num_sample_points())));
    out["scan"] = json{{"lambda", *lambda},
                       {"min_max_regret", scan.min_max_regret},
                       {"rules_scanned", scan.rules_scanned},
                       {"attaining_rules", std::move(attaining)},
                       {"note", "exhaustive over all test rules on the given finite state set"}};
  }

  json params{{"criterion", criterion}, {"mode", mode}, {"enumerate", enumerate},
              {"scan_regret", scan_regret}};
  if (lambda) params["lambda"] = *lambda;
  out["manifest"] = manifest("treatment", inputs, std::move(params));
  emit(out, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// monotone

int run_monotone(const std::string& family_path, const std::string& rule_path,
                 const std::string& payoff_path, const std::string& out_prefix) {
  const auto family = sdd::family_from_json(sdd::load_json_file(family_path), family_path);
  const auto payoff = sdd::payoff_from_json(sdd::load_json_file(payoff_path), payoff_path);
  const auto rule =
      sdd::dose_rule_from_json(sdd::load_json_file(rule_path), family.num_points(), rule_path);

  const auto mlr = sdd::verify_mlr(family, payoff);
  const auto report = sdd::check_rearrangement_dominance(rule, family, payoff);

  json out = sdd::to_json(report);
  json mlr_json = json::array();
  for (const auto& state_report : mlr) mlr_json.push_back(sdd::to_json(state_report));
  out["mlr"] = std::move(mlr_json);
  out["manifest"] =
      manifest("monotone", {family_path, rule_path, payoff_path}, json::object());

  // CSV: original rule (v-averaged) next to its rearrangement.
  std::string csv = "psi,rule_mean_action,rearranged_action\n";
  for (std::size_t i = 0; i < family.num_points(); ++i) {
    double mean_action = 0.0;
    for (double v : rule.values[i]) mean_action += v;
    mean_action /= static_cast<double>(rule.num_v_points());
    csv += fmt17(family.grid()[i]) + "," + fmt17(mean_action) + "," +
           fmt17(report.rearranged[i]) + "\n";
  }
  write_text_file(out_prefix + "_rule.csv", csv);
  emit(out, out_prefix + "_report.json");
  return 0;
}

// ---------------------------------------------------------------------------
// stein

int run_stein(const std::string& theta_arg, std::uint64_t draws, std::uint64_t seed,
              bool paper_scale, const std::string& out_prefix) {
  sdd::SteinConfig config;
  config.seed = seed;
  config.draws = paper_scale ? 100'000'000ull : draws;
  {
    std::stringstream ss(theta_arg);
    std::string token;
    std::vector<double> parts;
    while (std::getline(ss, token, ',')) parts.push_back(std::stod(token));
    if (parts.size() != 3)
      throw std::invalid_argument("--theta expects three comma-separated numbers");
    config.theta = {parts[0], parts[1], parts[2]};
  }
  const bool at_origin =
      config.theta[0] == 0.0 && config.theta[1] == 0.0 && config.theta[2] == 0.0;

  const auto sim = sdd::simulate(config);
  const auto& mle = sim.run(sdd::Estimator::Mle);
  const auto& js = sim.run(sdd::Estimator::Js);
  const auto& jspp = sim.run(sdd::Estimator::Jspp);

  // CSV over the histogram bin edges; exact oracle columns at theta = 0.
  const std::size_t bins = sdd::EmpiricalCdf::kHistogramBins;
  const double width = sdd::EmpiricalCdf::kHistogramHi / static_cast<double>(bins);
  std::string csv = "t,cdf_mle,cdf_js,cdf_jspp";
  if (at_origin) csv += ",exact_mle,exact_js,exact_jspp";
  csv += "\n";
  std::vector<sdd::Series> curves(at_origin ? 6 : 3);
  const char* names[] = {"mle", "js", "jspp", "exact mle", "exact js", "exact jspp"};
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9ecae1", "#ff9896", "#98df8a"};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    curves[c].name = names[c];
    curves[c].color = colors[c];
  }
  for (std::size_t i = 0; i <= bins; ++i) {
    const double t = width * static_cast<double>(i);
    const double values[3] = {mle.cdf.cdf(t), js.cdf.cdf(t), jspp.cdf.cdf(t)};
    csv += fmt17(t);
    for (double v : values) csv += "," + fmt17(v);
    for (std::size_t c = 0; c < 3; ++c) curves[c].points.emplace_back(t, values[c]);
    if (at_origin) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double e = sdd::theta0_exact_cdf(static_cast<sdd::Estimator>(c), t);
        csv += "," + fmt17(e);
        curves[3 + c].points.emplace_back(t, e);
      }
    }
    csv += "\n";
  }
  write_text_file(out_prefix + "_cdf.csv", csv);

  // Two panels mirroring the loss ranges of interest.
  sdd::Panel left{"loss CDF on [0, 15]", 0.0, 15.0, 0.0, 1.0, curves};
  double y_lo = 1.0;
  for (const auto& s : curves)
    for (const auto& [x, y] : s.points)
      if (x >= 5.0 && y < y_lo) y_lo = y;
  sdd::Panel right{"upper quantiles on [5, 20]", 5.0, 20.0, y_lo, 1.0, curves};
  write_text_file(out_prefix + "_figure.svg", sdd::render_svg({left, right}));

  // Report: moments, crossings, dominance verdicts.
  json report;
  report["theta"] = config.theta;
  report["draws"] = config.draws;
  report["seed"] = config.seed;
  for (const auto* run : {&mle, &js, &jspp}) {
    report["estimators"][sdd::to_string(run->kind)] = json{
        {"mean_loss", run->mean_loss},
        {"std_error", run->std_error()},
        {"count", run->cdf.count()}};
  }

  sdd::CrossingScanOptions noisy;
  noisy.zero_band = 5.0 * std::sqrt(0.01 / static_cast<double>(config.draws));
  noisy.scan_points = 601;
  const auto crossing_to_json = [](const sdd::CrossingReport& r) {
    json arr = json::array();
    for (const auto& c : r.crossings)
      arr.push_back(json{{"lo", c.lo},
                         {"hi", c.hi},
                         {"sign_before", c.sign_before},
                         {"sign_after", c.sign_after}});
    return json{{"crossings", arr}, {"uniform_sign", r.uniform_sign}};
  };
  report["crossing"]["js_vs_mle_empirical"] = crossing_to_json(
      sdd::find_crossing([&](double t) { return js.cdf.cdf(t); },
                         [&](double t) { return mle.cdf.cdf(t); }, 5.0, 20.0, noisy));
  if (at_origin) {
    report["crossing"]["js_vs_mle_exact"] = crossing_to_json(sdd::find_crossing(
        [](double t) { return sdd::theta0_exact_cdf(sdd::Estimator::Js, t); },
        [](double t) { return sdd::theta0_exact_cdf(sdd::Estimator::Mle, t); }, 5.0, 20.0));
    report["crossing"]["jspp_vs_mle_exact"] = crossing_to_json(sdd::find_crossing(
        [](double t) { return sdd::theta0_exact_cdf(sdd::Estimator::Jspp, t); },
        [](double t) { return sdd::theta0_exact_cdf(sdd::Estimator::Mle, t); }, 0.0, 50.0));
    for (const auto* run : {&mle, &js, &jspp}) {
      const auto kind = run->kind;
      report["ks_to_exact"][sdd::to_string(kind)] =
          run->cdf.ks_distance([kind](double t) { return sdd::theta0_exact_cdf(kind, t); });
    }
  }
  const auto mle_binned = mle.cdf.binned();
  report["dominance"]["js_vs_mle"] = sdd::to_json(sdd::sd_compare_cdf(js.cdf.binned(), mle_binned));
  report["dominance"]["jspp_vs_mle"] =
      sdd::to_json(sdd::sd_compare_cdf(jspp.cdf.binned(), mle_binned));

  report["manifest"] = manifest("stein", {},
                                json{{"theta", config.theta},
                                     {"draws", config.draws},
                                     {"seed", config.seed},
                                     {"paper_scale", paper_scale}});
  emit(report, out_prefix + "_report.json");
  return 0;
}

const char* kSchemaFooter = R"(File schemas (JSON):
  decision problem   {"states": [..], "sample_points": [..], "actions": [..],
                      "loss": [[state x action]], "sampling": [[state x sample_point]]}
  decision rules     one rule as [[sample_point x action]] row-stochastic matrix,
                     or an array of such rules
  criterion spec     {"kind": "MinimaxRisk|MinimaxRegret|BayesRisk|QuantileMinimax|
                      QuantileMinimaxRegret|HybridQuantileBayes|BayesQuantile",
                      "lambda": 0.25, "prior": [..]} (lambda for quantile kinds,
                      prior for Bayes kinds)
  treatment problem  {"states": [{"label": "..", "alpha": a, "beta": b}, ..],
                      "sampling": [[state x sample_point]] or
                      "binomial": {"n": 10, "p_by_state": [..]},
                      "metric": [[state x state]] (optional)}
  test rules         {"accept_b": [sample point indices]} or an array of such
  grid family        {"grid": [..], "densities": [[state x grid]], "reference": k} or
                     {"grid": {"points": 4001},
                      "normal_family": {"mus": [..], "sigma": 1.0, "reference": k}}
  dose payoff        {"action_bounds": [lo, hi], "states": [{"linear": {"b":, "c":}} |
                      {"actions": [..], "values": [..]}, ..]}
  dose rule          {"values": [[grid x v]]} or {"deterministic": [grid]}

Reports embed a manifest (tool, version, subcommand, inputs, parameters,
timestamp); identical manifests reproduce identical outputs apart from the
timestamp.  SD_DECIDE_THREADS caps simulation parallelism (0 = auto).
Exit codes: 0 success, 1 validation failure, 2 capacity refusal.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical decision analysis under first-order stochastic dominance"};
  app.footer(kSchemaFooter);
  app.require_subcommand(1);

  std::string problem_path, rules_path, spec_path, out_path, mode;
  std::string family_path, payoff_path, rule_path, out_prefix, theta_arg;
  std::string criterion;
  std::optional<double> lambda;
  bool enumerate = false, scan_regret = false, paper_scale = false;
  std::uint64_t draws = 1'000'000, seed = 0;

  auto* validate = app.add_subcommand("validate", "Parse a file and echo its dimensions");
  validate->add_option("file", problem_path, "JSON file to validate")->required();

  auto* admissibility =
      app.add_subcommand("admissibility", "Classify rules by SD or mean admissibility");
  admissibility->add_option("problem", problem_path, "decision problem JSON")->required();
  admissibility->add_option("rules", rules_path, "rule or rule-list JSON")->required();
  admissibility->add_option("--mode", mode, "sd or mean")
      ->default_val("sd")
      ->check(CLI::IsMember({"sd", "mean"}));
  admissibility->add_option("--out", out_path, "write the report here instead of stdout");

  auto* criteria = app.add_subcommand("criteria", "Solve a decision criterion over rules");
  criteria->add_option("problem", problem_path, "decision problem JSON")->required();
  criteria->add_option("rules", rules_path, "rule or rule-list JSON")->required();
  criteria->add_option("spec", spec_path, "criterion spec JSON")->required();
  criteria->add_option("--out", out_path, "write the result here instead of stdout");

  auto* treatment = app.add_subcommand("treatment", "Two-treatment test-rule analysis");
  treatment->add_option("problem", problem_path, "treatment problem JSON")->required();
  treatment->add_option("--rules", rules_path, "test rules JSON");
  treatment->add_flag("--enumerate", enumerate, "use all 2^m test rules as candidates");
  treatment->add_option("--criterion", criterion, "maximin or minimax-regret")
      ->check(CLI::IsMember({"", "maximin", "minimax-regret"}));
  treatment->add_option("--mode", mode, "mean or quantile welfare")
      ->default_val("mean")
      ->check(CLI::IsMember({"mean", "quantile"}));
  treatment->add_option("--lambda", lambda, "quantile level in (0,1)");
  treatment->add_flag("--scan-regret", scan_regret,
                      "exhaustive quantile max-regret scan over all test rules");
  treatment->add_option("--out", out_path, "write the report here instead of stdout");

  auto* monotone = app.add_subcommand("monotone", "Monotone rearrangement analysis");
  monotone->add_option("family", family_path, "grid family JSON")->required();
  monotone->add_option("rule", rule_path, "dose rule JSON")->required();
  monotone->add_option("payoff", payoff_path, "dose payoff JSON")->required();
  monotone->add_option("--out", out_prefix, "output prefix for _report.json and _rule.csv")
      ->required();

  auto* stein = app.add_subcommand("stein", "Shrinkage-estimator loss distribution study");
  stein->add_option("--theta", theta_arg, "mean vector x,y,z")->default_val("0,0,0");
  stein->add_option("--draws", draws, "Monte Carlo draws")->default_val("1000000");
  stein->add_option("--seed", seed, "RNG seed")->default_val("0");
  stein->add_flag("--paper-scale", paper_scale, "use 10^8 draws");
  stein->add_option("--out", out_prefix, "output prefix for _cdf.csv, _figure.svg, _report.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(problem_path);
    if (admissibility->parsed())
      return run_admissibility(problem_path, rules_path, mode, out_path);
    if (criteria->parsed()) return run_criteria(problem_path, rules_path, spec_path, out_path);
    if (treatment->parsed())
      return run_treatment(problem_path, rules_path, enumerate, criterion, mode, lambda,
                           scan_regret, out_path);
    if (monotone->parsed()) return run_monotone(family_path, rule_path, payoff_path, out_prefix);
    if (stein->parsed()) return run_stein(theta_arg, draws, seed, paper_scale, out_prefix);
  } catch (const sdd::capacity_error& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
