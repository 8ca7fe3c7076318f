#include "sdd/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sdd {

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& message) {
  throw std::invalid_argument(ctx + ": " + message);
}

// Re-throws a validation error with the context prefixed exactly once.
[[noreturn]] void fail_wrap(const std::string& ctx, const std::exception& e) {
  const std::string what = e.what();
  if (what.rfind(ctx, 0) == 0) throw std::invalid_argument(what);
  throw std::invalid_argument(ctx + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object with field '" + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) fail(ctx, "missing field '" + key + "'");
  return *it;
}

std::vector<std::string> string_array(const json& j, const std::string& field,
                                      const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "field '" + field + "' must be an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) fail(ctx, "field '" + field + "' must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

double number(const json& j, const std::string& field, const std::string& ctx) {
  if (!j.is_number()) fail(ctx, "field '" + field + "' must be a number");
  return j.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& field,
                                 const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      fail(ctx, "field '" + field + "' entry " + std::to_string(i) + " must be a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Matrix matrix(const json& j, const std::string& field, const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "field '" + field + "' must be a 2-D array");
  Matrix out;
  out.reserve(j.size());
  for (std::size_t r = 0; r < j.size(); ++r)
    out.push_back(number_array(j[r], field + "[" + std::to_string(r) + "]", ctx));
  return out;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

DecisionProblem problem_from_json(const json& j, const std::string& ctx) {
  auto states = string_array(require(j, "states", ctx), "states", ctx);
  auto sample_points = string_array(require(j, "sample_points", ctx), "sample_points", ctx);
  auto actions = string_array(require(j, "actions", ctx), "actions", ctx);
  auto loss = matrix(require(j, "loss", ctx), "loss", ctx);
  auto sampling = matrix(require(j, "sampling", ctx), "sampling", ctx);
  try {
    return DecisionProblem(std::move(states), std::move(sample_points), std::move(actions),
                           std::move(loss), std::move(sampling));
  } catch (const std::exception& e) {
    fail_wrap(ctx, e);
  }
}

json to_json(const DecisionProblem& problem) {
  return json{{"states", problem.states},
              {"sample_points", problem.sample_points},
              {"actions", problem.actions},
              {"loss", problem.loss},
              {"sampling", problem.sampling}};
}

std::vector<DecisionRule> rules_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) fail(ctx, "expected a rule (2-D array) or array of rules");
  const bool single = j[0].is_array() && !j[0].empty() && j[0][0].is_number();
  std::vector<DecisionRule> rules;
  auto parse_one = [&ctx](const json& r, const std::string& label) {
    try {
      return DecisionRule(matrix(r, label, ctx));
    } catch (const std::invalid_argument& e) {
      fail_wrap(ctx, e);
    }
  };
  if (single) {
    rules.push_back(parse_one(j, "rule"));
  } else {
    for (std::size_t i = 0; i < j.size(); ++i)
      rules.push_back(parse_one(j[i], "rule[" + std::to_string(i) + "]"));
  }
  return rules;
}

json to_json(const DecisionRule& rule) { return json(rule.allocation); }

Prior prior_from_json(const json& j, const std::string& ctx) {
  try {
    return Prior(number_array(j, "prior", ctx));
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
}

CriterionSpec criterion_spec_from_json(const json& j, const std::string& ctx) {
  CriterionSpec spec;
  const json& kind = require(j, "kind", ctx);
  if (!kind.is_string()) fail(ctx, "field 'kind' must be a string");
  try {
    spec.kind = criterion_kind_from_string(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
  if (j.contains("lambda")) spec.lambda = number(j["lambda"], "lambda", ctx);
  if (j.contains("prior")) spec.prior = prior_from_json(j["prior"], ctx);
  return spec;
}

json to_json(const CriterionResult& result) {
  return json{{"optimal_rules", result.optimal_rules},
              {"value", result.value},
              {"per_rule_values", result.per_rule_values}};
}

json to_json(const DominanceVerdict& verdict) {
  json j{{"relation", to_string(verdict.relation)}};
  if (verdict.witness) j["witness"] = *verdict.witness;
  return j;
}

json to_json(const AdmissibilityReport& report) {
  json inadmissible = json::array();
  for (const InadmissibilityCertificate& c : report.inadmissible) {
    inadmissible.push_back(json{{"rule", c.rule},
                                {"dominated_by", c.dominated_by},
                                {"state", c.state},
                                {"witness", c.witness}});
  }
  return json{{"admissible", report.admissible},
              {"inadmissible", inadmissible},
              {"equivalence_groups", report.equivalence_groups}};
}

TreatmentProblem treatment_from_json(const json& j, const std::string& ctx) {
  const json& states_json = require(j, "states", ctx);
  if (!states_json.is_array() || states_json.empty())
    fail(ctx, "field 'states' must be a non-empty array");
  std::vector<TreatmentState> states;
  states.reserve(states_json.size());
  for (std::size_t s = 0; s < states_json.size(); ++s) {
    const json& st = states_json[s];
    const std::string label_ctx = ctx + " states[" + std::to_string(s) + "]";
    TreatmentState state;
    if (st.contains("label")) {
      if (!st["label"].is_string()) fail(label_ctx, "field 'label' must be a string");
      state.label = st["label"].get<std::string>();
    } else {
      state.label = "s" + std::to_string(s);
    }
    state.alpha = number(require(st, "alpha", label_ctx), "alpha", label_ctx);
    state.beta = number(require(st, "beta", label_ctx), "beta", label_ctx);
    states.push_back(std::move(state));
  }

  std::optional<Matrix> metric;
  if (j.contains("metric")) metric = matrix(j["metric"], "metric", ctx);

  try {
    if (j.contains("binomial")) {
      const json& b = j["binomial"];
      const double n = number(require(b, "n", ctx), "binomial.n", ctx);
      auto p = number_array(require(b, "p_by_state", ctx), "binomial.p_by_state", ctx);
      if (n < 0 || n != std::floor(n)) fail(ctx, "field 'binomial.n' must be a non-negative integer");
      return TreatmentProblem::binomial(std::move(states), static_cast<int>(n), p,
                                        std::move(metric));
    }
    auto sampling = matrix(require(j, "sampling", ctx), "sampling", ctx);
    std::vector<std::string> sample_points;
    if (j.contains("sample_points"))
      sample_points = string_array(j["sample_points"], "sample_points", ctx);
    return TreatmentProblem(std::move(states), std::move(sampling), std::move(sample_points),
                            std::move(metric));
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
}

json to_json(const TreatmentProblem& tp) {
  json states = json::array();
  for (const TreatmentState& st : tp.states())
    states.push_back(json{{"label", st.label}, {"alpha", st.alpha}, {"beta", st.beta}});
  json j{{"states", states}, {"sample_points", tp.sample_points()}, {"sampling", tp.sampling()}};
  if (tp.metric()) j["metric"] = *tp.metric();
  return j;
}

std::vector<TestRule> test_rules_from_json(const json& j, const std::string& ctx) {
  auto parse_one = [&ctx](const json& r, const std::string& label) {
    TestRule rule;
    const json& accept = require(r, "accept_b", ctx + " " + label);
    if (!accept.is_array()) fail(ctx, label + ": field 'accept_b' must be an array of indices");
    for (const auto& e : accept) {
      if (!e.is_number_unsigned()) fail(ctx, label + ": 'accept_b' entries must be indices");
      rule.accept_b.push_back(e.get<std::size_t>());
    }
    std::sort(rule.accept_b.begin(), rule.accept_b.end());
    rule.accept_b.erase(std::unique(rule.accept_b.begin(), rule.accept_b.end()),
                        rule.accept_b.end());
    return rule;
  };
  std::vector<TestRule> rules;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      rules.push_back(parse_one(j[i], "rule[" + std::to_string(i) + "]"));
  } else {
    rules.push_back(parse_one(j, "rule"));
  }
  return rules;
}

json to_json(const TestRule& rule) { return json{{"accept_b", rule.accept_b}}; }

GridFamily family_from_json(const json& j, const std::string& ctx) {
  try {
    if (j.contains("normal_family")) {
      const json& nf = j["normal_family"];
      auto mus = number_array(require(nf, "mus", ctx), "normal_family.mus", ctx);
      const double sigma = number(require(nf, "sigma", ctx), "normal_family.sigma", ctx);
      const json& ref = require(nf, "reference", ctx);
      if (!ref.is_number_unsigned()) fail(ctx, "field 'normal_family.reference' must be an index");
      std::size_t points = GridFamily::kDefaultGridPoints;
      if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("points")) {
          if (!g["points"].is_number_unsigned()) fail(ctx, "field 'grid.points' must be an integer");
          points = g["points"].get<std::size_t>();
        }
      }
      return GridFamily::normal_location(mus, sigma, ref.get<std::size_t>(), points);
    }
    auto grid = number_array(require(j, "grid", ctx), "grid", ctx);
    auto densities = matrix(require(j, "densities", ctx), "densities", ctx);
    const json& ref = require(j, "reference", ctx);
    if (!ref.is_number_unsigned()) fail(ctx, "field 'reference' must be an index");
    return GridFamily(std::move(grid), std::move(densities), ref.get<std::size_t>());
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
}

DosePayoff payoff_from_json(const json& j, const std::string& ctx) {
  const json& bounds = require(j, "action_bounds", ctx);
  auto b = number_array(bounds, "action_bounds", ctx);
  if (b.size() != 2) fail(ctx, "field 'action_bounds' must have two entries");
  const json& states_json = require(j, "states", ctx);
  if (!states_json.is_array()) fail(ctx, "field 'states' must be an array");
  std::vector<StatePayoff> per_state;
  per_state.reserve(states_json.size());
  for (std::size_t s = 0; s < states_json.size(); ++s) {
    const json& st = states_json[s];
    const std::string state_ctx = ctx + " states[" + std::to_string(s) + "]";
    if (st.contains("linear")) {
      const json& lin = st["linear"];
      per_state.push_back(LinearPayoff{number(require(lin, "b", state_ctx), "b", state_ctx),
                                       number(require(lin, "c", state_ctx), "c", state_ctx)});
    } else {
      TabulatedPayoff tab;
      tab.actions = number_array(require(st, "actions", state_ctx), "actions", state_ctx);
      tab.values = number_array(require(st, "values", state_ctx), "values", state_ctx);
      per_state.push_back(std::move(tab));
    }
  }
  try {
    return DosePayoff(b[0], b[1], std::move(per_state));
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
}

RandomizedDoseRule dose_rule_from_json(const json& j, std::size_t grid_points,
                                       const std::string& ctx) {
  try {
    if (j.contains("deterministic")) {
      auto values = number_array(j["deterministic"], "deterministic", ctx);
      if (values.size() != grid_points)
        fail(ctx, "deterministic rule covers " + std::to_string(values.size()) +
                      " grid points, family has " + std::to_string(grid_points));
      return RandomizedDoseRule::deterministic(values);
    }
    return RandomizedDoseRule(matrix(require(j, "values", ctx), "values", ctx));
  } catch (const std::invalid_argument& e) {
    fail_wrap(ctx, e);
  }
}

json to_json(const MlrStateReport& report) {
  return json{{"required", report.required},
              {"holds", report.holds},
              {"worst_violation", report.worst_violation},
              {"unverifiable_points", report.unverifiable_points}};
}

json to_json(const RearrangementReport& report) {
  json states = json::array();
  for (const RearrangementStateCheck& c : report.states) {
    json state = to_json(c.verdict);
    state["dominates_within_slack"] = c.dominates_within_slack;
    state["worst_violation"] = c.worst_violation;
    state["mlr_verified"] = c.mlr_verified;
    states.push_back(std::move(state));
  }
  return json{{"slack", report.slack}, {"states", states}};
}

}  // namespace sdd
