#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "qmatfun/resources.hpp"

using namespace qmatfun;

TEST_CASE("formula registry is populated and sorted") {
  std::vector<std::string> ids = cost_formula_ids();
  CHECK(ids.size() == 25);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  for (const char* want :
       {"divergence_route1_purification_total", "divergence_route2_sample_total",
        "sample_repetitions", "gamma_encoding", "mean_total", "invert_degree",
        "log_rule_size"}) {
    CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());
  }
}

TEST_CASE("closed forms evaluate to hand-computed values") {
  CostFormula inv = evaluate_cost("invert_degree", {{"kappa", 10}, {"eps", 1e-6}});
  CHECK(inv.value == doctest::Approx(10.0 * std::log(1e6)).epsilon(1e-12));

  CostFormula rule =
      evaluate_cost("log_rule_size", {{"beta", 1.0 / 16.0}, {"eps", 1e-6}});
  CHECK(rule.value ==
        doctest::Approx(std::log(16.0) * std::log(1e6)).epsilon(1e-12));

  CostFormula node = evaluate_cost(
      "mean_mixture_total",
      {{"C_A", 10}, {"C_B", 10}, {"delta", 0.1}, {"eps", 1e-4}, {"m", 32}});
  const double le = std::log(1e4);
  CHECK(node.value == doctest::Approx(32.0 * 20.0 / 0.01 * le * le)
                          .epsilon(1e-12));

  // The clamped log keeps loose tolerances from zeroing a formula.
  CostFormula loose = evaluate_cost("invert_degree", {{"kappa", 2}, {"eps", 0.5}});
  CHECK(loose.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("every formula is positive and monotone in eps") {
  const std::map<std::string, double> base = {
      {"T", 4},       {"N", 8},          {"kappa_sigma", 8},
      {"kappa_gamma", 32}, {"eps", 1e-3}, {"C_sigma", 11},
      {"C_rho", 11},  {"kappa_tau", 16}, {"T_sigma", 4},
      {"T_g", 100},   {"C_A", 10},       {"C_B", 10},
      {"delta", 0.1}, {"m", 32},         {"kappa", 10},
      {"c", 0.5},     {"alpha", 2},      {"gamma", 12},
      {"beta", 0.01}};
  for (const std::string& id : cost_formula_ids()) {
    CostFormula f = evaluate_cost(id, base);
    CHECK(f.value > 0.0);
    std::map<std::string, double> tighter = base;
    tighter["eps"] = 1e-4;
    CHECK(evaluate_cost(id, tighter).value >= f.value);
  }
}

TEST_CASE("only required inputs are recorded") {
  CostFormula f = evaluate_cost(
      "invert_degree", {{"kappa", 10}, {"eps", 1e-6}, {"unrelated", 3}});
  CHECK(f.inputs.size() == 2);
  CHECK(f.inputs.count("unrelated") == 0);
}

TEST_CASE("input validation enforces the documented ranges") {
  CHECK_THROWS_AS(evaluate_cost("nope", {}), ParameterError);
  CHECK_THROWS_AS(evaluate_cost("invert_degree", {{"kappa", 10}}),
                  ParameterError);
  CHECK_THROWS_AS(
      evaluate_cost("invert_degree", {{"kappa", 10}, {"eps", 0.7}}),
      ParameterError);
  CHECK_THROWS_AS(
      evaluate_cost("invert_degree", {{"kappa", 0.5}, {"eps", 1e-3}}),
      ParameterError);
  CHECK_THROWS_AS(
      evaluate_cost("mean_total",
                    {{"C_A", 10}, {"C_B", 10}, {"delta", 1.5}, {"eps", 1e-3}}),
      ParameterError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(
      evaluate_cost("invert_degree", {{"kappa", nan}, {"eps", 1e-3}}),
      ParameterError);
}

TEST_CASE("scale factors come from the exponent table exactly") {
  CostFormula r1 = divergence_cost("route1", "purification", 8, 32, 1e-3, 8, 4);
  CHECK(r1.scale_factor("kappa_gamma", 2.0) == 2.0);
  CHECK(r1.scale_factor("kappa_sigma", 2.0) == 4.0);
  CHECK(r1.scale_factor("eps", 0.5) == 2.0);
  CHECK(r1.scale_factor("N", 2.0) == 1.0);  // only a log factor, no entry

  CostFormula r2 = divergence_cost("route2", "purification", 8, 32, 1e-3, 8, 4);
  CHECK(r2.scale_factor("kappa_gamma", 2.0) == 4.0);

  CostFormula reps = evaluate_cost(
      "sample_repetitions",
      {{"kappa_sigma", 8}, {"kappa_gamma", 32}, {"eps", 1e-2}});
  CHECK(reps.scale_factor("eps", 0.5) == 4.0);

  CostFormula mt = mean_cost(10, 10, 0.2, 1e-4);
  CHECK(mt.scale_factor("delta", 0.5) == 8.0);

  CHECK_THROWS_AS(r1.scale_factor("eps", 0.0), ParameterError);
}

TEST_CASE("dispatch helpers select the matching total formula") {
  CostFormula direct = evaluate_cost(
      "divergence_route1_sample_total",
      {{"N", 8}, {"kappa_sigma", 8}, {"kappa_gamma", 32}, {"eps", 1e-3}});
  CostFormula via =
      divergence_cost("route1", "sample_emulated", 8, 32, 1e-3, 8, 4);
  CHECK(via.value == direct.value);
  CHECK_THROWS_AS(divergence_cost("route3", "purification", 8, 32, 1e-3, 8, 4),
                  ParameterError);
  CHECK_THROWS_AS(divergence_cost("route1", "telepathy", 8, 32, 1e-3, 8, 4),
                  ParameterError);

  CostFormula mt = mean_cost(10, 10, 0.2, 1e-4);
  CostFormula md = evaluate_cost(
      "mean_total", {{"C_A", 10}, {"C_B", 10}, {"delta", 0.2}, {"eps", 1e-4}});
  CHECK(mt.value == md.value);
}

TEST_CASE("cost tables render predictions next to measurements") {
  CostObservation obs;
  obs.formula_id = "invert_degree";
  obs.inputs = {{"kappa", 10}, {"eps", 1e-6}};
  obs.measured = 150.0;
  const std::string table = cost_table({obs});
  CHECK(table.find("invert_degree") != std::string::npos);
  CHECK(table.find("ratio") != std::string::npos);
  CHECK(table.find("kappa=10") != std::string::npos);

  CostFormula f = evaluate_cost(obs.formula_id, obs.inputs);
  CHECK(f.to_text().find("inversion transform degree") != std::string::npos);
}
