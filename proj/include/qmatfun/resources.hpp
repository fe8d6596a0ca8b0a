#pragma once

// Closed-form cost predictions for the pipelines and their primitives, with
// unit big-O constants, plus reconciliation of predictions against measured
// query ledgers.  Every logarithm is natural and clamped below at 1, so each
// formula is positive and nonincreasing in eps.

#include <map>
#include <string>
#include <vector>

#include "qmatfun/common.hpp"

namespace qmatfun {

struct CostFormula {
  std::string id;
  std::map<std::string, double> inputs;
  double value = 0.0;
  // Leading-order scaling exponents: doubling input v multiplies the value
  // by about 2^exponents[v] (log factors excluded).
  std::map<std::string, double> exponents;
  std::string citation;

  // Predicted multiplicative change when one input is scaled, per the
  // exponent table.
  double scale_factor(const std::string& var, double multiplier) const;
  std::string to_text() const;
};

// All registered formula identifiers, sorted.
std::vector<std::string> cost_formula_ids();

// Evaluate a registered formula; ParameterError for unknown ids, missing
// inputs, or out-of-range values (eps in (0, 1/2], delta/beta/c in (0, 1],
// everything else >= 1).
CostFormula evaluate_cost(const std::string& id,
                          const std::map<std::string, double>& inputs);

// End-to-end divergence cost for route in {route1, route2} and access in
// {purification, sample_emulated}.
CostFormula divergence_cost(const std::string& route, const std::string& access,
                            double kappa_sigma, double kappa_gamma, double eps,
                            double n, double t);

// End-to-end operator-mean cost.
CostFormula mean_cost(double c_a, double c_b, double delta, double eps);

struct CostObservation {
  std::string formula_id;
  std::map<std::string, double> inputs;
  double measured = 0.0;
};

// Text table: formula id, inputs, predicted, measured, measured/predicted.
std::string cost_table(const std::vector<CostObservation>& rows);

}  // namespace qmatfun
