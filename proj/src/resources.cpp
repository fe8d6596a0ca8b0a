#include "qmatfun/resources.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

namespace qmatfun {

namespace {

// Clamped natural log: keeps every formula positive and monotone.
double lg(double x) { return std::max(1.0, std::log(x)); }

using Inputs = std::map<std::string, double>;

struct FormulaDef {
  std::vector<std::string> required;
  std::function<double(const Inputs&)> eval;
  std::map<std::string, double> exponents;
  std::string citation;
};

void validate_input(const std::string& key, double v) {
  if (!std::isfinite(v)) {
    throw ParameterError("cost input " + key + " not finite");
  }
  if (key == "eps") {
    if (!(v > 0.0 && v <= 0.5)) {
      throw ParameterError("cost input eps must lie in (0, 1/2], got " +
                           format_g17(v));
    }
  } else if (key == "delta" || key == "beta" || key == "c") {
    if (!(v > 0.0 && v <= 1.0)) {
      throw ParameterError("cost input " + key + " must lie in (0, 1], got " +
                           format_g17(v));
    }
  } else {
    if (!(v >= 1.0)) {
      throw ParameterError("cost input " + key + " must be >= 1, got " +
                           format_g17(v));
    }
  }
}

double in(const Inputs& m, const std::string& key) { return m.at(key); }

// C_sigma kappa_sigma log(1/eps) + C_rho: the conjugated-ratio encoding.
double gamma_enc_cost(const Inputs& m) {
  return in(m, "C_sigma") * in(m, "kappa_sigma") * lg(1.0 / in(m, "eps")) +
         in(m, "C_rho");
}

double mean_x_cost(const Inputs& m) {
  return in(m, "C_A") / in(m, "delta") * lg(1.0 / in(m, "eps")) + in(m, "C_B");
}

const std::map<std::string, FormulaDef>& registry() {
  static const std::map<std::string, FormulaDef> defs = [] {
    std::map<std::string, FormulaDef> r;
    r["divergence_route1_purification_total"] = {
        {"T", "N", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          return (2.0 * in(m, "T") + std::log(in(m, "N"))) *
                 in(m, "kappa_sigma") * in(m, "kappa_sigma") *
                 in(m, "kappa_gamma") * lg(in(m, "kappa_sigma")) *
                 lg(in(m, "kappa_gamma")) / in(m, "eps") * le * le;
        },
        {{"kappa_sigma", 2}, {"kappa_gamma", 1}, {"eps", -1}, {"T", 1}},
        "end-to-end queries, polynomial route, purification access"};
    r["divergence_route2_purification_total"] = {
        {"T", "N", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          const double lkg = lg(in(m, "kappa_gamma"));
          return (2.0 * in(m, "T") + std::log(in(m, "N"))) *
                 std::pow(in(m, "kappa_sigma"), 2) *
                 std::pow(in(m, "kappa_gamma"), 2) * lg(in(m, "kappa_sigma")) *
                 lkg * lkg * lkg / in(m, "eps") * le * le * le * le;
        },
        {{"kappa_sigma", 2}, {"kappa_gamma", 2}, {"eps", -1}, {"T", 1}},
        "end-to-end queries, resolvent route, purification access"};
    r["divergence_route1_sample_total"] = {
        {"N", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          return lg(in(m, "N")) * in(m, "kappa_sigma") *
                 in(m, "kappa_gamma") / (in(m, "eps") * in(m, "eps")) * le *
                 le * le;
        },
        {{"kappa_sigma", 1}, {"kappa_gamma", 1}, {"eps", -2}},
        "end-to-end queries, polynomial route, sample access"};
    r["divergence_route2_sample_total"] = {
        {"N", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          const double lkg = lg(in(m, "kappa_gamma"));
          return lg(in(m, "N")) * in(m, "kappa_sigma") *
                 std::pow(in(m, "kappa_gamma"), 2) * lkg * lkg /
                 (in(m, "eps") * in(m, "eps")) * std::pow(le, 5);
        },
        {{"kappa_sigma", 1}, {"kappa_gamma", 2}, {"eps", -2}},
        "end-to-end queries, resolvent route, sample access"};
    r["sample_repetitions"] = {
        {"kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double ls = lg(4.0 * in(m, "kappa_sigma"));
          const double lk = lg(in(m, "kappa_gamma"));
          return std::pow(in(m, "kappa_sigma"), 2) * ls * ls * lk * lk /
                 (in(m, "eps") * in(m, "eps"));
        },
        {{"kappa_sigma", 2}, {"eps", -2}},
        "trace-estimation repetitions, sample access"};
    r["density_encoding_purification"] = {
        {"T", "N"},
        [](const Inputs& m) { return 2.0 * in(m, "T") + std::log(in(m, "N")); },
        {{"T", 1}},
        "density encoding from a purification"};
    r["density_encoding_sample"] = {
        {"N", "eps"},
        [](const Inputs& m) {
          return lg(in(m, "N")) / (in(m, "eps") * in(m, "eps")) *
                 lg(1.0 / in(m, "eps"));
        },
        {{"eps", -2}},
        "density encoding from independent copies"};
    r["gamma_encoding"] = {
        {"C_sigma", "C_rho", "kappa_sigma", "eps"},
        gamma_enc_cost,
        {{"kappa_sigma", 1}},
        "conjugated-ratio encoding"};
    r["xlogx_route1_encoding"] = {
        {"C_sigma", "C_rho", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          return gamma_enc_cost(m) * in(m, "kappa_gamma") *
                 lg(1.0 / in(m, "eps"));
        },
        {{"kappa_sigma", 1}, {"kappa_gamma", 1}},
        "x log x encoding, polynomial route"};
    r["xlogx_route2_encoding"] = {
        {"C_sigma", "C_rho", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          const double lkg = lg(in(m, "kappa_gamma"));
          return gamma_enc_cost(m) * std::pow(in(m, "kappa_gamma"), 2) * lkg *
                 lkg * le * le * le;
        },
        {{"kappa_sigma", 1}, {"kappa_gamma", 2}},
        "x log x encoding, resolvent route"};
    r["resolvent_node"] = {
        {"C_sigma", "C_rho", "kappa_sigma", "kappa_tau", "eps"},
        [](const Inputs& m) {
          return gamma_enc_cost(m) * in(m, "kappa_tau") *
                 lg(1.0 / in(m, "eps"));
        },
        {{"kappa_tau", 1}},
        "one shifted-inverse node"};
    r["trace_estimation_purification"] = {
        {"T_sigma", "T_g", "eps"},
        [](const Inputs& m) {
          return (in(m, "T_sigma") + in(m, "T_g")) / in(m, "eps");
        },
        {{"eps", -1}},
        "trace estimation, purification access"};
    r["divergence_step4_purification"] = {
        {"T_sigma", "T_g", "kappa_sigma", "kappa_gamma", "eps"},
        [](const Inputs& m) {
          return (in(m, "T_sigma") + in(m, "T_g")) * in(m, "kappa_sigma") *
                 lg(in(m, "kappa_sigma")) * lg(in(m, "kappa_gamma")) /
                 in(m, "eps");
        },
        {{"kappa_sigma", 1}, {"eps", -1}},
        "final estimation step after rescaling"};
    r["trace_estimation_sample"] = {
        {"C_sigma", "T_g", "eps"},
        [](const Inputs& m) {
          return (in(m, "C_sigma") + in(m, "T_g")) /
                 (in(m, "eps") * in(m, "eps"));
        },
        {{"eps", -2}},
        "trace estimation, sample access"};
    r["mean_mixture_node"] = {
        {"C_A", "C_B", "delta", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          return (in(m, "C_A") + in(m, "C_B")) /
                 (in(m, "delta") * in(m, "delta")) * le * le;
        },
        {{"delta", -2}},
        "one weighted-harmonic node"};
    r["mean_mixture_total"] = {
        {"C_A", "C_B", "delta", "eps", "m"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          return in(m, "m") * (in(m, "C_A") + in(m, "C_B")) /
                 (in(m, "delta") * in(m, "delta")) * le * le;
        },
        {{"delta", -2}, {"m", 1}},
        "harmonic-mixture assembly over m nodes"};
    r["mean_stieltjes_x_encoding"] = {
        {"C_A", "C_B", "delta", "eps"},
        mean_x_cost,
        {{"delta", -1}},
        "ratio encoding for the resolvent pipeline"};
    r["mean_stieltjes_node_bound"] = {
        {"C_A", "C_B", "delta", "eps", "m"},
        [](const Inputs& m) {
          return mean_x_cost(m) / (in(m, "delta") * in(m, "delta")) *
                 lg(in(m, "m") / in(m, "eps"));
        },
        {{"delta", -3}},
        "one resolvent node of the mean pipeline"};
    r["mean_stieltjes_assembly"] = {
        {"C_A", "C_B", "delta", "eps", "m"},
        [](const Inputs& m) {
          return in(m, "m") * mean_x_cost(m) /
                 (in(m, "delta") * in(m, "delta")) *
                 lg(in(m, "m") / in(m, "eps"));
        },
        {{"delta", -3}, {"m", 1}},
        "resolvent assembly over m nodes"};
    r["mean_total"] = {
        {"C_A", "C_B", "delta", "eps"},
        [](const Inputs& m) {
          const double le = lg(1.0 / in(m, "eps"));
          const double ll = lg(1.0 / in(m, "eps") * le);
          return mean_x_cost(m) / (in(m, "delta") * in(m, "delta")) * ll * ll;
        },
        {{"delta", -3}},
        "end-to-end operator-mean queries"};
    r["invert_degree"] = {
        {"kappa", "eps"},
        [](const Inputs& m) {
          return in(m, "kappa") * lg(1.0 / in(m, "eps"));
        },
        {{"kappa", 1}},
        "inversion transform degree"};
    r["power_degree"] = {
        {"kappa", "c", "alpha", "eps"},
        [](const Inputs& m) {
          return in(m, "kappa") * (1.0 + in(m, "c")) *
                 lg(in(m, "alpha") / in(m, "eps"));
        },
        {{"kappa", 1}},
        "power transform degree"};
    r["amplify_count"] = {
        {"gamma", "delta", "eps"},
        [](const Inputs& m) {
          return in(m, "gamma") / in(m, "delta") *
                 lg(in(m, "gamma") / in(m, "eps"));
        },
        {{"gamma", 1}, {"delta", -1}},
        "amplification step count"};
    r["qsvt_log_degree"] = {
        {"kappa_gamma", "eps"},
        [](const Inputs& m) {
          return in(m, "kappa_gamma") * lg(1.0 / in(m, "eps"));
        },
        {{"kappa_gamma", 1}},
        "logarithm transform degree"};
    r["log_rule_size"] = {
        {"beta", "eps"},
        [](const Inputs& m) {
          return lg(1.0 / in(m, "beta")) * lg(1.0 / in(m, "eps"));
        },
        {},
        "resolvent rule size for the logarithm"};
    return r;
  }();
  return defs;
}

}  // namespace

double CostFormula::scale_factor(const std::string& var,
                                 double multiplier) const {
  if (!(multiplier > 0.0)) {
    throw ParameterError("scale_factor: multiplier must be > 0");
  }
  auto it = exponents.find(var);
  if (it == exponents.end()) return 1.0;
  return std::pow(multiplier, it->second);
}

std::string CostFormula::to_text() const {
  std::ostringstream os;
  os << id << " = " << format_g17(value) << "  [" << citation << "]\n";
  os << "  inputs:";
  for (const auto& [k, v] : inputs) os << " " << k << "=" << format_g17(v);
  os << "\n  scaling:";
  for (const auto& [k, e] : exponents) os << " " << k << "^" << e;
  os << "\n";
  return os.str();
}

std::vector<std::string> cost_formula_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, def] : registry()) ids.push_back(id);
  return ids;
}

CostFormula evaluate_cost(const std::string& id,
                          const std::map<std::string, double>& inputs) {
  auto it = registry().find(id);
  if (it == registry().end()) {
    throw ParameterError("unknown cost formula '" + id + "'");
  }
  const FormulaDef& def = it->second;
  CostFormula out;
  out.id = id;
  out.exponents = def.exponents;
  out.citation = def.citation;
  for (const std::string& key : def.required) {
    auto found = inputs.find(key);
    if (found == inputs.end()) {
      throw ParameterError("cost formula " + id + " missing input " + key);
    }
    validate_input(key, found->second);
    out.inputs[key] = found->second;
  }
  out.value = def.eval(out.inputs);
  if (!(out.value > 0.0) || !std::isfinite(out.value)) {
    throw ParameterError("cost formula " + id + " evaluated non-positive");
  }
  return out;
}

CostFormula divergence_cost(const std::string& route, const std::string& access,
                            double kappa_sigma, double kappa_gamma, double eps,
                            double n, double t) {
  std::string id;
  if (route == "route1" && access == "purification") {
    id = "divergence_route1_purification_total";
  } else if (route == "route2" && access == "purification") {
    id = "divergence_route2_purification_total";
  } else if (route == "route1" && access == "sample_emulated") {
    id = "divergence_route1_sample_total";
  } else if (route == "route2" && access == "sample_emulated") {
    id = "divergence_route2_sample_total";
  } else {
    throw ParameterError("divergence_cost: route must be route1|route2, "
                         "access purification|sample_emulated");
  }
  return evaluate_cost(id, {{"kappa_sigma", kappa_sigma},
                            {"kappa_gamma", kappa_gamma},
                            {"eps", eps},
                            {"N", n},
                            {"T", t}});
}

CostFormula mean_cost(double c_a, double c_b, double delta, double eps) {
  return evaluate_cost("mean_total", {{"C_A", c_a},
                                      {"C_B", c_b},
                                      {"delta", delta},
                                      {"eps", eps}});
}

std::string cost_table(const std::vector<CostObservation>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(38) << "formula" << std::right << std::setw(14)
     << "predicted" << std::setw(14) << "measured" << std::setw(10) << "ratio"
     << "  inputs\n";
  for (const CostObservation& row : rows) {
    CostFormula f = evaluate_cost(row.formula_id, row.inputs);
    os << std::left << std::setw(38) << f.id << std::right << std::setw(14)
       << std::setprecision(4) << std::scientific << f.value << std::setw(14)
       << row.measured << std::setw(10) << std::setprecision(3)
       << std::defaultfloat << (row.measured / f.value) << "  ";
    bool first = true;
    for (const auto& [k, v] : f.inputs) {
      if (!first) os << " ";
      first = false;
      os << k << "=" << std::setprecision(6) << v;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qmatfun
