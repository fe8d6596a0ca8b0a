#include "qmatfun/funcspec.hpp"

#include <cmath>
#include <sstream>

namespace qmatfun {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double require_positive(double x, const char* who) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << who << ": argument must be positive, got " << format_g17(x);
    throw DomainError(os.str());
  }
  return x;
}

// (x-1)/log(x) with a stable series through x = 1.
double log_mean_ratio(double x) {
  const double u = x - 1.0;
  if (std::abs(u) < 1e-4) {
    // 1/(log(1+u)/u) expanded around u = 0.
    return 1.0 + u / 2.0 - u * u / 12.0 + u * u * u / 24.0;
  }
  return u / std::log(x);
}

// Principal-branch boundary density of a monotone spec evaluated just above
// the cut on the negative axis: Im f(-l + i0) / (pi l).
double power_p_density(double p, double t, double l) {
  // w = (1-t) + t l^p e^{i p pi}; f = w^{1/p}.
  const Complex w =
      Complex(1.0 - t, 0.0) +
      t * std::pow(l, p) * Complex(std::cos(p * kPi), std::sin(p * kPi));
  const Complex f = std::exp(std::log(w) / p);
  return f.imag() / (kPi * l);
}

}  // namespace

double FunctionSpec::eval(double x) const {
  switch (tag) {
    case FuncTag::xlogx:
      if (x == 0.0) return 0.0;
      require_positive(x, "xlogx");
      return x * std::log(x);
    case FuncTag::chi_square: {
      const double u = x - 1.0;
      return u * u;
    }
    case FuncTag::power_alpha:
      if (x == 0.0) return 1.0 / (1.0 - alpha_param);
      require_positive(x, "power_alpha");
      return (1.0 - std::pow(x, alpha_param)) / (1.0 - alpha_param);
    case FuncTag::kl_form:
      if (x == 0.0) return 1.0;
      require_positive(x, "kl_form");
      return x * std::log(x) - x + 1.0;
    case FuncTag::arithmetic:
      return (1.0 - t_param) + t_param * x;
    case FuncTag::harmonic: {
      if (t_param == 0.0) return 1.0;
      if (t_param == 1.0) return x;
      const double den = (1.0 - t_param) * x + t_param;
      return x / den;
    }
    case FuncTag::geometric:
      if (x == 0.0) return (t_param == 0.0) ? 1.0 : 0.0;
      require_positive(x, "geometric");
      return std::pow(x, t_param);
    case FuncTag::logarithmic:
      require_positive(x, "logarithmic");
      return log_mean_ratio(x);
    case FuncTag::heinz:
      if (x == 0.0) return (t_param == 0.0 || t_param == 1.0) ? 0.5 : 0.0;
      require_positive(x, "heinz");
      return 0.5 * (std::pow(x, t_param) + std::pow(x, 1.0 - t_param));
    case FuncTag::power_p: {
      require_positive(x, "power_p");
      if (t_param == 0.0) return 1.0;
      if (t_param == 1.0) return x;
      if (std::abs(p_param) < 1e-12) return std::pow(x, t_param);
      const double inner =
          (1.0 - t_param) + t_param * std::pow(x, p_param);
      return std::pow(inner, 1.0 / p_param);
    }
    case FuncTag::custom:
      return custom_eval(x);
  }
  throw ParameterError("FunctionSpec: unknown tag");
}

std::string FunctionSpec::name() const {
  std::ostringstream os;
  switch (tag) {
    case FuncTag::xlogx: return "xlogx";
    case FuncTag::chi_square: return "chi_square";
    case FuncTag::power_alpha:
      os << "power_alpha(" << alpha_param << ")";
      return os.str();
    case FuncTag::kl_form: return "kl_form";
    case FuncTag::arithmetic:
      os << "arithmetic(" << t_param << ")";
      return os.str();
    case FuncTag::harmonic:
      os << "harmonic(" << t_param << ")";
      return os.str();
    case FuncTag::geometric:
      os << "geometric(" << t_param << ")";
      return os.str();
    case FuncTag::logarithmic: return "logarithmic";
    case FuncTag::heinz:
      os << "heinz(" << t_param << ")";
      return os.str();
    case FuncTag::power_p:
      os << "power_p(" << p_param << "," << t_param << ")";
      return os.str();
    case FuncTag::custom: return custom_name;
  }
  return "?";
}

FunctionSpec::Affine FunctionSpec::representation_affine() const {
  switch (tag) {
    case FuncTag::xlogx: return {-1.0, 1.0, 0.0};
    case FuncTag::chi_square: return {1.0, -2.0, 1.0};
    case FuncTag::power_alpha: {
      const double r = alpha_param / (1.0 - alpha_param);
      return {r, -r, 0.0};
    }
    case FuncTag::kl_form: return {0.0, 0.0, 0.0};
    case FuncTag::arithmetic: return {1.0 - t_param, t_param, 0.0};
    case FuncTag::harmonic:
      if (t_param == 0.0) return {1.0, 0.0, 0.0};
      if (t_param == 1.0) return {0.0, 1.0, 0.0};
      return {0.0, 0.0, 0.0};
    case FuncTag::geometric:
      if (t_param == 0.0) return {1.0, 0.0, 0.0};
      if (t_param == 1.0) return {0.0, 1.0, 0.0};
      return {0.0, 0.0, 0.0};
    case FuncTag::logarithmic: return {0.0, 0.0, 0.0};
    case FuncTag::heinz:
      if (t_param == 0.0 || t_param == 1.0) return {0.5, 0.5, 0.0};
      return {0.0, 0.0, 0.0};
    case FuncTag::power_p: {
      if (t_param == 0.0) return {1.0, 0.0, 0.0};
      if (t_param == 1.0) return {0.0, 1.0, 0.0};
      if (std::abs(p_param) < 1e-12) return {0.0, 0.0, 0.0};
      if (p_param > 0.0) {
        return {std::pow(1.0 - t_param, 1.0 / p_param),
                std::pow(t_param, 1.0 / p_param), 0.0};
      }
      return {0.0, 0.0, 0.0};
    }
    case FuncTag::custom:
      throw ParameterError(
          "FunctionSpec: custom specs carry no built-in representation; "
          "supply coefficients and a quadrature explicitly");
  }
  return {};
}

double FunctionSpec::measure_density(double t) const {
  require_positive(t, "measure_density");
  switch (tag) {
    case FuncTag::xlogx:
    case FuncTag::kl_form: {
      const double one_plus = 1.0 + t;
      return t / (one_plus * one_plus);
    }
    case FuncTag::chi_square:
      return 0.0;
    case FuncTag::power_alpha: {
      const double a = alpha_param;
      const double one_plus = 1.0 + t;
      return std::sin(a * kPi) / ((1.0 - a) * kPi) * std::pow(t, a) /
             (one_plus * one_plus);
    }
    case FuncTag::arithmetic:
      return 0.0;
    case FuncTag::harmonic:
      return 0.0;  // purely atomic
    case FuncTag::geometric: {
      if (t_param == 0.0 || t_param == 1.0) return 0.0;
      return std::sin(t_param * kPi) / kPi * std::pow(t, t_param - 1.0);
    }
    case FuncTag::logarithmic: {
      const double lg = std::log(t);
      return (1.0 + t) / (t * (kPi * kPi + lg * lg));
    }
    case FuncTag::heinz: {
      if (t_param == 0.0 || t_param == 1.0) return 0.0;
      return 0.5 * (std::sin(t_param * kPi) / kPi *
                        std::pow(t, t_param - 1.0) +
                    std::sin((1.0 - t_param) * kPi) / kPi *
                        std::pow(t, -t_param));
    }
    case FuncTag::power_p: {
      if (t_param == 0.0 || t_param == 1.0) return 0.0;
      if (std::abs(p_param) < 1e-12) {
        return std::sin(t_param * kPi) / kPi * std::pow(t, t_param - 1.0);
      }
      if (p_param == 1.0) return 0.0;
      return power_p_density(p_param, t_param, t);
    }
    case FuncTag::custom:
      throw ParameterError(
          "FunctionSpec: custom specs carry no built-in measure density");
  }
  return 0.0;
}

bool FunctionSpec::measure_is_atomic() const {
  const bool interior = t_param > 0.0 && t_param < 1.0;
  if (tag == FuncTag::harmonic) return interior;
  // power_p at p = -1 is the weighted harmonic mean.
  return tag == FuncTag::power_p && p_param == -1.0 && interior;
}

std::vector<std::pair<double, double>> FunctionSpec::measure_atoms() const {
  if (!measure_is_atomic()) return {};
  // x/((1-t)x + t) = (1/(1-t)) x/(x + t/(1-t)).
  const double lam = t_param / (1.0 - t_param);
  const double w = 1.0 / (1.0 - t_param);
  return {{lam, w}};
}

double FunctionSpec::decay_rate_neg() const {
  switch (tag) {
    case FuncTag::xlogx:
    case FuncTag::kl_form:
      return 2.0;
    case FuncTag::power_alpha:
      return 1.0 + alpha_param;
    case FuncTag::geometric:
      return t_param;
    case FuncTag::heinz:
      return std::min(t_param, 1.0 - t_param);
    case FuncTag::power_p:
      if (std::abs(p_param) < 1e-12) return t_param;
      return (p_param > 0.0) ? p_param : 1.0 - p_param;
    default:
      return 0.0;
  }
}

double FunctionSpec::decay_rate_pos() const {
  switch (tag) {
    case FuncTag::xlogx:
    case FuncTag::kl_form:
      return 1.0;
    case FuncTag::power_alpha:
      return 2.0 - alpha_param;
    case FuncTag::geometric:
      return 1.0 - t_param;
    case FuncTag::heinz:
      return std::min(t_param, 1.0 - t_param);
    case FuncTag::power_p:
      if (std::abs(p_param) < 1e-12) return 1.0 - t_param;
      return (p_param > 0.0) ? p_param : 1.0 - p_param;
    default:
      return 0.0;
  }
}

namespace {

void check_unit_value(const FunctionSpec& s) {
  const double v = s.eval(1.0);
  const double want = (s.kind == FuncKind::convex) ? 0.0 : 1.0;
  if (std::abs(v - want) > 1e-12) {
    std::ostringstream os;
    os << "FunctionSpec " << s.name() << ": f(1) = " << format_g17(v)
       << ", expected " << want;
    throw ParameterError(os.str());
  }
}

void check_unit_interval(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << who << ": t must lie in [0,1], got " << format_g17(t);
    throw ParameterError(os.str());
  }
}

}  // namespace

FunctionSpec FunctionSpec::xlogx() {
  FunctionSpec s;
  s.tag = FuncTag::xlogx;
  s.kind = FuncKind::convex;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::chi_square() {
  FunctionSpec s;
  s.tag = FuncTag::chi_square;
  s.kind = FuncKind::convex;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::power_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("power_alpha: exponent must lie in (0,1)");
  }
  FunctionSpec s;
  s.tag = FuncTag::power_alpha;
  s.kind = FuncKind::convex;
  s.alpha_param = alpha;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::kl_form() {
  FunctionSpec s;
  s.tag = FuncTag::kl_form;
  s.kind = FuncKind::convex;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::arithmetic(double t) {
  check_unit_interval(t, "arithmetic");
  FunctionSpec s;
  s.tag = FuncTag::arithmetic;
  s.kind = FuncKind::monotone;
  s.t_param = t;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::harmonic(double t) {
  check_unit_interval(t, "harmonic");
  FunctionSpec s;
  s.tag = FuncTag::harmonic;
  s.kind = FuncKind::monotone;
  s.t_param = t;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::geometric(double t) {
  check_unit_interval(t, "geometric");
  FunctionSpec s;
  s.tag = FuncTag::geometric;
  s.kind = FuncKind::monotone;
  s.t_param = t;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::logarithmic() {
  FunctionSpec s;
  s.tag = FuncTag::logarithmic;
  s.kind = FuncKind::monotone;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::heinz(double t) {
  check_unit_interval(t, "heinz");
  FunctionSpec s;
  s.tag = FuncTag::heinz;
  s.kind = FuncKind::monotone;
  s.t_param = t;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::power_p(double p, double t) {
  if (!(p >= -1.0 && p <= 1.0)) {
    throw ParameterError("power_p: exponent must lie in [-1,1]");
  }
  check_unit_interval(t, "power_p");
  FunctionSpec s;
  s.tag = FuncTag::power_p;
  s.kind = FuncKind::monotone;
  s.p_param = p;
  s.t_param = t;
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::custom_convex(std::string name,
                                         std::function<double(double)> eval) {
  FunctionSpec s;
  s.tag = FuncTag::custom;
  s.kind = FuncKind::convex;
  s.custom_name = std::move(name);
  s.custom_eval = std::move(eval);
  check_unit_value(s);
  return s;
}

FunctionSpec FunctionSpec::custom_monotone(
    std::string name, std::function<double(double)> eval) {
  FunctionSpec s;
  s.tag = FuncTag::custom;
  s.kind = FuncKind::monotone;
  s.custom_name = std::move(name);
  s.custom_eval = std::move(eval);
  check_unit_value(s);
  return s;
}

}  // namespace qmatfun
