#pragma once

// Scalar function specifications used by divergences (operator-convex
// family, f(1) = 0) and operator means (operator-monotone family,
// f(1) = 1).  Each spec knows its scalar evaluation and the data of its
// integral representation:
//
//   convex:    f(x) = a + b x + c x^2 + Integral (x-1)^2/(x+t) dnu(t)
//   monotone:  f(x) = alpha + beta x + Integral x/(x+lambda) dnu(lambda)
//
// with nu a positive measure on (0, inf).  Densities are closed forms; for
// generic monotone specs they come from the boundary values of the analytic
// continuation, density(l) = Im f(-l + i0) / (pi l).

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qmatfun/common.hpp"

namespace qmatfun {

enum class FuncKind { convex, monotone };

enum class FuncTag {
  xlogx,
  chi_square,
  power_alpha,
  kl_form,
  arithmetic,
  harmonic,
  geometric,
  logarithmic,
  heinz,
  power_p,
  custom,
};

struct FunctionSpec {
  FuncTag tag = FuncTag::custom;
  FuncKind kind = FuncKind::convex;
  // Family parameters; meaning depends on tag.
  double alpha_param = 0.0;  // exponent for power_alpha
  double t_param = 0.0;      // mixing weight for the mean families
  double p_param = 0.0;      // exponent for power_p
  // Custom specs supply their own evaluation.
  std::function<double(double)> custom_eval;
  std::string custom_name;

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  std::string name() const;

  // Affine coefficients of the integral representation.
  // convex: {a, b, c}; monotone: {alpha, beta, 0}.
  struct Affine {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
  };
  Affine representation_affine() const;

  // Density of nu at t > 0 (zero when the measure is purely atomic or
  // absent).  Exact for the built-in tags.
  double measure_density(double t) const;
  // True when nu is a finite sum of atoms; the atoms are returned as
  // (location, weight) pairs.
  bool measure_is_atomic() const;
  std::vector<std::pair<double, double>> measure_atoms() const;

  // Two-sided exponential decay rates of the density in log coordinates
  // (t = e^y): |density(e^y) e^y ...| ~ exp(-rate * |y|).  Drives the
  // discretization span of the quadrature builders.
  double decay_rate_neg() const;  // y -> -inf
  double decay_rate_pos() const;  // y -> +inf

  // Factories.
  static FunctionSpec xlogx();
  static FunctionSpec chi_square();
  static FunctionSpec power_alpha(double alpha);
  static FunctionSpec kl_form();
  static FunctionSpec arithmetic(double t);
  static FunctionSpec harmonic(double t);
  static FunctionSpec geometric(double t);
  static FunctionSpec logarithmic();
  static FunctionSpec heinz(double t);
  static FunctionSpec power_p(double p, double t);
  static FunctionSpec custom_convex(std::string name,
                                    std::function<double(double)> eval);
  static FunctionSpec custom_monotone(std::string name,
                                      std::function<double(double)> eval);
};

}  // namespace qmatfun
