#pragma once

// Certified scalar approximations: Chebyshev polynomials for singular-value
// transforms, resolvent quadratures for the logarithm, and rational forms
// for operator-convex / operator-monotone functions.  Every constructor
// measures its own sup error on a dense grid against the scalar target and
// stores it; callers budget off the certified number, never the asymptotic
// order.

#include <functional>
#include <string>
#include <vector>

#include "qmatfun/common.hpp"
#include "qmatfun/funcspec.hpp"

namespace qmatfun {

// Chebyshev-basis polynomial on [lo, hi].
class Polynomial {
 public:
  // Interpolate f at degree+1 Chebyshev points of the first kind.
  static Polynomial interpolate(const std::function<double(double)>& f,
                                int degree, double lo, double hi);
  // Smallest degree (up to max_degree) whose grid sup error against f is
  // at most eps; ParameterError if unreachable.
  static Polynomial fit(const std::function<double(double)>& f, double lo,
                        double hi, double eps, int max_degree = 20000);

  double eval(double x) const;
  double deriv(double x) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& cheb_coeffs() const { return coeffs_; }

  // max |p| over a 1000-point grid of [lo, hi]; the admissibility flag used
  // by singular-value transforms is max_abs() <= 1 + tol::qsvt_admissible.
  double max_abs_on_grid(int n = 1000) const;
  bool qsvt_admissible() const;
  // Largest |p'| over the certification grid; propagation Lipschitz factor.
  double lipschitz_on_grid(int n = 1000) const;

  double certified_error() const { return certified_error_; }

  // Polynomial for x * p(x) on the same interval (degree + 1).
  Polynomial times_x() const;

 private:
  Polynomial(std::vector<double> c, double lo, double hi)
      : coeffs_(std::move(c)), lo_(lo), hi_(hi) {}
  std::vector<double> coeffs_;  // Chebyshev T_k coefficients on [lo, hi]
  double lo_ = -1.0, hi_ = 1.0;
  double certified_error_ = 0.0;

  friend Polynomial fit_with_certificate(const std::function<double(double)>&,
                                         double, double, double, int);
};

// Positive-node, positive-weight rule.  domain records what the nodes
// parameterize: "positive_axis" for resolvent shifts, "unit_interval" for
// harmonic-mixture weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::string domain = "positive_axis";
  double certified_error = 0.0;

  int m() const { return static_cast<int>(nodes.size()); }
  double weight_sum() const;
  void check_invariants() const;

  std::string to_text() const;
  static QuadratureRule from_text(const std::string& text);
};

// Rational approximant in one of three shapes (pole terms all have
// nonnegative nodes):
//   log_resolvent:      x * sum_k w_k (alpha_k - 1/(x + tau_k))
//   convex_kraus:       a + b x + c x^2 + sum_k w_k (x-1)^2 / (x + tau_k)
//   monotone_stieltjes: a + b x + sum_k w_k x / (x + tau_k)
struct RationalApprox {
  enum class Kind { log_resolvent, convex_kraus, monotone_stieltjes };

  Kind kind = Kind::monotone_stieltjes;
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> nodes;
  // Weights used by eval().  For log_resolvent these carry the 1/log(beta)
  // rescaling and are negative; raw_weights keeps the positive
  // pre-rescaling quadrature weights for the positivity ledger and for
  // pipelines that assemble the unnormalized sum.
  std::vector<double> weights;
  std::vector<double> raw_weights;
  std::vector<double> alphas;  // log_resolvent: 1/(1 + tau_k)
  double lo = 0.0, hi = 1.0;   // certified interval
  double beta_param = 0.0;     // log_resolvent: left edge of the window
  double certified_error = 0.0;

  int m() const { return static_cast<int>(nodes.size()); }
  double eval(double x) const;
  void check_invariants() const;

  std::string to_text() const;
  static RationalApprox from_text(const std::string& text);
};

// --- log window approximations -------------------------------------------

// Polynomial P with |P(x) - log(x)/(2 log beta)| <= eps on [beta, 1].
Polynomial log_poly(double beta, double eps);

// x * P(x); degree one larger than log_poly(beta, eps).
Polynomial xlogx_poly(double beta, double eps);

// Resolvent rule R(x) = x sum w_k (alpha_k - 1/(x+tau_k)) with
// |R(x) - x log(x)/log(beta)| <= eps on [beta, 1]; alpha_k = 1/(1+tau_k)
// so R(1) = 0 exactly.
RationalApprox log_stieltjes(double beta, double eps);
// Fixed-size variant for convergence sweeps.
RationalApprox log_stieltjes_m(double beta, int m);

// --- operator-convex and operator-monotone rational forms ----------------

// r(x) = a + b x + c x^2 + sum w_k (x-1)^2/(x+t_k), w_k > 0, r(1) = 0,
// certified on [delta, hi].
RationalApprox kraus_rational(const FunctionSpec& f, double delta, double eps,
                              double hi = 1.0);
RationalApprox kraus_rational_m(const FunctionSpec& f, double delta, int m,
                                double hi = 1.0);

// r(x) = alpha + beta x + sum w_k x/(x+lambda_k), alpha,beta >= 0, w_k > 0,
// r(1) = 1 to machine accuracy, certified on [delta, hi].
RationalApprox monotone_stieltjes_rational(const FunctionSpec& f, double delta,
                                           double eps, double hi = 1.0);
RationalApprox monotone_stieltjes_m(const FunctionSpec& f, double delta, int m,
                                    double hi = 1.0);

// Representing measure on [0,1] of a mean: A sigma_f B =
// Integral (A !_t B) dmu(t) with !_t the weighted harmonic mean.  Nodes in
// [0,1], weights positive summing to 1.  m bounds the interior node count.
QuadratureRule kubo_ando_measure(const FunctionSpec& f, int m);

// --- generic helpers -------------------------------------------------------

double sup_error(const std::function<double(double)>& approx,
                 const std::function<double(double)>& target, double lo,
                 double hi, int grid_size);

// m-point Gauss rule of a discrete measure (Stieltjes/Lanczos with full
// reorthogonalization, then the Jacobi-matrix eigenproblem).
struct DiscreteMeasure {
  std::vector<double> points;
  std::vector<double> masses;
};
void discrete_gauss(const DiscreteMeasure& mu, int m,
                    std::vector<double>& nodes_out,
                    std::vector<double>& weights_out);

}  // namespace qmatfun
