#include "qmatfun/funcapprox.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmatfun {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
// exp(-kStrip/h) models the trapezoid discretization error for the
// exponential-substitution rules (analyticity strip just inside |Im y|=pi).
constexpr double kStrip = 17.5;

// Certification grid: uniform plus log-spaced points plus exact endpoints.
std::vector<double> cert_grid(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(n + 2);
  const int half = n / 2;
  for (int i = 0; i <= half; ++i) {
    g.push_back(lo + (hi - lo) * static_cast<double>(i) / half);
  }
  if (lo > 0.0) {
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n - half; ++i) {
      g.push_back(std::exp(llo + (lhi - llo) * (i + 0.5) / (n - half)));
    }
  } else {
    for (int i = 0; i < n - half; ++i) {
      g.push_back(lo + (hi - lo) * (i + 0.5) / (n - half));
    }
  }
  g.push_back(lo);
  g.push_back(hi);
  return g;
}

double max_err_on(const std::vector<double>& grid,
                  const std::function<double(double)>& approx,
                  const std::function<double(double)>& target) {
  double worst = 0.0;
  for (double x : grid) {
    worst = std::max(worst, std::abs(approx(x) - target(x)));
  }
  return worst;
}

}  // namespace

// --- Polynomial -------------------------------------------------------------

Polynomial Polynomial::interpolate(const std::function<double(double)>& f,
                                   int degree, double lo, double hi) {
  if (degree < 0) throw ParameterError("Polynomial: degree must be >= 0");
  if (!(hi > lo)) throw ParameterError("Polynomial: need hi > lo");
  const int n = degree + 1;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  std::vector<double> fx(n);
  for (int j = 0; j < n; ++j) {
    const double t = std::cos(kPi * (j + 0.5) / n);
    fx[j] = f(mid + half * t);
  }
  std::vector<double> c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fx[j] * std::cos(kPi * k * (j + 0.5) / n);
    c[k] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  return Polynomial(std::move(c), lo, hi);
}

double Polynomial::eval(double x) const {
  const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k) {
    const double b = 2.0 * t * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = b;
  }
  return t * b1 - b2 + coeffs_[0];
}

double Polynomial::deriv(double x) const {
  const int n = degree();
  if (n == 0) return 0.0;
  // Chebyshev derivative coefficients, then Clenshaw on the t variable.
  std::vector<double> d(n + 2, 0.0);
  for (int k = n; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * k * coeffs_[k];
  d[0] *= 0.5;
  d.resize(n);
  const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double b = 2.0 * t * b1 - b2 + d[k];
    b2 = b1;
    b1 = b;
  }
  const double v = t * b1 - b2 + d[0];
  return v * 2.0 / (hi_ - lo_);
}

double Polynomial::max_abs_on_grid(int n) const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo_ + (hi_ - lo_) * i / (n - 1);
    worst = std::max(worst, std::abs(eval(x)));
  }
  return worst;
}

bool Polynomial::qsvt_admissible() const {
  return max_abs_on_grid() <= 1.0 + tol::qsvt_admissible;
}

double Polynomial::lipschitz_on_grid(int n) const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo_ + (hi_ - lo_) * i / (n - 1);
    worst = std::max(worst, std::abs(deriv(x)));
  }
  return worst;
}

Polynomial Polynomial::times_x() const {
  // x = mid + half*t; t*T_0 = T_1, t*T_k = (T_{k+1}+T_{k-1})/2.
  const double mid = 0.5 * (lo_ + hi_), half = 0.5 * (hi_ - lo_);
  const int n = static_cast<int>(coeffs_.size());
  std::vector<double> tp(n + 1, 0.0);
  tp[1] += coeffs_[0];
  for (int k = 1; k < n; ++k) {
    tp[k + 1] += 0.5 * coeffs_[k];
    tp[k - 1] += 0.5 * coeffs_[k];
  }
  std::vector<double> out(n + 1, 0.0);
  for (int k = 0; k < n; ++k) out[k] += mid * coeffs_[k];
  for (int k = 0; k <= n; ++k) out[k] += half * tp[k];
  Polynomial p(std::move(out), lo_, hi_);
  p.certified_error_ = certified_error_;
  return p;
}

Polynomial fit_with_certificate(const std::function<double(double)>& f,
                                double lo, double hi, double eps,
                                int max_degree) {
  if (!(eps > 0.0)) throw ParameterError("Polynomial::fit: eps must be > 0");
  const auto grid = cert_grid(lo, hi, 4000);
  const auto err_at = [&](int d) {
    Polynomial p = Polynomial::interpolate(f, d, lo, hi);
    double e = 0.0;
    for (double x : grid) e = std::max(e, std::abs(p.eval(x) - f(x)));
    return std::pair<Polynomial, double>(std::move(p), e);
  };
  const double target = 0.92 * eps;
  int d = 4;
  while (d <= max_degree) {
    auto [p, e] = err_at(d);
    if (e <= target) {
      // Binary search the smallest admissible degree in (d/2, d].
      int lo_d = d / 2 + 1, hi_d = d;
      Polynomial best = std::move(p);
      double best_err = e;
      while (lo_d < hi_d) {
        const int mid_d = (lo_d + hi_d) / 2;
        auto [q, eq] = err_at(mid_d);
        if (eq <= target) {
          hi_d = mid_d;
          best = std::move(q);
          best_err = eq;
        } else {
          lo_d = mid_d + 1;
        }
      }
      best.certified_error_ = best_err;
      return best;
    }
    d *= 2;
  }
  std::ostringstream os;
  os << "Polynomial::fit: cannot reach eps=" << format_g17(eps)
     << " within degree " << max_degree << " on [" << format_g17(lo) << ", "
     << format_g17(hi) << "]";
  throw ParameterError(os.str());
}

Polynomial Polynomial::fit(const std::function<double(double)>& f, double lo,
                           double hi, double eps, int max_degree) {
  return fit_with_certificate(f, lo, hi, eps, max_degree);
}

// --- QuadratureRule ---------------------------------------------------------

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::check_invariants() const {
  if (nodes.size() != weights.size()) {
    throw ValidationError("quadrature: node/weight size mismatch");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw ValidationError("quadrature: nonpositive weight at index " +
                            std::to_string(i));
    }
    if (nodes[i] < 0.0) {
      throw ValidationError("quadrature: negative node at index " +
                            std::to_string(i));
    }
    if (domain == "unit_interval" && nodes[i] > 1.0) {
      throw ValidationError("quadrature: node beyond 1 on unit interval");
    }
  }
  if (domain == "unit_interval" &&
      std::abs(weight_sum() - 1.0) > tol::weight_sum) {
    throw ValidationError("quadrature: unit-interval weights must sum to 1");
  }
}

std::string QuadratureRule::to_text() const {
  std::ostringstream os;
  os << "quadrature " << domain << "\n";
  os << "certified " << format_g17(certified_error) << "\n";
  os << "m " << m() << "\n";
  for (int i = 0; i < m(); ++i) {
    os << format_g17(nodes[i]) << " " << format_g17(weights[i]) << "\n";
  }
  return os.str();
}

QuadratureRule QuadratureRule::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  QuadratureRule q;
  if (!(is >> word) || word != "quadrature" || !(is >> q.domain)) {
    throw IoError("quadrature parse: bad header");
  }
  if (!(is >> word) || word != "certified" || !(is >> q.certified_error)) {
    throw IoError("quadrature parse: bad certified line");
  }
  int m = 0;
  if (!(is >> word) || word != "m" || !(is >> m) || m < 0) {
    throw IoError("quadrature parse: bad size line");
  }
  q.nodes.resize(m);
  q.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    if (!(is >> q.nodes[i] >> q.weights[i])) {
      throw IoError("quadrature parse: truncated node list");
    }
  }
  return q;
}

// --- RationalApprox ---------------------------------------------------------

double RationalApprox::eval(double x) const {
  switch (kind) {
    case Kind::log_resolvent: {
      if (!(x > 0.0)) {
        throw DomainError("log_resolvent eval: x must be > 0");
      }
      double s = 0.0;
      for (int k = 0; k < m(); ++k) {
        s += weights[k] * (alphas[k] - 1.0 / (x + nodes[k]));
      }
      return x * s;
    }
    case Kind::convex_kraus: {
      double s = a + b * x + c * x * x;
      const double u = (x - 1.0) * (x - 1.0);
      for (int k = 0; k < m(); ++k) {
        const double den = x + nodes[k];
        if (den <= 0.0) {
          throw DomainError("convex_kraus eval: pole collision at x = " +
                            format_g17(x));
        }
        s += weights[k] * u / den;
      }
      return s;
    }
    case Kind::monotone_stieltjes: {
      double s = a + b * x;
      for (int k = 0; k < m(); ++k) {
        const double den = x + nodes[k];
        if (den <= 0.0) {
          throw DomainError("monotone_stieltjes eval: pole collision at x = " +
                            format_g17(x));
        }
        s += weights[k] * x / den;
      }
      return s;
    }
  }
  throw ParameterError("RationalApprox: unknown kind");
}

void RationalApprox::check_invariants() const {
  const std::vector<double>& positive =
      (kind == Kind::log_resolvent) ? raw_weights : weights;
  if (positive.size() != nodes.size()) {
    throw ValidationError("rational: weight/node size mismatch");
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] < 0.0) {
      throw ValidationError("rational: negative pole node");
    }
    if (!(positive[k] > 0.0)) {
      throw ValidationError("rational: nonpositive quadrature weight");
    }
  }
  if (kind == Kind::monotone_stieltjes && (a < -1e-14 || b < -1e-14)) {
    throw ValidationError("rational: monotone affine part must be >= 0");
  }
}

namespace {

const char* kind_name(RationalApprox::Kind k) {
  switch (k) {
    case RationalApprox::Kind::log_resolvent: return "log_resolvent";
    case RationalApprox::Kind::convex_kraus: return "convex_kraus";
    case RationalApprox::Kind::monotone_stieltjes: return "monotone_stieltjes";
  }
  return "?";
}

RationalApprox::Kind kind_from_name(const std::string& s) {
  if (s == "log_resolvent") return RationalApprox::Kind::log_resolvent;
  if (s == "convex_kraus") return RationalApprox::Kind::convex_kraus;
  if (s == "monotone_stieltjes") {
    return RationalApprox::Kind::monotone_stieltjes;
  }
  throw IoError("rational parse: unknown kind '" + s + "'");
}

}  // namespace

std::string RationalApprox::to_text() const {
  std::ostringstream os;
  os << "rational " << kind_name(kind) << "\n";
  os << "interval " << format_g17(lo) << " " << format_g17(hi) << "\n";
  os << "affine " << format_g17(a) << " " << format_g17(b) << " "
     << format_g17(c) << "\n";
  os << "beta " << format_g17(beta_param) << "\n";
  os << "certified " << format_g17(certified_error) << "\n";
  os << "m " << m() << "\n";
  for (int k = 0; k < m(); ++k) {
    os << format_g17(nodes[k]) << " " << format_g17(weights[k]);
    if (kind == Kind::log_resolvent) {
      os << " " << format_g17(raw_weights[k]) << " " << format_g17(alphas[k]);
    }
    os << "\n";
  }
  return os.str();
}

RationalApprox RationalApprox::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word, kname;
  RationalApprox r;
  if (!(is >> word) || word != "rational" || !(is >> kname)) {
    throw IoError("rational parse: bad header");
  }
  r.kind = kind_from_name(kname);
  if (!(is >> word) || word != "interval" || !(is >> r.lo >> r.hi)) {
    throw IoError("rational parse: bad interval line");
  }
  if (!(is >> word) || word != "affine" || !(is >> r.a >> r.b >> r.c)) {
    throw IoError("rational parse: bad affine line");
  }
  if (!(is >> word) || word != "beta" || !(is >> r.beta_param)) {
    throw IoError("rational parse: bad beta line");
  }
  if (!(is >> word) || word != "certified" || !(is >> r.certified_error)) {
    throw IoError("rational parse: bad certified line");
  }
  int m = 0;
  if (!(is >> word) || word != "m" || !(is >> m) || m < 0) {
    throw IoError("rational parse: bad size line");
  }
  r.nodes.resize(m);
  r.weights.resize(m);
  if (r.kind == Kind::log_resolvent) {
    r.raw_weights.resize(m);
    r.alphas.resize(m);
  }
  for (int k = 0; k < m; ++k) {
    if (!(is >> r.nodes[k] >> r.weights[k])) {
      throw IoError("rational parse: truncated pole list");
    }
    if (r.kind == Kind::log_resolvent) {
      if (!(is >> r.raw_weights[k] >> r.alphas[k])) {
        throw IoError("rational parse: truncated pole list");
      }
    }
  }
  if (r.kind != Kind::log_resolvent) r.raw_weights = r.weights;
  return r;
}

// --- log window approximations ---------------------------------------------

Polynomial log_poly(double beta, double eps) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("log_poly: beta must lie in (0,1)");
  }
  const double inv_norm = 1.0 / (2.0 * std::log(beta));  // negative
  auto target = [inv_norm](double x) { return std::log(x) * inv_norm; };
  return Polynomial::fit(target, beta, 1.0, eps);
}

Polynomial xlogx_poly(double beta, double eps) {
  return log_poly(beta, eps).times_x();
}

namespace {

// Trapezoid rule for log(x) = Integral (1/(1+t) - 1/(x+t)) dt under
// t = e^y, with the span balanced so truncation matches discretization.
RationalApprox build_log_rule(double beta, int m) {
  if (m < 2) throw ParameterError("log rule: m must be >= 2");
  const double lnB = std::log(1.0 / beta);
  // s solves s(2s + lnB) = kStrip*(m-1).
  const double s = std::max(
      0.5, (-lnB + std::sqrt(lnB * lnB + 8.0 * kStrip * (m - 1))) / 4.0);
  const double y_hi = s, y_lo = -(s + lnB);
  const double h = (y_hi - y_lo) / (m - 1);
  RationalApprox r;
  r.kind = RationalApprox::Kind::log_resolvent;
  r.beta_param = beta;
  r.lo = beta;
  r.hi = 1.0;
  r.nodes.resize(m);
  r.raw_weights.resize(m);
  r.weights.resize(m);
  r.alphas.resize(m);
  const double rescale = 1.0 / std::log(beta);  // negative
  for (int j = 0; j < m; ++j) {
    const double y = y_lo + j * h;
    const double tau = std::exp(y);
    double w = h * tau;
    if (j == 0 || j == m - 1) w *= 0.5;
    r.nodes[j] = tau;
    r.raw_weights[j] = w;
    r.weights[j] = w * rescale;
    r.alphas[j] = 1.0 / (1.0 + tau);
  }
  auto target = [beta](double x) { return x * std::log(x) / std::log(beta); };
  auto approx = [&r](double x) { return r.eval(x); };
  r.certified_error = max_err_on(cert_grid(beta, 1.0, 4000), approx, target);
  return r;
}

}  // namespace

RationalApprox log_stieltjes_m(double beta, int m) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("log_stieltjes: beta must lie in (0,1)");
  }
  return build_log_rule(beta, m);
}

RationalApprox log_stieltjes(double beta, double eps) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("log_stieltjes: beta must lie in (0,1)");
  }
  if (!(eps > 0.0)) throw ParameterError("log_stieltjes: eps must be > 0");
  const double lnB = std::log(1.0 / beta);
  const double raw_target = eps * lnB;
  const double s_req = std::max(1.0, std::log(6.0 / raw_target));
  int m = 2 + static_cast<int>(std::ceil(s_req * (2 * s_req + lnB) / kStrip));
  for (int iter = 0; iter < 20; ++iter) {
    RationalApprox r = build_log_rule(beta, m);
    if (r.certified_error <= 0.95 * eps) return r;
    m = static_cast<int>(std::ceil(m * 1.25)) + 1;
  }
  throw ParameterError("log_stieltjes: failed to certify requested eps");
}

// --- discrete Gauss (Stieltjes/Lanczos + Jacobi eigenproblem) ---------------

void discrete_gauss(const DiscreteMeasure& mu, int m,
                    std::vector<double>& nodes_out,
                    std::vector<double>& weights_out) {
  const int n = static_cast<int>(mu.points.size());
  if (n == 0 || mu.masses.size() != mu.points.size()) {
    throw ParameterError("discrete_gauss: empty or mismatched measure");
  }
  if (m < 1) throw ParameterError("discrete_gauss: m must be >= 1");
  m = std::min(m, n);

  double mass = 0.0;
  for (double w : mu.masses) {
    if (w < 0.0) throw ParameterError("discrete_gauss: negative mass");
    mass += w;
  }
  if (!(mass > 0.0)) throw ParameterError("discrete_gauss: zero total mass");

  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += mu.masses[i] * u[i] * v[i];
    return s;
  };

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> p(n, 1.0 / std::sqrt(mass));
  basis.push_back(p);
  int steps = 0;
  for (int j = 0; j < m; ++j) {
    std::vector<double> sp(n);
    for (int i = 0; i < n; ++i) sp[i] = mu.points[i] * basis[j][i];
    alpha.push_back(dot(sp, basis[j]));
    ++steps;
    if (j + 1 == m) break;
    std::vector<double> v = sp;
    for (int i = 0; i < n; ++i) v[i] -= alpha[j] * basis[j][i];
    if (j > 0) {
      for (int i = 0; i < n; ++i) v[i] -= beta[j - 1] * basis[j - 1][i];
    }
    // Full reorthogonalization, twice, for numerical safety.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(v, q);
        for (int i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    }
    const double nb = std::sqrt(dot(v, v));
    if (nb < 1e-14) break;  // measure supported on fewer points
    beta.push_back(nb);
    for (int i = 0; i < n; ++i) v[i] /= nb;
    basis.push_back(std::move(v));
  }

  const int k = steps;
  RMat J = RMat::Zero(k, k);
  for (int j = 0; j < k; ++j) J(j, j) = alpha[j];
  for (int j = 0; j + 1 < k; ++j) {
    J(j, j + 1) = beta[j];
    J(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(J);
  if (es.info() != Eigen::Success) {
    throw ValidationError("discrete_gauss: Jacobi eigenproblem failed");
  }
  nodes_out.resize(k);
  weights_out.resize(k);
  for (int j = 0; j < k; ++j) {
    nodes_out[j] = es.eigenvalues()(j);
    const double q0 = es.eigenvectors()(0, j);
    weights_out[j] = mass * q0 * q0;
  }
}

// --- operator-convex rational rules ------------------------------------------

namespace {

RationalApprox build_kraus_rule(const FunctionSpec& f, int m, double lo_x,
                                double hi_x) {
  const auto affine = f.representation_affine();
  RationalApprox r;
  r.kind = RationalApprox::Kind::convex_kraus;
  r.a = affine.a;
  r.b = affine.b;
  r.c = affine.c;
  r.lo = lo_x;
  r.hi = hi_x;

  const double rn = f.decay_rate_neg();
  const double rp = f.decay_rate_pos();
  const bool has_density = rn > 0.0 && rp > 0.0;
  if (has_density && m > 0) {
    if (m < 2) m = 2;
    const double rh = 1.0 / (1.0 / rn + 1.0 / rp);
    const double u = std::sqrt(kStrip * (m - 1) * rh) +
                     std::log(1.0 + (hi_x - 1.0) * (hi_x - 1.0));
    const double y_hi = std::min(690.0, u / rp);
    const double y_lo = -std::min(690.0, u / rn);
    const double h = (y_hi - y_lo) / (m - 1);
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int j = 0; j < m; ++j) {
      const double y = y_lo + j * h;
      const double tau = std::exp(y);
      double w = h * tau * f.measure_density(tau);
      if (j == 0 || j == m - 1) w *= 0.5;
      r.nodes[j] = tau;
      r.weights[j] = std::max(w, 5e-324);
    }
  }
  r.raw_weights = r.weights;
  auto approx = [&r](double x) { return r.eval(x); };
  auto target = [&f](double x) { return f.eval(x); };
  r.certified_error = max_err_on(cert_grid(lo_x, hi_x, 4000), approx, target);
  return r;
}

void check_convex_args(const FunctionSpec& f, double delta, double hi) {
  if (f.kind != FuncKind::convex) {
    throw ParameterError("kraus_rational: spec must be operator-convex");
  }
  if (!(delta > 0.0 && delta < hi)) {
    throw ParameterError("kraus_rational: need 0 < delta < hi");
  }
}

}  // namespace

RationalApprox kraus_rational_m(const FunctionSpec& f, double delta, int m,
                                double hi) {
  check_convex_args(f, delta, hi);
  return build_kraus_rule(f, m, delta, hi);
}

RationalApprox kraus_rational(const FunctionSpec& f, double delta, double eps,
                              double hi) {
  check_convex_args(f, delta, hi);
  if (!(eps > 0.0)) throw ParameterError("kraus_rational: eps must be > 0");

  const double rn = f.decay_rate_neg();
  const double rp = f.decay_rate_pos();
  if (!(rn > 0.0 && rp > 0.0)) {
    // Purely polynomial representation (chi_square): exact.
    RationalApprox r = build_kraus_rule(f, 0, delta, hi);
    if (r.certified_error > eps) {
      throw ParameterError("kraus_rational: exact form failed certification");
    }
    return r;
  }
  const double rh = 1.0 / (1.0 / rn + 1.0 / rp);
  const double u_req =
      std::log(8.0 * (1.0 + (hi - 1.0) * (hi - 1.0)) / eps);
  int m = 2 + static_cast<int>(std::ceil(u_req * u_req / (kStrip * rh)));
  for (int iter = 0; iter < 20; ++iter) {
    RationalApprox r = build_kraus_rule(f, m, delta, hi);
    if (r.certified_error <= 0.9 * eps) return r;
    m = static_cast<int>(std::ceil(m * 1.3)) + 1;
  }
  throw ParameterError("kraus_rational: failed to certify requested eps");
}

// --- operator-monotone rational rules ----------------------------------------

namespace {

// Discretized representing measure in the compactified variable
// s = (1 - lambda)/(1 + lambda); masses are the finite measure
// dnu(lambda)/(1+lambda), normalized to unit mass.
DiscreteMeasure discretize_monotone(const FunctionSpec& f) {
  DiscreteMeasure mu;
  const int N = 4000;
  mu.points.resize(N);
  mu.masses.resize(N);
  if (f.tag == FuncTag::logarithmic) {
    // Exact unit-mass parametrization: lambda = e^{pi tan(pi(v-1/2))}.
    for (int i = 0; i < N; ++i) {
      const double v = (i + 0.5) / N;
      const double y = kPi * std::tan(kPi * (v - 0.5));
      mu.points[i] = -std::tanh(0.5 * y);
      mu.masses[i] = 1.0 / N;
    }
    return mu;
  }
  const double rn = f.decay_rate_neg();
  const double rp = f.decay_rate_pos();
  if (!(rn > 0.0 && rp > 0.0)) {
    throw ParameterError("monotone rule: spec lacks a continuous measure");
  }
  const double y_hi = std::min(690.0, 42.0 / rp);
  const double y_lo = -std::min(690.0, 42.0 / rn);
  const double h = (y_hi - y_lo) / N;
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    const double y = y_lo + (i + 0.5) * h;
    const double lam = std::exp(y);
    const double w = h * f.measure_density(lam) * lam / (1.0 + lam);
    mu.points[i] = -std::tanh(0.5 * y);
    mu.masses[i] = std::max(w, 0.0);
    total += mu.masses[i];
  }
  if (!(total > 0.0)) {
    throw ParameterError("monotone rule: representing measure vanished");
  }
  for (double& w : mu.masses) w /= total;
  return mu;
}

RationalApprox finish_monotone(RationalApprox r, const FunctionSpec& f) {
  auto approx = [&r](double x) { return r.eval(x); };
  auto target = [&f](double x) { return f.eval(x); };
  r.certified_error = max_err_on(cert_grid(r.lo, r.hi, 4000), approx, target);
  return r;
}

RationalApprox build_monotone_rule(const FunctionSpec& f, int m, double lo_x,
                                   double hi_x) {
  RationalApprox r;
  r.kind = RationalApprox::Kind::monotone_stieltjes;
  r.lo = lo_x;
  r.hi = hi_x;
  if (f.measure_is_atomic()) {
    for (const auto& [lam, w] : f.measure_atoms()) {
      r.nodes.push_back(lam);
      r.weights.push_back(w);
    }
    r.raw_weights = r.weights;
    return finish_monotone(std::move(r), f);
  }
  const auto affine = f.representation_affine();
  r.a = affine.a;
  r.b = affine.b;
  const double mass = 1.0 - affine.a - affine.b;
  if (mass < 1e-14) {
    r.raw_weights = r.weights;
    return finish_monotone(std::move(r), f);  // purely affine
  }
  DiscreteMeasure mu = discretize_monotone(f);
  std::vector<double> s_nodes, s_weights;
  discrete_gauss(mu, m, s_nodes, s_weights);
  for (std::size_t k = 0; k < s_nodes.size(); ++k) {
    const double s = s_nodes[k];
    const double W = mass * s_weights[k];
    if (1.0 + s < 1e-12) {
      r.b += W;  // lambda -> infinity limit acts as a linear term
    } else if (1.0 - s < 1e-12) {
      r.a += W;  // lambda -> 0 limit acts as a constant
    } else {
      r.nodes.push_back((1.0 - s) / (1.0 + s));
      r.weights.push_back(2.0 * W / (1.0 + s));
    }
  }
  r.raw_weights = r.weights;
  return finish_monotone(std::move(r), f);
}

void check_monotone_args(const FunctionSpec& f, double delta, double hi) {
  if (f.kind != FuncKind::monotone) {
    throw ParameterError(
        "monotone_stieltjes_rational: spec must be operator-monotone");
  }
  if (!(delta > 0.0 && delta < hi)) {
    throw ParameterError("monotone_stieltjes_rational: need 0 < delta < hi");
  }
}

}  // namespace

RationalApprox monotone_stieltjes_m(const FunctionSpec& f, double delta, int m,
                                    double hi) {
  check_monotone_args(f, delta, hi);
  if (m < 1) throw ParameterError("monotone_stieltjes_m: m must be >= 1");
  return build_monotone_rule(f, m, delta, hi);
}

RationalApprox monotone_stieltjes_rational(const FunctionSpec& f, double delta,
                                           double eps, double hi) {
  check_monotone_args(f, delta, hi);
  if (!(eps > 0.0)) {
    throw ParameterError("monotone_stieltjes_rational: eps must be > 0");
  }
  int m = 4;
  RationalApprox best = build_monotone_rule(f, m, delta, hi);
  while (best.certified_error > 0.95 * eps) {
    m *= 2;
    if (m > 512) {
      throw ParameterError(
          "monotone_stieltjes_rational: failed to certify requested eps");
    }
    best = build_monotone_rule(f, m, delta, hi);
  }
  return best;
}

QuadratureRule kubo_ando_measure(const FunctionSpec& f, int m) {
  if (f.kind != FuncKind::monotone) {
    throw ParameterError("kubo_ando_measure: spec must be operator-monotone");
  }
  if (m < 1) throw ParameterError("kubo_ando_measure: m must be >= 1");
  QuadratureRule q;
  q.domain = "unit_interval";

  const double lo_x = 0.05, hi_x = 20.0;
  auto push = [&q](double t, double w) {
    if (w > 0.0) {
      q.nodes.push_back(t);
      q.weights.push_back(w);
    }
  };

  if (f.measure_is_atomic()) {
    push(f.t_param, 1.0);
  } else {
    const auto affine = f.representation_affine();
    const double mass = 1.0 - affine.a - affine.b;
    double al = affine.a, be = affine.b;
    std::vector<double> s_nodes, s_weights;
    if (mass >= 1e-14) {
      DiscreteMeasure mu = discretize_monotone(f);
      discrete_gauss(mu, m, s_nodes, s_weights);
    }
    push(0.0, al);
    for (std::size_t k = 0; k < s_nodes.size(); ++k) {
      // lambda/(1+lambda) = (1-s)/2: stable node map straight from s.
      push(0.5 * (1.0 - s_nodes[k]), mass * s_weights[k]);
    }
    push(1.0, be);
  }

  // Order nodes and certify the scalar harmonic mixture against f.
  std::vector<std::size_t> idx(q.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&q](std::size_t i, std::size_t j) {
    return q.nodes[i] < q.nodes[j];
  });
  QuadratureRule sorted;
  sorted.domain = q.domain;
  for (std::size_t i : idx) {
    sorted.nodes.push_back(q.nodes[i]);
    sorted.weights.push_back(q.weights[i]);
  }
  auto mixture = [&sorted](double x) {
    double s = 0.0;
    for (int j = 0; j < sorted.m(); ++j) {
      const double t = sorted.nodes[j];
      s += sorted.weights[j] * x / ((1.0 - t) * x + t);
    }
    return s;
  };
  auto target = [&f](double x) { return f.eval(x); };
  sorted.certified_error =
      max_err_on(cert_grid(lo_x, hi_x, 4000), mixture, target);
  sorted.check_invariants();
  return sorted;
}

double sup_error(const std::function<double(double)>& approx,
                 const std::function<double(double)>& target, double lo,
                 double hi, int grid_size) {
  if (grid_size < 2) throw ParameterError("sup_error: grid_size must be >= 2");
  double worst = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double x = lo + (hi - lo) * i / (grid_size - 1);
    worst = std::max(worst, std::abs(approx(x) - target(x)));
  }
  return worst;
}

}  // namespace qmatfun
