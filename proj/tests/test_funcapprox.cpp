#include "doctest.h"

#include <cmath>

#include "qmatfun/funcapprox.hpp"
#include "qmatfun/funcspec.hpp"

using namespace qmatfun;

TEST_CASE("chebyshev fit meets its certificate on a finer grid") {
  Polynomial p = Polynomial::fit([](double x) { return std::exp(x); }, -1.0,
                                 1.0, 1e-10);
  const double err = sup_error([&p](double x) { return p.eval(x); },
                               [](double x) { return std::exp(x); }, -1.0, 1.0,
                               7919);
  CHECK(err <= 2.0 * p.certified_error() + 1e-14);
  CHECK(p.certified_error() <= 1e-10);
}

TEST_CASE("times_x shifts the polynomial by one degree") {
  Polynomial p = Polynomial::fit([](double x) { return std::cos(x); }, 0.25,
                                 1.0, 1e-9);
  Polynomial xp = p.times_x();
  CHECK(xp.degree() == p.degree() + 1);
  for (double x : {0.25, 0.5, 0.99}) {
    CHECK(xp.eval(x) == doctest::Approx(x * p.eval(x)).epsilon(1e-12));
  }
}

TEST_CASE("log window polynomial stays admissible and accurate") {
  const double beta = 1.0 / 16.0;
  Polynomial p = log_poly(beta, 1e-7);
  CHECK(p.qsvt_admissible());
  const double norm = 2.0 * std::log(beta);
  const double err =
      sup_error([&p](double x) { return p.eval(x); },
                [norm](double x) { return std::log(x) / norm; }, beta, 1.0,
                5003);
  CHECK(err <= 1e-6);

  Polynomial xp = xlogx_poly(beta, 1e-7);
  CHECK(xp.degree() == p.degree() + 1);
  const double xerr =
      sup_error([&xp](double x) { return xp.eval(x); },
                [norm](double x) { return x * std::log(x) / norm; }, beta, 1.0,
                5003);
  CHECK(xerr <= 1e-6);
}

TEST_CASE("log polynomial degree grows like kappa log(1/eps)") {
  const int d_loose = log_poly(1.0 / 16.0, 1e-4).degree();
  const int d_tight = log_poly(1.0 / 16.0, 1e-8).degree();
  CHECK(d_tight > d_loose);
  CHECK(d_tight <= 4 * d_loose);
}

TEST_CASE("resolvent log rule hits the certificate and vanishes at 1") {
  const double beta = 1.0 / 16.0;
  RationalApprox r = log_stieltjes(beta, 1e-7);
  r.check_invariants();
  CHECK(r.kind == RationalApprox::Kind::log_resolvent);
  CHECK(std::abs(r.eval(1.0)) < 1e-13);
  const double err = sup_error(
      [&r](double x) { return r.eval(x); },
      [beta](double x) { return x * std::log(x) / std::log(beta); }, beta, 1.0,
      5003);
  CHECK(err <= 1e-6);
  for (int k = 0; k < r.m(); ++k) {
    CHECK(r.raw_weights[k] > 0.0);
    CHECK(r.nodes[k] > 0.0);
    CHECK(r.alphas[k] ==
          doctest::Approx(1.0 / (1.0 + r.nodes[k])).epsilon(1e-14));
  }
}

TEST_CASE("resolvent log rule converges superexponentially in m") {
  const double beta = 1.0 / 16.0;
  double prev = 1.0;
  for (int m : {4, 8, 16, 32, 64}) {
    RationalApprox r = log_stieltjes_m(beta, m);
    CHECK(r.m() == m);
    CHECK(r.certified_error < 0.5 * prev);
    prev = r.certified_error;
  }
  CHECK(prev < 1e-9);
}

TEST_CASE("quadratic divergence kernels need no pole terms") {
  RationalApprox chi =
      kraus_rational(FunctionSpec::chi_square(), 0.25, 1e-10, 2.0);
  CHECK(chi.m() == 0);
  CHECK(chi.a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(chi.b == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(chi.c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(chi.certified_error <= 1e-12);
}

TEST_CASE("kraus form certifies kl and fractional power kernels") {
  for (const FunctionSpec& f :
       {FunctionSpec::kl_form(), FunctionSpec::power_alpha(0.5)}) {
    RationalApprox r = kraus_rational(f, 0.2, 1e-7, 1.8);
    r.check_invariants();
    CHECK(std::abs(r.eval(1.0)) < 1e-12);
    const double err = sup_error([&r](double x) { return r.eval(x); },
                                 [&f](double x) { return f.eval(x); }, 0.2,
                                 1.8, 4001);
    CHECK(err <= 1e-6);
    for (double w : r.weights) CHECK(w > 0.0);
  }
}

TEST_CASE("monotone rational form fixes f(1)=1 and keeps positivity") {
  for (const FunctionSpec& f :
       {FunctionSpec::geometric(0.5), FunctionSpec::logarithmic(),
        FunctionSpec::heinz(0.25), FunctionSpec::power_p(0.3, 0.5)}) {
    RationalApprox r = monotone_stieltjes_rational(f, 0.1, 1e-7, 10.0);
    r.check_invariants();
    CHECK(r.eval(1.0) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(r.a >= 0.0);
    CHECK(r.b >= 0.0);
    for (double w : r.weights) CHECK(w > 0.0);
    const double err = sup_error([&r](double x) { return r.eval(x); },
                                 [&f](double x) { return f.eval(x); }, 0.1,
                                 10.0, 4001);
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("affine means are represented exactly") {
  RationalApprox ar =
      monotone_stieltjes_rational(FunctionSpec::arithmetic(0.25), 0.1, 1e-12);
  CHECK(ar.m() == 0);
  CHECK(ar.a == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(ar.b == doctest::Approx(0.25).epsilon(1e-14));

  RationalApprox hr =
      monotone_stieltjes_m(FunctionSpec::harmonic(0.5), 0.1, 1, 1.0);
  CHECK(hr.m() == 1);
  CHECK(hr.certified_error < 1e-12);
}

TEST_CASE("representing measures integrate to one and reproduce f") {
  for (const FunctionSpec& f :
       {FunctionSpec::geometric(0.5), FunctionSpec::logarithmic(),
        FunctionSpec::arithmetic(0.5)}) {
    QuadratureRule mu = kubo_ando_measure(f, 24);
    mu.check_invariants();
    CHECK(mu.domain == "unit_interval");
    CHECK(mu.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));
    // f(x) = integral of the weighted harmonic mean of (1, x).
    for (double x : {0.5, 1.0, 2.0}) {
      double acc = 0.0;
      for (int j = 0; j < mu.m(); ++j) {
        const double t = mu.nodes[j];
        acc += mu.weights[j] * x / ((1.0 - t) * x + t);
      }
      CHECK(std::abs(acc - f.eval(x)) <= mu.certified_error + 1e-9);
    }
  }
}

TEST_CASE("discrete gauss rules match moments of the measure") {
  DiscreteMeasure mu;
  mu.points = {0.1, 0.3, 0.5, 0.7, 0.9};
  mu.masses = {0.2, 0.2, 0.2, 0.2, 0.2};
  std::vector<double> nodes, weights;
  discrete_gauss(mu, 3, nodes, weights);
  REQUIRE(nodes.size() == 3);
  for (int power = 0; power <= 5; ++power) {
    double exact = 0.0, approx = 0.0;
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
      exact += mu.masses[i] * std::pow(mu.points[i], power);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      approx += weights[i] * std::pow(nodes[i], power);
    }
    CHECK(approx == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("rule serialization round-trips") {
  RationalApprox r = log_stieltjes(1.0 / 8.0, 1e-6);
  RationalApprox back = RationalApprox::from_text(r.to_text());
  CHECK(back.m() == r.m());
  CHECK(back.to_text() == r.to_text());

  QuadratureRule mu = kubo_ando_measure(FunctionSpec::geometric(0.5), 12);
  QuadratureRule mback = QuadratureRule::from_text(mu.to_text());
  CHECK(mback.to_text() == mu.to_text());
}

TEST_CASE("bad approximation parameters are rejected") {
  CHECK_THROWS_AS(log_poly(0.0, 1e-6), ParameterError);
  CHECK_THROWS_AS(log_poly(0.5, -1.0), ParameterError);
  CHECK_THROWS_AS(log_stieltjes(1.5, 1e-6), ParameterError);
  CHECK_THROWS_AS(kraus_rational(FunctionSpec::geometric(0.5), 0.2, 1e-6),
                  ParameterError);
  CHECK_THROWS_AS(
      monotone_stieltjes_rational(FunctionSpec::chi_square(), 0.2, 1e-6),
      ParameterError);
}
