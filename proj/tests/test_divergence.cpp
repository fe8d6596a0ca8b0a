#include "doctest.h"

#include <cmath>

#include "qmatfun/divergence.hpp"
#include "qmatfun/funcspec.hpp"
#include "qmatfun/matcore.hpp"

using namespace qmatfun;

namespace {

DensityMatrix diag2(double p0, double p1) {
  RVec v(2);
  v << p0, p1;
  return DensityMatrix::diagonal(v);
}

// Classical value on commuting diagonal pairs: sum_i q_i f(p_i / q_i).
double classical(const RVec& p, const RVec& q, const FunctionSpec& f) {
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) acc += q[i] * f.eval(p[i] / q[i]);
  return acc;
}

}  // namespace

TEST_CASE("oracle reproduces the frozen relative-entropy fixture") {
  DensityMatrix rho = diag2(0.75, 0.25);
  DensityMatrix sigma = diag2(0.5, 0.5);
  const double kl = oracle_divergence(rho, sigma, FunctionSpec::xlogx());
  CHECK(std::abs(kl - 0.130812035941137) < 1e-12);
  const double chi = oracle_divergence(rho, sigma, FunctionSpec::chi_square());
  CHECK(std::abs(chi - 0.25) < 1e-14);
}

TEST_CASE("oracle equals the classical formula on commuting pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    RVec p(4), q(4);
    double ps = 0.0, qs = 0.0;
    for (int i = 0; i < 4; ++i) {
      p[i] = 0.1 + rng.uniform();
      q[i] = 0.1 + rng.uniform();
      ps += p[i];
      qs += q[i];
    }
    p /= ps;
    q /= qs;
    DensityMatrix rho = DensityMatrix::diagonal(p);
    DensityMatrix sigma = DensityMatrix::diagonal(q);
    for (const FunctionSpec& f :
         {FunctionSpec::xlogx(), FunctionSpec::chi_square(),
          FunctionSpec::power_alpha(0.5), FunctionSpec::kl_form()}) {
      CHECK(std::abs(oracle_divergence(rho, sigma, f) - classical(p, q, f)) <
            1e-10);
    }
  }
}

TEST_CASE("oracle vanishes at rho = sigma and rejects bad inputs") {
  DensityMatrix rho = random_density(4, 4.0, 3);
  CHECK(std::abs(oracle_divergence(rho, rho, FunctionSpec::xlogx())) < 1e-12);
  DensityMatrix other = random_density(2, 2.0, 4);
  CHECK_THROWS_AS(oracle_divergence(rho, other, FunctionSpec::xlogx()),
                  ParameterError);
}

TEST_CASE("gamma bundle normalizes the conjugated ratio") {
  DensityMatrix rho = random_density(4, 4.0, 11);
  DensityMatrix sigma = random_density(4, 6.0, 12);
  GammaBundle g = build_gamma(rho, sigma, 1e-4);
  // Tr[sigma * (4 kappa gamma)] = Tr[rho] = 1.
  const double tr =
      (sigma.mat() * g.oracle_gamma).trace().real() * 4.0 * g.kappa_used;
  CHECK(tr == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.kappa_used >= g.kappa_sigma);
  CHECK(g.kappa_gamma > 1.0);
  CHECK(operator_norm(g.oracle_gamma) < 1.0);
  CHECK(g.gamma_encoding.has_target());
  CHECK(g.gamma_encoding.measured_error() <= g.gamma_encoding.eps_ledger());
}

TEST_CASE("gamma bundle rejects rho singular relative to sigma") {
  DensityMatrix pure = diag2(1.0, 0.0);
  DensityMatrix sigma = diag2(0.5, 0.5);
  CHECK_THROWS_AS(build_gamma(pure, sigma, 1e-4), WindowError);
}

TEST_CASE("trace expectation is exact under purification access") {
  DensityMatrix sigma = random_density(4, 4.0, 21);
  PSDMatrix p = random_psd(4, 0.3, 22);
  BlockEncoding g = BlockEncoding::dilate(p.mat(), "U_G");
  Rng rng(5);
  TraceInfo info;
  const double v =
      trace_expectation(sigma, g, AccessModel::purification, 1e-3, false, rng,
                        &info);
  CHECK(v == (sigma.mat() * g.extract_block()).trace().real());
  CHECK(info.repetitions == 1000);
  CHECK(info.queries.get("U_G") == 1000);
  CHECK(info.queries.get("U_sigma") == 1000);
  CHECK_FALSE(info.noise_applied);

  Rng rng2(5);
  TraceInfo si;
  const double sv = trace_expectation(sigma, g, AccessModel::sample_emulated,
                                      1e-1, false, rng2, &si);
  const double pi = 3.14159265358979323846;
  CHECK(sv == doctest::Approx(pi / 16.0 * v).epsilon(1e-12));
  CHECK(si.repetitions == 100);
}

TEST_CASE("noise is seeded and bounded") {
  DensityMatrix sigma = random_density(4, 4.0, 31);
  PSDMatrix p = random_psd(4, 0.3, 32);
  BlockEncoding g = BlockEncoding::dilate(p.mat(), "U_G");
  const double exact = (sigma.mat() * g.extract_block()).trace().real();
  Rng a(9), b(9), c(10);
  const double va =
      trace_expectation(sigma, g, AccessModel::purification, 1e-2, true, a);
  const double vb =
      trace_expectation(sigma, g, AccessModel::purification, 1e-2, true, b);
  const double vc =
      trace_expectation(sigma, g, AccessModel::purification, 1e-2, true, c);
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(std::abs(va - exact) <= 1e-2);
}

TEST_CASE("polynomial route hits tolerance and replays its trail") {
  DensityMatrix rho = diag2(0.75, 0.25);
  DensityMatrix sigma = diag2(0.5, 0.5);
  DivergenceReport rep = xlogx_route1(rho, sigma, 1e-4);
  CHECK(rep.route == "route1");
  CHECK(rep.access_model == "purification");
  CHECK(std::abs(rep.estimate - rep.oracle) <= 1e-4);
  CHECK(rep.estimate == rep.trail.replay());
  CHECK(rep.trail.multipliers.size() == 2);
  CHECK(rep.kappa_gamma > 1.0);
  CHECK(rep.queries.get("U_sigma") > 0);
  CHECK(rep.queries.get("U_rho") > 0);
  CHECK(rep.eps_ledger > 0.0);
}

TEST_CASE("resolvent route agrees with the oracle and route one") {
  DensityMatrix rho = random_density(4, 3.0, 41);
  DensityMatrix sigma = random_density(4, 4.0, 42);
  DivergenceReport r1 = xlogx_route1(rho, sigma, 1e-3);
  DivergenceReport r2 = xlogx_route2(rho, sigma, 1e-3);
  CHECK(r2.route == "route2");
  CHECK(r2.quadrature_m > 0);
  CHECK(std::abs(r1.estimate - r1.oracle) <= 1e-3);
  CHECK(std::abs(r2.estimate - r2.oracle) <= 1e-3);
  CHECK(std::abs(r1.estimate - r2.estimate) <= 2e-3);
  CHECK(r2.estimate == r2.trail.replay());
}

TEST_CASE("general convex route covers the tabled kernels") {
  DensityMatrix rho = diag2(0.75, 0.25);
  DensityMatrix sigma = diag2(0.5, 0.5);
  DivergenceReport chi =
      general_convex(rho, sigma, FunctionSpec::chi_square(), 1e-3);
  CHECK(chi.route == "general_convex");
  CHECK(chi.quadrature_m == 0);  // quadratic kernel needs no pole terms
  CHECK(std::abs(chi.estimate - 0.25) < 1e-6);
  CHECK(chi.estimate == chi.trail.replay());

  DivergenceReport kl =
      general_convex(rho, sigma, FunctionSpec::kl_form(), 1e-3);
  CHECK(std::abs(kl.estimate - kl.oracle) <= 1e-3);

  CHECK_THROWS_AS(
      general_convex(rho, sigma, FunctionSpec::geometric(0.5), 1e-3),
      ParameterError);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  DensityMatrix rho = random_density(4, 3.0, 51);
  DensityMatrix sigma = random_density(4, 4.0, 52);
  DivergenceOptions opt;
  opt.noise = true;
  opt.seed = 777;
  DivergenceReport a = xlogx_route1(rho, sigma, 1e-3, opt);
  DivergenceReport b = xlogx_route1(rho, sigma, 1e-3, opt);
  CHECK(a.to_kv() == b.to_kv());
  CHECK(a.noise_applied);
  opt.seed = 778;
  DivergenceReport c = xlogx_route1(rho, sigma, 1e-3, opt);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("sample access rescales the trail by the dimension factor") {
  DensityMatrix rho = diag2(0.75, 0.25);
  DensityMatrix sigma = diag2(0.5, 0.5);
  DivergenceOptions opt;
  opt.access = AccessModel::sample_emulated;
  DivergenceReport rep = xlogx_route1(rho, sigma, 1e-2, opt);
  CHECK(rep.access_model == "sample_emulated");
  CHECK(rep.trail.multipliers.size() == 3);  // 4N/pi joins the trail
  CHECK(std::abs(rep.estimate - rep.oracle) <= 1e-2);
  CHECK(rep.estimate == rep.trail.replay());
  CHECK(rep.repetitions > 1000);
  CHECK(rep.queries.get("sigma_copies") > 0);
}

TEST_CASE("divergence options are validated") {
  DensityMatrix rho = diag2(0.75, 0.25);
  DensityMatrix sigma = diag2(0.5, 0.5);
  CHECK_THROWS_AS(xlogx_route1(rho, sigma, 0.0), ParameterError);
  CHECK_THROWS_AS(xlogx_route1(rho, sigma, 1.5), ParameterError);
  CHECK_THROWS_AS(xlogx_route2(rho, sigma, -1e-3), ParameterError);
}
