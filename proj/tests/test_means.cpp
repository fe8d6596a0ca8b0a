#include "doctest.h"

#include <cmath>

#include "qmatfun/funcspec.hpp"
#include "qmatfun/matcore.hpp"
#include "qmatfun/means.hpp"

using namespace qmatfun;

namespace {

PSDMatrix diag2(double a, double b) {
  RVec v(2);
  v << a, b;
  return PSDMatrix::diagonal(v);
}

CMat inverse(const PSDMatrix& p) {
  return apply_spectral_function(p, [](double x) { return 1.0 / x; }).mat();
}

}  // namespace

TEST_CASE("oracle geometric mean on a commuting fixture") {
  PSDMatrix a = diag2(0.64, 0.25);
  PSDMatrix b = diag2(0.25, 0.64);
  CMat g = oracle_mean(a, b, FunctionSpec::geometric(0.5));
  CHECK(std::abs(g(0, 0).real() - 0.4) < 1e-12);
  CHECK(std::abs(g(1, 1).real() - 0.4) < 1e-12);
  CHECK(std::abs(g(0, 1)) < 1e-14);
}

TEST_CASE("heinz at one half collapses to the geometric mean") {
  PSDMatrix a = random_psd(4, 0.2, 3);
  PSDMatrix b = random_psd(4, 0.2, 4);
  CMat g = oracle_mean(a, b, FunctionSpec::geometric(0.5));
  CMat h = oracle_mean(a, b, FunctionSpec::heinz(0.5));
  CHECK(operator_norm(g - h) < 1e-10);
}

TEST_CASE("geometric mean solves the Riccati equation") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    PSDMatrix a = random_psd(4, 0.2, seed);
    PSDMatrix b = random_psd(4, 0.2, seed + 100);
    CMat g = oracle_mean(a, b, FunctionSpec::geometric(0.5));
    CHECK(operator_norm(g * inverse(a) * g - b.mat()) < 1e-8);
  }
}

TEST_CASE("tabled means are ordered harmonic <= geometric <= arithmetic") {
  PSDMatrix a = random_psd(4, 0.3, 21);
  PSDMatrix b = random_psd(4, 0.3, 22);
  CMat h = oracle_mean(a, b, FunctionSpec::harmonic(0.5));
  CMat g = oracle_mean(a, b, FunctionSpec::geometric(0.5));
  CMat ar = oracle_mean(a, b, FunctionSpec::arithmetic(0.5));
  const double min_hg = hermitian_eig(PSDMatrix::from_matrix(
                                          g - h + 1e-9 * CMat::Identity(4, 4)))
                            .values[0];
  CHECK(min_hg >= 0.0);
  const double min_ga = hermitian_eig(PSDMatrix::from_matrix(
                                          ar - g + 1e-9 * CMat::Identity(4, 4)))
                            .values[0];
  CHECK(min_ga >= 0.0);
}

TEST_CASE("oracle mean validates its inputs") {
  PSDMatrix a = random_psd(4, 0.2, 31);
  PSDMatrix small = random_psd(2, 0.2, 32);
  CHECK_THROWS_AS(oracle_mean(a, small, FunctionSpec::geometric(0.5)),
                  ParameterError);
  RVec z(2);
  z << 0.0, 1.0;
  PSDMatrix singular = PSDMatrix::diagonal(z);
  CHECK_THROWS_AS(oracle_mean(singular, small, FunctionSpec::geometric(0.5)),
                  ValidationError);
}

TEST_CASE("weighted spectral geometric interpolates its endpoints") {
  PSDMatrix a = random_psd(3, 0.3, 41);
  PSDMatrix b = random_psd(3, 0.3, 42);
  CMat f0 = spectral_geometric_mean(a, b, 0.0);
  CHECK(operator_norm(f0 - a.mat()) < 1e-9);
  CMat f1 = spectral_geometric_mean(a, b, 1.0);
  CHECK(operator_norm(f1 - b.mat()) < 1e-9);

  // Commuting pairs reduce to the scalar weighted geometric mean.
  PSDMatrix da = diag2(0.64, 0.25);
  PSDMatrix db = diag2(0.25, 0.64);
  CMat ft = spectral_geometric_mean(da, db, 0.25);
  CHECK(std::abs(ft(0, 0).real() - std::pow(0.64, 0.75) * std::pow(0.25, 0.25)) <
        1e-10);
  CHECK_THROWS_AS(spectral_geometric_mean(a, b, 1.5), ParameterError);
}

TEST_CASE("mixture pipeline reaches its tolerance") {
  PSDMatrix a = random_psd(4, 0.25, 51);
  PSDMatrix b = random_psd(4, 0.25, 52);
  MeanReport rep =
      harmonic_mixture_mean(a, b, FunctionSpec::geometric(0.5), 0.25, 1e-5, 32);
  CHECK(rep.method == "harmonic_mixture");
  CHECK(rep.quadrature_m == 32);
  CHECK(rep.error_norm <= 1e-4);
  CHECK(rep.rescale == 1.0);
  CHECK(rep.queries.get("U_A") > 0);
  CHECK(rep.queries.get("U_B") > 0);
}

TEST_CASE("resolvent pipeline reaches its tolerance and logs its ledger") {
  PSDMatrix a = random_psd(4, 0.25, 61);
  PSDMatrix b = random_psd(4, 0.25, 62);
  MeanReport rep = stieltjes_mean(a, b, FunctionSpec::geometric(0.5), 0.25,
                                  1e-6);
  CHECK(rep.method == "stieltjes");
  CHECK(rep.quadrature_m > 0);
  CHECK(rep.error_norm <= 1e-5);
  CHECK(rep.rescale > 0.0);
  CHECK(rep.eps_ledger > 0.0);
  CHECK(rep.provenance != nullptr);
}

TEST_CASE("affine means run through the pipelines within their ledgers") {
  PSDMatrix a = random_psd(4, 0.3, 71);
  PSDMatrix b = random_psd(4, 0.3, 72);
  MeanReport ar =
      stieltjes_mean(a, b, FunctionSpec::arithmetic(0.5), 0.3, 1e-6);
  CHECK(ar.quadrature_m == 0);
  CHECK(ar.error_norm <= ar.eps_ledger + 1e-12);
  MeanReport hr =
      harmonic_mixture_mean(a, b, FunctionSpec::harmonic(0.5), 0.3, 1e-6);
  CHECK(hr.quadrature_m == 1);
  CHECK(hr.error_norm <= 1e-5);
}

TEST_CASE("both pipelines are idempotent at tight tolerance") {
  PSDMatrix a = random_psd(4, 0.25, 81);
  for (const FunctionSpec& f :
       {FunctionSpec::geometric(0.5), FunctionSpec::logarithmic()}) {
    MeanReport mix = harmonic_mixture_mean(a, a, f, 0.25, 1e-9);
    CHECK(operator_norm(mix.result - a.mat()) <= 1e-8);
    MeanReport st = stieltjes_mean(a, a, f, 0.25, 1e-9);
    CHECK(operator_norm(st.result - a.mat()) <= 1e-8);
  }
}

TEST_CASE("node count escalates until the certificate is met") {
  PSDMatrix a = random_psd(4, 0.25, 91);
  PSDMatrix b = random_psd(4, 0.25, 92);
  MeanReport loose =
      stieltjes_mean(a, b, FunctionSpec::logarithmic(), 0.25, 1e-3);
  MeanReport tight =
      stieltjes_mean(a, b, FunctionSpec::logarithmic(), 0.25, 1e-8);
  CHECK(tight.quadrature_m >= loose.quadrature_m);
  CHECK(tight.error_norm <= 1e-7);
}

TEST_CASE("pipelines validate their inputs") {
  PSDMatrix a = random_psd(4, 0.25, 101);
  PSDMatrix out_of_window = diag2(0.05, 0.5);
  CHECK_THROWS_AS(
      harmonic_mixture_mean(a, a, FunctionSpec::chi_square(), 0.2, 1e-5),
      ParameterError);
  CHECK_THROWS_AS(
      stieltjes_mean(out_of_window, out_of_window,
                     FunctionSpec::geometric(0.5), 0.2, 1e-5),
      ValidationError);
  CHECK_THROWS_AS(
      stieltjes_mean(a, a, FunctionSpec::geometric(0.5), 0.2, 2.0),
      ParameterError);
  CHECK_THROWS_AS(
      stieltjes_mean(a, a, FunctionSpec::geometric(0.5), 1.2, 1e-5),
      ParameterError);
}

TEST_CASE("method names round-trip and accept the cli spelling") {
  CHECK(mean_method_name(MeanMethod::stieltjes) == "stieltjes");
  CHECK(mean_method_from_name("oracle") == MeanMethod::oracle);
  CHECK(mean_method_from_name("harmonic_mixture") ==
        MeanMethod::harmonic_mixture);
  CHECK(mean_method_from_name("harmonic-mixture") ==
        MeanMethod::harmonic_mixture);
  CHECK_THROWS_AS(mean_method_from_name("nope"), ParameterError);
}

TEST_CASE("mean reports are deterministic") {
  PSDMatrix a = random_psd(4, 0.25, 111);
  PSDMatrix b = random_psd(4, 0.25, 112);
  MeanReport r1 = stieltjes_mean(a, b, FunctionSpec::geometric(0.5), 0.25,
                                 1e-5);
  MeanReport r2 = stieltjes_mean(a, b, FunctionSpec::geometric(0.5), 0.25,
                                 1e-5);
  CHECK(r1.to_kv() == r2.to_kv());
}
