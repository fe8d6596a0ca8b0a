#include "doctest.h"

#include <cmath>

#include "qmatfun/funcapprox.hpp"
#include "qmatfun/matcore.hpp"
#include "qmatfun/qsvt.hpp"

using namespace qmatfun;

namespace {

CMat spectral(const PSDMatrix& p, const std::function<double(double)>& f) {
  return apply_spectral_function(p, f).mat();
}

}  // namespace

TEST_CASE("polynomial transform matches the scalar map and charges 2d") {
  PSDMatrix p = random_psd(4, 0.25, 3);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  Polynomial poly = Polynomial::fit(
      [](double x) { return 0.5 * std::sin(3.0 * x); }, 0.0, 1.0, 1e-11);
  TransformRecord rec;
  BlockEncoding out = apply_polynomial(enc, poly, &rec);
  CMat want = spectral(p, [&poly](double x) { return poly.eval(x); });
  CHECK(operator_norm(out.extract_block() - want) <= out.eps_ledger());
  CHECK(out.alpha() == 1.0);
  CHECK(out.ancilla_count() == enc.ancilla_count() + 1);
  CHECK(rec.degree == poly.degree());
  CHECK(out.queries().get("U_P") ==
        enc.queries().get("U_P") * 2 * poly.degree());
  CHECK(rec.eps_out >= rec.eps_fit);
}

TEST_CASE("polynomial transform validates window and admissibility") {
  PSDMatrix p = random_psd(4, 0.25, 5);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  // Window [0.5, 1] excludes the spectral floor 0.25.
  Polynomial narrow =
      Polynomial::fit([](double x) { return x; }, 0.5, 1.0, 1e-10);
  CHECK_THROWS_AS(apply_polynomial(enc, narrow), WindowError);
  // |p| > 1 on the window is inadmissible for a singular-value transform.
  Polynomial big =
      Polynomial::fit([](double x) { return 3.0 * x; }, 0.0, 1.0, 1e-10);
  CHECK_THROWS_AS(apply_polynomial(enc, big), ValidationError);
}

TEST_CASE("inversion matches the spectral oracle inside its window") {
  PSDMatrix p = random_psd(4, 0.5, 7);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  const double kappa = 2.0 + 1e-6;
  TransformRecord rec;
  BlockEncoding inv = invert(enc, kappa, 1e-9, &rec);
  CMat want = spectral(p, [kappa](double x) { return 1.0 / (kappa * x); });
  CHECK(operator_norm(inv.extract_block() - want) <= inv.eps_ledger());
  CHECK(operator_norm(inv.extract_block() - want) < 1e-8);
  CHECK(rec.op == "invert");
  CHECK(rec.degree >= static_cast<int>(kappa * std::log(1e9)));
  CHECK_THROWS_AS(invert(enc, 1.5, 1e-9), WindowError);
  CHECK_THROWS_AS(invert(enc, 2.0, -1.0), ParameterError);
}

TEST_CASE("inverse square root tracks kappa and alpha") {
  PSDMatrix p = random_psd(4, 0.25, 9);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  const double kappa = 4.0 + 1e-6;
  TransformRecord rec;
  BlockEncoding half = power_neg(enc, 0.5, kappa, 1e-9, &rec);
  const double scale = 2.0 * std::sqrt(kappa);
  CMat want =
      spectral(p, [scale](double x) { return 1.0 / (scale * std::sqrt(x)); });
  CHECK(operator_norm(half.extract_block() - want) <= half.eps_ledger());
  CHECK(operator_norm(half.extract_block() - want) < 1e-8);
  CHECK(rec.window_lo > 0.0);

  // Floor 2^{-1/c}/kappa: a spectrum below it must be rejected.
  PSDMatrix low = random_psd(4, 0.01, 10);
  BlockEncoding lenc = BlockEncoding::dilate(low.mat(), "U_L");
  CHECK_THROWS_AS(power_neg(lenc, 0.5, 4.0, 1e-9), WindowError);
}

TEST_CASE("positive powers halve the represented operator") {
  PSDMatrix p = random_psd(4, 0.3, 11);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  BlockEncoding root = power_pos(enc, 0.5, 1e-10);
  CMat want = spectral(p, [](double x) { return std::sqrt(x) / 2.0; });
  CHECK(operator_norm(root.extract_block() - want) <= root.eps_ledger());
  CHECK(operator_norm(root.extract_block() - want) < 1e-9);
  CHECK_THROWS_AS(power_pos(enc, 1.5, 1e-10), ParameterError);
}

TEST_CASE("amplification rescales within the promised window") {
  PSDMatrix p = random_psd(4, 0.2, 13);
  BlockEncoding enc = BlockEncoding::dilate(0.15 * p.mat(), "U_P");
  TransformRecord rec;
  BlockEncoding amp = amplify(enc, 4.0, 0.25, 1e-3, &rec);
  CHECK(operator_norm(amp.extract_block() - 0.6 * p.mat()) <=
        amp.eps_ledger());
  CHECK(rec.degree >= 1);
  CHECK(amp.queries().get("U_P") >= 2 * rec.degree);
  // sigma_max above (1-delta)/gamma violates the amplification window.
  BlockEncoding tall = BlockEncoding::dilate(p.mat(), "U_P");
  CHECK_THROWS_AS(amplify(tall, 4.0, 0.25, 1e-3), WindowError);
}

TEST_CASE("transform ledgers stay sound under composition") {
  PSDMatrix p = random_psd(4, 0.4, 17);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  BlockEncoding inv = invert(enc, 2.5 + 1e-9, 1e-8);
  BlockEncoding chained = product(inv, power_pos(enc, 0.5, 1e-8));
  const double kappa = 2.5 + 1e-9;
  CMat want = spectral(
      p, [kappa](double x) { return std::sqrt(x) / (2.0 * kappa * x); });
  chained.attach_target(want);
  CHECK(chained.measured_error() <= chained.eps_ledger());
}
