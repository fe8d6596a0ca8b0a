#include "doctest.h"

#include <cmath>
#include <vector>

#include "qmatfun/blockenc.hpp"
#include "qmatfun/matcore.hpp"

using namespace qmatfun;

namespace {

BlockEncoding seeded_encoding(std::uint64_t seed) {
  PSDMatrix p = random_psd(4, 0.2, seed);
  BlockEncoding e = BlockEncoding::dilate(p.mat(), "U_" + std::to_string(seed));
  return e;
}

}  // namespace

TEST_CASE("query tallies add, scale, and saturate") {
  QueryCount q;
  q.add("U_A");
  q.add("U_A", 4);
  q.add("U_B", 2);
  CHECK(q.get("U_A") == 5);
  CHECK(q.get("U_B") == 2);
  CHECK(q.get("U_C") == 0);
  CHECK(q.total() == 7);

  QueryCount r;
  r.add("U_B", 3);
  q += r;
  CHECK(q.get("U_B") == 5);

  q.scale(3);
  CHECK(q.get("U_A") == 15);
  CHECK(q.weighted({{"U_A", 2.0}}) == doctest::Approx(15.0 * 2.0 + 15.0));

  QueryCount big;
  big.add("U_A", 3'000'000'000'000'000'000LL);
  big.scale(10);
  CHECK(big.get("U_A") == 4'000'000'000'000'000'000LL);
  big.add("U_A", 1);
  CHECK(big.get("U_A") == 4'000'000'000'000'000'000LL);
}

TEST_CASE("dilation encodes a contraction exactly") {
  PSDMatrix p = random_psd(4, 0.3, 3);
  BlockEncoding e = BlockEncoding::dilate(p.mat(), "U_P");
  CHECK(e.alpha() == 1.0);
  CHECK(e.eps_ledger() <= 1e-12);
  CHECK(e.ancilla_count() == 1);
  CHECK(operator_norm(e.extract_block() - p.mat()) < 1e-13);
  CHECK(e.queries().get("U_P") == 1);

  CMat u = e.unitary();
  REQUIRE(u.rows() == 8);
  CHECK(operator_norm(u * u.adjoint() - CMat::Identity(8, 8)) <
        tol::unitarity);
  CHECK(operator_norm(u.topLeftCorner(4, 4) - p.mat()) < 1e-12);

  CHECK_THROWS_AS(BlockEncoding::dilate(2.0 * p.mat(), "U_P"),
                  ValidationError);
}

TEST_CASE("density encoding charges the preparation unitary") {
  DensityMatrix rho = random_density(4, 4.0, 5);
  BlockEncoding e = BlockEncoding::encode_density(rho, "U_rho");
  CHECK(e.alpha() == 1.0);
  CHECK(operator_norm(e.extract_block() - rho.mat()) < 1e-12);
  CHECK(e.queries().get("U_rho") == 1);
  CHECK(e.queries().get("U_rho_dag") == 1);
}

TEST_CASE("identity encoding is query-free and exact") {
  BlockEncoding id = BlockEncoding::identity_encoding(4);
  CHECK(id.alpha() == 1.0);
  CHECK(id.eps_ledger() <= 1e-12);
  CHECK(id.queries().total() == 0);
  CHECK(operator_norm(id.extract_block() - CMat::Identity(4, 4)) == 0.0);
  CHECK_THROWS_AS(BlockEncoding::identity_encoding(0), ParameterError);
}

TEST_CASE("product multiplies alphas and cross-propagates errors") {
  BlockEncoding u = seeded_encoding(11);
  BlockEncoding v = seeded_encoding(12);
  BlockEncoding uv = product(u, v);
  CHECK(uv.alpha() == doctest::Approx(u.alpha() * v.alpha()));
  CHECK(operator_norm(uv.extract_block() -
                      u.extract_block() * v.extract_block()) < 1e-12);
  CHECK(uv.eps_ledger() ==
        doctest::Approx(u.alpha() * v.eps_ledger() +
                        v.alpha() * u.eps_ledger()));
  CHECK(uv.ancilla_count() == u.ancilla_count() + v.ancilla_count());
  CHECK(uv.queries().get("U_11") == 1);
  CHECK(uv.queries().get("U_12") == 1);
}

TEST_CASE("linear combination follows the one-norm contract") {
  BlockEncoding u = seeded_encoding(21);
  BlockEncoding v = seeded_encoding(22);
  BlockEncoding w = linear_combination({u, v}, {0.5, -1.5});
  CHECK(w.alpha() == doctest::Approx(2.0 * std::max(u.alpha(), v.alpha())));
  CHECK(operator_norm(w.extract_block() - 0.5 * u.extract_block() +
                      1.5 * v.extract_block()) < 1e-12);

  // Zero weights are allowed and contribute nothing to the extract.
  BlockEncoding z = linear_combination({u, v}, {1.0, 0.0});
  CHECK(operator_norm(z.extract_block() - u.extract_block()) < 1e-12);

  CHECK_THROWS_AS(linear_combination({u, v}, {1.0}), ValidationError);
  CHECK_THROWS_AS(linear_combination({}, {}), ValidationError);
  CHECK_THROWS_AS(linear_combination({u, v}, {0.0, 0.0}), ValidationError);
}

TEST_CASE("scale_down divides alpha and eps") {
  BlockEncoding u = seeded_encoding(31);
  BlockEncoding s = scale_down(u, 4.0);
  CHECK(s.alpha() == doctest::Approx(u.alpha() / 4.0));
  CHECK(operator_norm(s.block() - u.block()) == 0.0);
  CHECK(s.ancilla_count() == u.ancilla_count() + 1);
  CHECK_THROWS_AS(scale_down(u, 1.0), ParameterError);
}

TEST_CASE("with_alpha_one renormalizes the contract") {
  BlockEncoding u = scale_down(seeded_encoding(41), 2.0);
  BlockEncoding n = u.with_alpha_one();
  CHECK(n.alpha() == 1.0);
  CHECK(operator_norm(n.extract_block() - u.block()) < 1e-15);
  CHECK(n.eps_ledger() == doctest::Approx(u.eps_ledger() / u.alpha()));
}

TEST_CASE("from_parts rejects blocks that are not contractions") {
  CMat big = 1.1 * CMat::Identity(2, 2);
  CHECK_THROWS_AS(
      BlockEncoding::from_parts(big, 1.0, 0.0, 0, QueryCount{}, nullptr),
      ValidationError);
  CMat borderline = (1.0 + 5e-10) * CMat::Identity(2, 2);
  CHECK_NOTHROW(BlockEncoding::from_parts(borderline, 1.0, 0.0, 0,
                                          QueryCount{}, nullptr));
}

TEST_CASE("ledger stays sound through seeded composition trees") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng rng(seed);
    PSDMatrix pa = random_psd(4, 0.2, seed * 7 + 1);
    PSDMatrix pb = random_psd(4, 0.2, seed * 7 + 2);
    BlockEncoding ea = BlockEncoding::dilate(pa.mat(), "U_A");
    BlockEncoding eb = BlockEncoding::dilate(pb.mat(), "U_B");
    CMat ta = pa.mat(), tb = pb.mat();
    for (int step = 0; step < 4; ++step) {
      const double pick = rng.uniform();
      if (pick < 0.4) {
        ea = product(ea, eb);
        ta = ta * tb;
      } else if (pick < 0.8) {
        const double w0 = rng.uniform(-1.0, 1.0);
        const double w1 = rng.uniform(-1.0, 1.0);
        ea = linear_combination({ea, eb}, {w0, w1});
        ta = w0 * ta + w1 * tb;
      } else {
        ea = scale_down(ea, 2.0);
        ta = 0.5 * ta;
      }
    }
    ea.attach_target(ta);
    CHECK(ea.measured_error() <= ea.eps_ledger() + 1e-12);
  }
}

TEST_CASE("provenance render names every constructor in the tree") {
  BlockEncoding u = seeded_encoding(51);
  BlockEncoding v = seeded_encoding(52);
  BlockEncoding w = linear_combination({product(u, v), u}, {0.5, 0.5});
  REQUIRE(w.provenance() != nullptr);
  const std::string tree = render_provenance(*w.provenance());
  CHECK(tree.find("lcu") != std::string::npos);
  CHECK(tree.find("product") != std::string::npos);
  CHECK(tree.find("dilate") != std::string::npos);
}
