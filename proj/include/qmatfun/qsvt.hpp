#pragma once

// Spectral transforms of block-encoded Hermitian operators.  Each operation
// realizes its map by eigendecomposition of the stored block (evaluating the
// same certified polynomial a phase-factor circuit would implement) while
// charging the stated query cost: 2d uses of the input encoding for a
// degree-d transform, 2m for an m-step amplification.

#include <string>

#include "qmatfun/blockenc.hpp"
#include "qmatfun/funcapprox.hpp"

namespace qmatfun {

// What one transform charged and claimed.
struct TransformRecord {
  std::string op;
  int degree = 0;         // charged degree (or amplification step count)
  double eps_fit = 0.0;   // certified scalar fit error of the realized map
  double lipschitz = 0.0; // propagation factor applied to the input ledger
  double eps_out = 0.0;   // resulting ledger error
  double window_lo = 0.0; // validated spectral window of the block
  double window_hi = 0.0;
};

// p applied to the encoded block (the alpha-normalized operator); output is
// a (1, a+1, eps) encoding with eps = fit error + Lip(p) * eps_in/alpha_in.
// p must satisfy |p| <= 1 on its interval and every block eigenvalue must
// lie inside that interval.
BlockEncoding apply_polynomial(const BlockEncoding& be, const Polynomial& p,
                               TransformRecord* rec = nullptr);

// block^{-1}/kappa for a positive block with spectrum in [1/kappa, 1];
// charges degree ceil(kappa * log(1/eps)).
BlockEncoding invert(const BlockEncoding& be, double kappa, double eps,
                     TransformRecord* rec = nullptr);

// M^{-c}/(2 kappa^c) for M = alpha * block; requires
// lambda_min(M) >= 2^{-1/c}/kappa so the result stays a contraction;
// charges degree ceil(kappa (1+c) log(alpha/eps)).
BlockEncoding power_neg(const BlockEncoding& be, double c, double kappa,
                        double eps, TransformRecord* rec = nullptr);

// block^c / 2 for a positive block, c in (0,1); kappa taken from the
// measured spectral floor; charges degree ceil(kappa * log(1/eps)).
BlockEncoding power_pos(const BlockEncoding& be, double c, double eps,
                        TransformRecord* rec = nullptr);

// gamma_factor * block, requiring sigma_max(block) <= (1-delta)/gamma_factor;
// relative error eps on each singular value; charges
// m = ceil((gamma/delta) log(gamma/eps)) uses of the encoding and adjoint.
BlockEncoding amplify(const BlockEncoding& be, double gamma_factor,
                      double delta, double eps, TransformRecord* rec = nullptr);

}  // namespace qmatfun
