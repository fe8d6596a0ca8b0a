#pragma once

// Operator means A sigma_f B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2} for
// operator-monotone f with f(1) = 1.  Exact spectral oracles for the tabled
// means plus two encoding pipelines: a mixture over weighted harmonic means
// (one inversion per quadrature node) and a resolvent expansion of f applied
// to X = A^{-1/2} B A^{-1/2}, dressed back with A^{1/2} on both sides.

#include <memory>
#include <string>

#include "qmatfun/blockenc.hpp"
#include "qmatfun/common.hpp"
#include "qmatfun/funcspec.hpp"
#include "qmatfun/matcore.hpp"

namespace qmatfun {

enum class MeanMethod { oracle, harmonic_mixture, stieltjes };

std::string mean_method_name(MeanMethod m);
MeanMethod mean_method_from_name(const std::string& name);

struct MeanReport {
  CMat result;
  CMat oracle;             // closed-form spectral evaluation
  double error_norm = 0.0;  // ||result - oracle||
  std::string method;
  std::string f_name;
  int quadrature_m = 0;
  double delta = 0.0;
  double eps_requested = 0.0;
  double rescale = 1.0;     // classical factor multiplied into result
  double alpha_ledger = 1.0;
  double eps_ledger = 0.0;  // absolute, on the rescaled result
  QueryCount queries;
  std::shared_ptr<const ProvNode> provenance;

  std::string to_kv() const;
  std::string to_text() const;
};

// Exact A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}; ValidationError on singular
// or dimension-mismatched inputs.
CMat oracle_mean(const PSDMatrix& a, const PSDMatrix& b, const FunctionSpec& f);

// (A^{-1} #_t B)^{1/2} A^{2-2t} (A^{-1} #_t B)^{1/2} with
// A^{-1} #_t B = A^{-1/2} (A^{1/2} B A^{1/2})^t A^{-1/2}.  Oracle only: this
// mean has no representing function, so no pipeline realizes it.
CMat spectral_geometric_mean(const PSDMatrix& a, const PSDMatrix& b, double t);

// Mixture pipeline: nodes (t_j, w_j) of the representing measure, one block
// inversion of (1-t_j) delta A^{-1} + t_j delta B^{-1} per node, then the
// weighted combination.  Spectra of a and b must lie in [delta, 1].  m = 0
// picks the node count from eps; m > 0 forces it.
MeanReport harmonic_mixture_mean(const PSDMatrix& a, const PSDMatrix& b,
                                 const FunctionSpec& f, double delta,
                                 double eps, int m = 0);

// Resolvent pipeline: certified rational r(x) = alpha + beta x
// + sum_k w_k x/(x + lambda_k) for f, each resolvent realized by one shifted
// inversion of X, assembled by weighted combination and amplification, then
// dressed with A^{1/2}.  m semantics as above.
MeanReport stieltjes_mean(const PSDMatrix& a, const PSDMatrix& b,
                          const FunctionSpec& f, double delta, double eps,
                          int m = 0);

}  // namespace qmatfun
