#pragma once

// Maximal f-divergence pipelines.  The exact oracle evaluates
// Tr[sigma * f(sigma^{-1/2} rho sigma^{-1/2})] spectrally; the encoding
// pipelines rebuild the same quantity out of block primitives and keep a
// normalization trail so the raw trace estimate can be audited back into
// the reported value bit for bit.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qmatfun/blockenc.hpp"
#include "qmatfun/common.hpp"
#include "qmatfun/funcspec.hpp"
#include "qmatfun/matcore.hpp"

namespace qmatfun {

enum class AccessModel { purification, sample_emulated };

std::string access_model_name(AccessModel m);

// gamma = sigma^{-1/2} rho sigma^{-1/2} / (4 kappa_used).  kappa_used is
// max(cond(sigma), 1/(4 lambda_min(sigma))) with slack: the second floor
// keeps ||gamma|| <= 1 even when cond(sigma) alone would not.
struct GammaBundle {
  BlockEncoding gamma_encoding;
  double kappa_sigma = 1.0;  // condition number of sigma
  double kappa_used = 1.0;   // normalization divided out of gamma
  double kappa_gamma = 1.0;  // 1 / lambda_min(gamma), with slack
  CMat oracle_gamma;         // dense reference for the same matrix
};

// estimate = raw * prod(multipliers) + addend; replay() recomputes it in
// exactly that order so reports can be audited bit for bit.
struct NormalizationTrail {
  double raw = 0.0;
  std::vector<double> multipliers;
  double addend = 0.0;

  double replay() const;
  std::string to_string() const;
};

struct DivergenceOptions {
  AccessModel access = AccessModel::purification;
  bool noise = false;       // emulate amplitude-estimation jitter
  double approx_share = 0.5;  // fraction of eps spent on approximation
  std::uint64_t seed = 12345;
};

struct DivergenceReport {
  std::string route;         // "route1", "route2", "general_convex"
  std::string access_model;  // "purification", "sample_emulated"
  std::string f_name;
  int dim = 0;
  double eps_requested = 0.0;
  double estimate = 0.0;
  double oracle = 0.0;
  NormalizationTrail trail;
  double eps_ledger = 0.0;  // encoding-error ledger of the final block
  double kappa_sigma = 1.0;
  double kappa_used = 1.0;
  double kappa_gamma = 1.0;
  int quadrature_m = 0;  // resolvent node count (route2 / general_convex)
  bool noise_applied = false;
  long long repetitions = 1;
  QueryCount queries;
  std::shared_ptr<const ProvNode> provenance;

  // Line-oriented key=value block (machine readable, 17-digit doubles).
  std::string to_kv() const;
  // Human-readable summary.
  std::string to_text() const;
};

// Exact spectral evaluation; DomainError when f is not finite on the
// spectrum, ValidationError for a singular sigma.
double oracle_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const FunctionSpec& f);

// encode_density x2 -> power_neg(c = 1/2) -> product x2; eps is the ledger
// budget for the composite encoding.
GammaBundle build_gamma(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double eps);

// Direct polynomial route: x p(x) applied to gamma by one singular-value
// transform, then the trace path and the normalization trail.
DivergenceReport xlogx_route1(const DensityMatrix& rho,
                              const DensityMatrix& sigma, double eps,
                              const DivergenceOptions& opt = {});

// Resolvent route: gamma log gamma assembled from shifted inversions
// (gamma + tau_k I)^{-1} combined with quadrature weights, amplified back
// to unit scale, then the same trace path.
DivergenceReport xlogx_route2(const DensityMatrix& rho,
                              const DensityMatrix& sigma, double eps,
                              const DivergenceOptions& opt = {});

// Any operator-convex f with a certified rational form
// r(x) = a + b x + c x^2 + sum_k w_k (x-1)^2 (x + tau_k)^{-1}, evaluated on
// A = sigma^{-1/2} rho sigma^{-1/2} through block primitives.
DivergenceReport general_convex(const DensityMatrix& rho,
                                const DensityMatrix& sigma,
                                const FunctionSpec& f, double eps,
                                const DivergenceOptions& opt = {});

struct TraceInfo {
  long long repetitions = 1;
  bool noise_applied = false;
  QueryCount queries;
};

// Additive-accuracy estimate of Tr[sigma * extract(g)].
//   purification:    returns the trace exactly (desk scale), charging
//                    (queries of g + one sigma preparation) x ceil(1/eps).
//   sample_emulated: returns pi/(4N) * Tr[sigma * extract(g)], the
//                    normalized-trace convention, charging ceil(1/eps^2)
//                    repetitions; callers multiply 4N/pi back in the trail.
// noise adds a seeded uniform perturbation of magnitude <= eps.
double trace_expectation(const DensityMatrix& sigma, const BlockEncoding& g,
                         AccessModel access, double eps, bool noise, Rng& rng,
                         TraceInfo* info = nullptr);

}  // namespace qmatfun
