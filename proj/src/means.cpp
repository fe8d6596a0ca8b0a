#include "qmatfun/means.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "qmatfun/funcapprox.hpp"
#include "qmatfun/qsvt.hpp"

namespace qmatfun {

namespace {

constexpr double kSlack = 1e-9;

void validate_pipeline_inputs(const PSDMatrix& a, const PSDMatrix& b,
                              const FunctionSpec& f, double delta,
                              double eps) {
  if (a.dim() != b.dim()) {
    throw ParameterError("mean: A and B dimensions differ");
  }
  if (f.kind != FuncKind::monotone) {
    throw ParameterError("mean: spec must be operator-monotone");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("mean: delta must lie in (0, 1)");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("mean: eps must lie in (0, 1)");
  }
  for (const auto* m : {&a, &b}) {
    const double lo = m->spectral_floor();
    const double hi = m->spectral_ceiling();
    if (lo < delta - 1e-9 || hi > 1.0 + 1e-12) {
      throw ValidationError("mean: spectrum [" + format_g17(lo) + ", " +
                            format_g17(hi) + "] escapes [delta, 1] with delta " +
                            format_g17(delta));
    }
  }
}

CMat symmetrized(const CMat& m) { return 0.5 * (m + m.adjoint()); }

// Row-major "rows cols re im re im ..." on one line, for key=value reports.
std::string matrix_one_line(const CMat& m) {
  std::ostringstream os;
  os << m.rows() << " " << m.cols();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      os << " " << format_g17(m(r, c).real()) << " "
         << format_g17(m(r, c).imag());
    }
  }
  return os.str();
}

void finish_report(MeanReport& rep, const PSDMatrix& a, const PSDMatrix& b,
                   const FunctionSpec& f, const BlockEncoding& final_enc,
                   double rescale) {
  rep.result = symmetrized(rescale * final_enc.extract_block());
  rep.oracle = oracle_mean(a, b, f);
  rep.error_norm = operator_norm(rep.result - rep.oracle);
  rep.rescale = rescale;
  rep.alpha_ledger = final_enc.alpha();
  rep.eps_ledger = std::abs(rescale) * final_enc.eps_ledger();
  rep.queries = final_enc.queries();
  rep.provenance = final_enc.provenance();

  SpectralDecomposition sd =
      hermitian_eig(HermitianMatrix::from_symmetric_parts(rep.result));
  if (sd.values[0] < -1e-9) {
    throw ValidationError("mean: result lost positivity, floor " +
                          format_g17(sd.values[0]));
  }
}

QuadratureRule tuned_measure(const FunctionSpec& f, double eps, int m) {
  if (m > 0) return kubo_ando_measure(f, m);
  const double target = std::min(eps / 4.0, 1e-6);
  QuadratureRule rule = kubo_ando_measure(f, 8);
  for (int size : {16, 32, 64, 128, 256}) {
    if (rule.certified_error <= target) break;
    rule = kubo_ando_measure(f, size);
  }
  return rule;
}

}  // namespace

std::string mean_method_name(MeanMethod m) {
  switch (m) {
    case MeanMethod::oracle: return "oracle";
    case MeanMethod::harmonic_mixture: return "harmonic_mixture";
    case MeanMethod::stieltjes: return "stieltjes";
  }
  throw ParameterError("mean_method_name: bad enum");
}

MeanMethod mean_method_from_name(const std::string& name) {
  if (name == "oracle") return MeanMethod::oracle;
  if (name == "harmonic_mixture" || name == "harmonic-mixture") {
    return MeanMethod::harmonic_mixture;
  }
  if (name == "stieltjes") return MeanMethod::stieltjes;
  throw ParameterError("unknown mean method '" + name + "'");
}

CMat oracle_mean(const PSDMatrix& a, const PSDMatrix& b,
                 const FunctionSpec& f) {
  if (a.dim() != b.dim()) {
    throw ParameterError("oracle_mean: dimensions differ");
  }
  for (const auto* m : {&a, &b}) {
    if (m->spectral_floor() <= tol::invert_floor) {
      throw ValidationError("oracle_mean: input numerically singular (floor " +
                            format_g17(m->spectral_floor()) + ")");
    }
  }
  const CMat root = apply_spectral_function(
                        a, [](double x) { return std::sqrt(x); })
                        .mat();
  const CMat inv_root = apply_spectral_function(
                            a, [](double x) { return 1.0 / std::sqrt(x); })
                            .mat();
  const CMat x = symmetrized(inv_root * b.mat() * inv_root);
  const HermitianMatrix fx = apply_spectral_function(
      HermitianMatrix::from_symmetric_parts(x),
      [&f](double v) { return f(std::max(v, 0.0)); });
  return symmetrized(root * fx.mat() * root);
}

CMat spectral_geometric_mean(const PSDMatrix& a, const PSDMatrix& b,
                             double t) {
  if (a.dim() != b.dim()) {
    throw ParameterError("spectral_geometric_mean: dimensions differ");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ParameterError("spectral_geometric_mean: t must lie in [0, 1]");
  }
  if (a.spectral_floor() <= tol::invert_floor ||
      b.spectral_floor() <= tol::invert_floor) {
    throw ValidationError("spectral_geometric_mean: singular input");
  }
  const CMat root = apply_spectral_function(
                        a, [](double x) { return std::sqrt(x); })
                        .mat();
  const CMat inv_root = apply_spectral_function(
                            a, [](double x) { return 1.0 / std::sqrt(x); })
                            .mat();
  const CMat inner = symmetrized(root * b.mat() * root);
  const CMat inner_t = apply_spectral_function(
                           HermitianMatrix::from_symmetric_parts(inner),
                           [t](double x) { return std::pow(std::max(x, 0.0), t); })
                           .mat();
  const CMat sharp = symmetrized(inv_root * inner_t * inv_root);
  const CMat sharp_root = apply_spectral_function(
                              HermitianMatrix::from_symmetric_parts(sharp),
                              [](double x) { return std::sqrt(std::max(x, 0.0)); })
                              .mat();
  const CMat a_pow = apply_spectral_function(
                         a, [t](double x) { return std::pow(x, 2.0 - 2.0 * t); })
                         .mat();
  return symmetrized(sharp_root * a_pow * sharp_root);
}

MeanReport harmonic_mixture_mean(const PSDMatrix& a, const PSDMatrix& b,
                                 const FunctionSpec& f, double delta,
                                 double eps, int m) {
  validate_pipeline_inputs(a, b, f, delta, eps);
  MeanReport rep;
  rep.method = "harmonic_mixture";
  rep.f_name = f.name();
  rep.delta = delta;
  rep.eps_requested = eps;

  const QuadratureRule rule = tuned_measure(f, eps, m);
  rep.quadrature_m = rule.m();

  // extract(neg*) = A^{-1} / kappa_inv; the per-node combination then has
  // spectrum inside [1/kappa_t, 1/(1+s)], so one inversion window covers
  // every node.
  const double kappa_inv = (1.0 + kSlack) / delta;
  const double kappa_t = kappa_inv * (1.0 + kSlack);
  const double eps_n = std::min(eps * delta / 32.0, 1e-8);
  const double eps_i = eps / 8.0;

  BlockEncoding a_enc = BlockEncoding::dilate(a.mat(), "U_A");
  BlockEncoding b_enc = BlockEncoding::dilate(b.mat(), "U_B");
  BlockEncoding neg_a = invert(a_enc, kappa_inv, eps_n);
  BlockEncoding neg_b = invert(b_enc, kappa_inv, eps_n);

  std::vector<BlockEncoding> harmonic;
  std::vector<double> weights;
  harmonic.reserve(rule.m());
  for (int j = 0; j < rule.m(); ++j) {
    const double t = rule.nodes[j];
    BlockEncoding mix = linear_combination({neg_a, neg_b}, {1.0 - t, t});
    harmonic.push_back(invert(mix, kappa_t, eps_i));
    weights.push_back(rule.weights[j] * (1.0 + kSlack));
  }
  BlockEncoding final_enc = linear_combination(harmonic, weights);
  std::ostringstream label;
  label << "m=" << rule.m() << " delta=" << format_g17(delta);
  auto node = std::make_shared<ProvNode>();
  node->op = "harmonic-mixture";
  node->detail = label.str();
  node->alpha = final_enc.alpha();
  node->ancillas = final_enc.ancilla_count();
  node->eps = final_enc.eps_ledger();
  node->queries = final_enc.queries();
  node->children = {final_enc.provenance()};
  final_enc = BlockEncoding::from_parts(
      final_enc.block(), final_enc.alpha(), final_enc.eps_ledger(),
      final_enc.ancilla_count(), final_enc.queries(), node);

  finish_report(rep, a, b, f, final_enc, 1.0);
  return rep;
}

MeanReport stieltjes_mean(const PSDMatrix& a, const PSDMatrix& b,
                          const FunctionSpec& f, double delta, double eps,
                          int m) {
  validate_pipeline_inputs(a, b, f, delta, eps);
  MeanReport rep;
  rep.method = "stieltjes";
  rep.f_name = f.name();
  rep.delta = delta;
  rep.eps_requested = eps;

  const double kappa = (1.0 + kSlack) / delta;
  const double psi = 1.0 / (4.0 * kappa);
  // These fits are later amplified by resolvent factors up to ~1/delta^2,
  // so they sit far below the requested tolerance.
  const double eps_n = std::min(eps * delta * delta / 128.0, 1e-9);

  BlockEncoding a_enc = BlockEncoding::dilate(a.mat(), "U_A");
  BlockEncoding b_enc = BlockEncoding::dilate(b.mat(), "U_B");
  BlockEncoding neg_a = power_neg(a_enc, 0.5, kappa, eps_n);
  BlockEncoding x_enc = product(product(neg_a, b_enc), neg_a);

  const CMat inv_root = apply_spectral_function(
                            a, [](double x) { return 1.0 / std::sqrt(x); })
                            .mat();
  const CMat x_oracle = symmetrized(inv_root * b.mat() * inv_root);
  SpectralDecomposition sd_oracle =
      hermitian_eig(HermitianMatrix::from_symmetric_parts(x_oracle));
  SpectralDecomposition sd_real =
      hermitian_eig(HermitianMatrix::from_symmetric_parts(
          symmetrized(x_enc.block()) / psi));
  const double lam_lo =
      std::min(sd_oracle.values[0], sd_real.values[0]) * (1.0 - 1e-6);
  const double lam_hi = std::max(sd_oracle.values[sd_oracle.values.size() - 1],
                                 sd_real.values[sd_real.values.size() - 1]) *
                        (1.0 + 1e-6);
  if (lam_lo <= tol::invert_floor) {
    throw WindowError("stieltjes_mean: ratio floor " + format_g17(lam_lo) +
                      " too small");
  }

  const RationalApprox rule =
      m > 0 ? monotone_stieltjes_m(f, lam_lo, m, lam_hi)
            : monotone_stieltjes_rational(f, lam_lo, std::min(eps / 4.0, 1e-6),
                                          lam_hi);
  rep.quadrature_m = rule.m();

  std::vector<double> kap(rule.m()), ek(rule.m());
  double sum_we = 0.0;
  for (int k = 0; k < rule.m(); ++k) {
    const double lam = rule.nodes[k];
    kap[k] = (1.0 + lam * psi) / (psi * (lam_lo + lam)) * (1.0 + kSlack);
    ek[k] = kap[k] / (1.0 + lam * psi);
    sum_we += rule.weights[k] * ek[k];
  }
  const double eps_i = std::min(eps / (8.0 * std::max(1.0, sum_we)), 1e-6);

  BlockEncoding id_enc = BlockEncoding::identity_encoding(a.dim());
  std::vector<BlockEncoding> encs = {id_enc, x_enc};
  std::vector<double> weights = {rule.a, rule.b / psi};
  for (int k = 0; k < rule.m(); ++k) {
    BlockEncoding shifted =
        linear_combination({x_enc, id_enc}, {1.0, rule.nodes[k] * psi});
    BlockEncoding inv = invert(shifted, kap[k], eps_i);
    encs.push_back(product(x_enc, inv));
    weights.push_back(rule.weights[k] * ek[k]);
  }
  BlockEncoding big = linear_combination(encs, weights);
  std::ostringstream label;
  label << "m=" << rule.m() << " f=" << f.name();
  auto node = std::make_shared<ProvNode>();
  node->op = "resolvent-assembly";
  node->detail = label.str();
  node->alpha = big.alpha();
  node->ancillas = big.ancilla_count();
  node->eps = big.eps_ledger();
  node->queries = big.queries();
  node->children = {big.provenance()};
  big = BlockEncoding::from_parts(big.block(), big.alpha(), big.eps_ledger(),
                                  big.ancilla_count(), big.queries(), node);

  const double alpha_out = big.alpha();
  BlockEncoding g = big.with_alpha_one();
  const double sig = operator_norm(g.block());
  double gain = 1.0;
  if (sig > 0.0) {
    gain = std::min(alpha_out, 0.75 / sig * (1.0 - kSlack));
  }
  if (gain > 1.0 + 1e-6) {
    const double rem_est = alpha_out / gain;
    const double eps_a =
        std::min(eps / (8.0 * std::max(1.0, 4.0 * rem_est)), 0.05);
    g = amplify(g, gain, 0.25, eps_a);
  } else {
    gain = 1.0;
  }
  const double rem = alpha_out / gain;

  const double eps_p = std::min(eps / (32.0 * std::max(1.0, rem)), 1e-8);
  BlockEncoding root_a = power_pos(a_enc, 0.5, eps_p);
  BlockEncoding final_enc = product(product(root_a, g), root_a);

  finish_report(rep, a, b, f, final_enc, 4.0 * rem);
  return rep;
}

std::string MeanReport::to_kv() const {
  std::ostringstream os;
  os << "method=" << method << "\n";
  os << "f=" << f_name << "\n";
  os << "dim=" << result.rows() << "\n";
  os << "delta=" << format_g17(delta) << "\n";
  os << "eps_requested=" << format_g17(eps_requested) << "\n";
  os << "error_norm=" << format_g17(error_norm) << "\n";
  os << "quadrature_m=" << quadrature_m << "\n";
  os << "rescale=" << format_g17(rescale) << "\n";
  os << "alpha_ledger=" << format_g17(alpha_ledger) << "\n";
  os << "eps_ledger=" << format_g17(eps_ledger) << "\n";
  os << "queries_total=" << queries.total() << "\n";
  for (const auto& [k, v] : queries.tallies) {
    os << "queries." << k << "=" << v << "\n";
  }
  os << "result=" << matrix_one_line(result) << "\n";
  os << "oracle=" << matrix_one_line(oracle) << "\n";
  return os.str();
}

std::string MeanReport::to_text() const {
  std::ostringstream os;
  os << "mean " << f_name << " via " << method << "\n";
  os << "  dim " << result.rows() << ", delta " << format_g17(delta)
     << ", eps " << format_g17(eps_requested) << "\n";
  os << "  error vs oracle " << format_g17(error_norm) << "\n";
  os << "  quadrature m " << quadrature_m << ", rescale "
     << format_g17(rescale) << "\n";
  os << "  encoding eps ledger " << format_g17(eps_ledger) << "\n";
  os << "  queries " << queries.to_string() << "\n";
  return os.str();
}

}  // namespace qmatfun
