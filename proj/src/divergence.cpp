#include "qmatfun/divergence.hpp"

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

constexpr double kPi = 3.141592653589793238462643383279502884;

double min_eigenvalue(const CMat& hermitian_block) {
  SpectralDecomposition sd = hermitian_eig(
      HermitianMatrix::from_symmetric_parts(
          0.5 * (hermitian_block + hermitian_block.adjoint())));
  return sd.values[0];
}

// sigma^{-1/2} rho sigma^{-1/2}, the conjugated ratio the divergence
// evaluates f on.
CMat conjugated_ratio(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ParameterError("divergence: rho and sigma dimensions differ");
  }
  if (sigma.psd().spectral_floor() <= tol::invert_floor) {
    throw ValidationError("divergence: sigma is numerically singular (floor " +
                          format_g17(sigma.psd().spectral_floor()) + ")");
  }
  const HermitianMatrix inv_root = apply_spectral_function(
      sigma.psd(), [](double x) { return 1.0 / std::sqrt(x); });
  CMat a = inv_root.mat() * rho.mat() * inv_root.mat();
  return 0.5 * (a + a.adjoint());
}

std::shared_ptr<const ProvNode> wrap_node(const std::string& op,
                                          const std::string& detail,
                                          const BlockEncoding& be) {
  auto node = std::make_shared<ProvNode>();
  node->op = op;
  node->detail = detail;
  node->alpha = be.alpha();
  node->ancillas = be.ancilla_count();
  node->eps = be.eps_ledger();
  node->queries = be.queries();
  node->children = {be.provenance()};
  return node;
}

void check_eps(double eps, const char* who) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError(std::string(who) + ": eps must lie in (0, 1)");
  }
}

// Shared tail of every route: estimate S = Tr[sigma * extract(g)], record
// the trail, and replay it to produce the estimate.  `multipliers` are the
// factors scaled out by the pipeline; for sample access the normalized-trace
// convention adds 4N/pi up front.
void run_trace_step(DivergenceReport& rep, const DensityMatrix& sigma,
                    const BlockEncoding& g, double eps_trace,
                    std::vector<double> multipliers, double addend,
                    const DivergenceOptions& opt) {
  double meff = 1.0;
  for (double m : multipliers) meff *= std::abs(m);
  meff = std::max(meff, 1e-300);
  double eps_call = eps_trace / meff;
  if (opt.access == AccessModel::sample_emulated) {
    const double scale = 4.0 * sigma.dim() / kPi;
    multipliers.insert(multipliers.begin(), scale);
    eps_call /= scale;
  }
  Rng rng(opt.seed);
  TraceInfo info;
  const double raw = trace_expectation(sigma, g, opt.access, eps_call,
                                       opt.noise, rng, &info);
  rep.trail.raw = raw;
  rep.trail.multipliers = std::move(multipliers);
  rep.trail.addend = addend;
  rep.estimate = rep.trail.replay();
  rep.access_model = access_model_name(opt.access);
  rep.noise_applied = info.noise_applied;
  rep.repetitions = info.repetitions;
  rep.queries = info.queries;
  rep.eps_ledger = g.eps_ledger();
  rep.provenance = g.provenance();
}

}  // namespace

std::string access_model_name(AccessModel m) {
  return m == AccessModel::purification ? "purification" : "sample_emulated";
}

double NormalizationTrail::replay() const {
  double v = raw;
  for (double m : multipliers) v *= m;
  return v + addend;
}

std::string NormalizationTrail::to_string() const {
  std::ostringstream os;
  os << "raw=" << format_g17(raw);
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    os << " *" << format_g17(multipliers[i]);
  }
  os << " +" << format_g17(addend);
  return os.str();
}

double oracle_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const FunctionSpec& f) {
  const CMat a = conjugated_ratio(rho, sigma);
  const HermitianMatrix fa = apply_spectral_function(
      HermitianMatrix::from_symmetric_parts(a),
      [&f](double x) { return f(std::max(x, 0.0)); });
  return (sigma.mat() * fa.mat()).trace().real();
}

GammaBundle build_gamma(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double eps) {
  check_eps(eps, "build_gamma");
  const CMat a = conjugated_ratio(rho, sigma);
  const double cond = condition_number(sigma.psd());
  const double floor_sigma = sigma.psd().spectral_floor();
  const double kappa_used =
      std::max(cond, 1.0 / (4.0 * floor_sigma)) * (1.0 + 1e-9);

  GammaBundle bundle;
  bundle.kappa_sigma = cond;
  bundle.kappa_used = kappa_used;
  bundle.oracle_gamma = a / (4.0 * kappa_used);

  const double lam_min = min_eigenvalue(bundle.oracle_gamma);
  if (lam_min <= tol::invert_floor) {
    throw WindowError("build_gamma: gamma floor " + format_g17(lam_min) +
                      " too small; rho is numerically singular relative to "
                      "sigma");
  }
  bundle.kappa_gamma = (1.0 + 1e-9) / lam_min;

  // The gamma fit error is later amplified by resolvent Lipschitz factors
  // (~kappa_gamma) and the 4 kappa trail multiplier, so it has to sit far
  // below the working tolerance; degree only grows logarithmically.
  const double eps_neg = std::min(eps / 8.0, 1e-10);
  BlockEncoding sig_enc = BlockEncoding::encode_density(sigma, "U_sigma");
  BlockEncoding rho_enc = BlockEncoding::encode_density(rho, "U_rho");
  BlockEncoding neg = power_neg(sig_enc, 0.5, kappa_used, eps_neg);
  BlockEncoding gamma = product(product(neg, rho_enc), neg);
  gamma.attach_target(bundle.oracle_gamma);
  bundle.gamma_encoding = std::move(gamma);
  return bundle;
}

double trace_expectation(const DensityMatrix& sigma, const BlockEncoding& g,
                         AccessModel access, double eps, bool noise, Rng& rng,
                         TraceInfo* info) {
  if (sigma.dim() != g.dim()) {
    throw ParameterError("trace_expectation: dimension mismatch");
  }
  if (!(eps > 0.0)) {
    throw ParameterError("trace_expectation: eps must be > 0");
  }
  const double exact = (sigma.mat() * g.extract_block()).trace().real();
  TraceInfo ti;
  double value = 0.0;
  if (access == AccessModel::purification) {
    ti.repetitions = static_cast<long long>(
        std::min(std::ceil(1.0 / eps), 4.0e18));
    ti.queries = g.queries();
    ti.queries.add("U_sigma", 1);
    ti.queries.add("U_sigma_dag", 1);
    ti.queries.scale(ti.repetitions);
    value = exact;
  } else {
    ti.repetitions = static_cast<long long>(
        std::min(std::ceil(1.0 / (eps * eps)), 4.0e18));
    ti.queries = g.queries();
    ti.queries.add("sigma_copies", 1);
    ti.queries.scale(ti.repetitions);
    value = kPi / (4.0 * sigma.dim()) * exact;
  }
  if (noise) {
    value += eps * (2.0 * rng.uniform() - 1.0);
    ti.noise_applied = true;
  }
  if (info) *info = ti;
  return value;
}

DivergenceReport xlogx_route1(const DensityMatrix& rho,
                              const DensityMatrix& sigma, double eps,
                              const DivergenceOptions& opt) {
  check_eps(eps, "xlogx_route1");
  const FunctionSpec f = FunctionSpec::xlogx();
  DivergenceReport rep;
  rep.route = "route1";
  rep.f_name = f.name();
  rep.dim = rho.dim();
  rep.eps_requested = eps;
  rep.oracle = oracle_divergence(rho, sigma, f);

  GammaBundle bundle = build_gamma(rho, sigma, eps);
  rep.kappa_sigma = bundle.kappa_sigma;
  rep.kappa_used = bundle.kappa_used;
  rep.kappa_gamma = bundle.kappa_gamma;

  // The fit window must contain the realized spectrum, which can sit a hair
  // below the oracle floor.
  const double lam_eff =
      std::min(min_eigenvalue(bundle.gamma_encoding.block()),
               min_eigenvalue(bundle.oracle_gamma));
  if (lam_eff <= tol::invert_floor) {
    throw WindowError("xlogx_route1: realized gamma floor " +
                      format_g17(lam_eff) + " too small");
  }
  const double beta = lam_eff * (1.0 - 1e-6);
  const double mult_log = 2.0 * std::log(beta);  // negative
  const double four_kappa = 4.0 * bundle.kappa_used;
  const double meff = std::abs(mult_log) * four_kappa;

  const double eps_f = eps * opt.approx_share;
  const double eps_tr = eps - eps_f;
  const Polynomial p = xlogx_poly(beta, eps_f / (2.0 * meff));
  TransformRecord rec;
  BlockEncoding g = apply_polynomial(bundle.gamma_encoding, p, &rec);

  run_trace_step(rep, sigma, g, eps_tr, {mult_log, four_kappa},
                 std::log(four_kappa), opt);
  return rep;
}

DivergenceReport xlogx_route2(const DensityMatrix& rho,
                              const DensityMatrix& sigma, double eps,
                              const DivergenceOptions& opt) {
  check_eps(eps, "xlogx_route2");
  const FunctionSpec f = FunctionSpec::xlogx();
  DivergenceReport rep;
  rep.route = "route2";
  rep.f_name = f.name();
  rep.dim = rho.dim();
  rep.eps_requested = eps;
  rep.oracle = oracle_divergence(rho, sigma, f);

  GammaBundle bundle = build_gamma(rho, sigma, eps);
  rep.kappa_sigma = bundle.kappa_sigma;
  rep.kappa_used = bundle.kappa_used;
  rep.kappa_gamma = bundle.kappa_gamma;
  const BlockEncoding& gamma_enc = bundle.gamma_encoding;

  const double lam_eff =
      std::min(min_eigenvalue(gamma_enc.block()),
               min_eigenvalue(bundle.oracle_gamma));
  if (lam_eff <= tol::invert_floor) {
    throw WindowError("xlogx_route2: realized gamma floor " +
                      format_g17(lam_eff) + " too small");
  }
  const double beta = lam_eff * (1.0 - 1e-6);
  const double four_kappa = 4.0 * bundle.kappa_used;
  const double eps_f = eps * opt.approx_share;
  const double eps_tr = eps - eps_f;

  // Quadrature certifies R(x) ~ x log(x)/log(beta); the pipeline assembles
  // the unnormalized sum, so its target is x log x directly and the cert
  // error is inflated by |log beta| when it propagates.
  const double log_beta_mag = std::max(1.0, std::abs(std::log(beta)));
  const RationalApprox rule =
      log_stieltjes(beta, eps_f / (2.0 * four_kappa * log_beta_mag));
  rep.quadrature_m = rule.m();

  const double lam_floor = lam_eff * (1.0 - 1e-6);
  std::vector<double> kap(rule.m()), ck(rule.m());
  double weight_on_gamma = 0.0;
  double sum_abs_g = 0.0;
  for (int k = 0; k < rule.m(); ++k) {
    const double tau = rule.nodes[k];
    kap[k] = (1.0 + tau) / (lam_floor + tau) * (1.0 + 1e-9);
    ck[k] = kap[k] / (1.0 + tau);
    sum_abs_g += rule.raw_weights[k] * ck[k];
    weight_on_gamma += rule.raw_weights[k] * rule.alphas[k];
  }
  const double eps_inv = std::min(
      eps_f / (4.0 * four_kappa * std::max(1.0, weight_on_gamma + sum_abs_g)),
      1e-6);

  BlockEncoding id_enc = BlockEncoding::identity_encoding(rho.dim());
  std::vector<BlockEncoding> encs;
  std::vector<double> weights;
  encs.push_back(gamma_enc);
  weights.push_back(weight_on_gamma);
  for (int k = 0; k < rule.m(); ++k) {
    BlockEncoding shifted =
        linear_combination({gamma_enc, id_enc}, {1.0, rule.nodes[k]});
    BlockEncoding inv = invert(shifted, kap[k], eps_inv);
    encs.push_back(product(gamma_enc, inv));
    weights.push_back(-rule.raw_weights[k] * ck[k]);
  }
  BlockEncoding big = linear_combination(encs, weights);
  std::ostringstream label;
  label << "m=" << rule.m() << " alpha=" << format_g17(big.alpha());
  big = BlockEncoding::from_parts(big.block(), big.alpha(), big.eps_ledger(),
                                  big.ancilla_count(), big.queries(),
                                  wrap_node("weighted-resolvent-sum",
                                            label.str(), big));

  // Remove the LCU subnormalisation.  The target has norm about 1/e, so the
  // 0.75 amplification window is safe; if the combined weight is already
  // close to 1 the leftover factor rides the trail instead.
  const double alpha_out = big.alpha();
  std::vector<double> multipliers;
  BlockEncoding g = big.with_alpha_one();
  if (alpha_out > 1.0 + 1e-9) {
    g = amplify(g, alpha_out, 0.25, std::min(0.1, eps));
  } else {
    multipliers.push_back(alpha_out);
  }
  multipliers.push_back(four_kappa);

  run_trace_step(rep, sigma, g, eps_tr, std::move(multipliers),
                 std::log(four_kappa), opt);
  return rep;
}

DivergenceReport general_convex(const DensityMatrix& rho,
                                const DensityMatrix& sigma,
                                const FunctionSpec& f, double eps,
                                const DivergenceOptions& opt) {
  check_eps(eps, "general_convex");
  if (f.kind != FuncKind::convex) {
    throw ParameterError("general_convex: spec must be operator-convex");
  }
  DivergenceReport rep;
  rep.route = "general_convex";
  rep.f_name = f.name();
  rep.dim = rho.dim();
  rep.eps_requested = eps;
  rep.oracle = oracle_divergence(rho, sigma, f);

  GammaBundle bundle = build_gamma(rho, sigma, eps);
  rep.kappa_sigma = bundle.kappa_sigma;
  rep.kappa_used = bundle.kappa_used;
  rep.kappa_gamma = bundle.kappa_gamma;
  const BlockEncoding& gamma_enc = bundle.gamma_encoding;
  const double four_kappa = 4.0 * bundle.kappa_used;

  SpectralDecomposition sd_real = hermitian_eig(
      HermitianMatrix::from_symmetric_parts(
          0.5 * (gamma_enc.block() + gamma_enc.block().adjoint())));
  SpectralDecomposition sd_oracle = hermitian_eig(
      HermitianMatrix::from_symmetric_parts(bundle.oracle_gamma));
  const double lam_eff = std::min(sd_real.values[0], sd_oracle.values[0]);
  const double lam_hi =
      std::max(sd_real.values[sd_real.values.size() - 1],
               sd_oracle.values[sd_oracle.values.size() - 1]);
  if (lam_eff <= tol::invert_floor) {
    throw WindowError("general_convex: realized gamma floor " +
                      format_g17(lam_eff) + " too small");
  }

  const double eps_f = eps * opt.approx_share;
  const double eps_tr = eps - eps_f;
  const double lo_a = four_kappa * lam_eff * (1.0 - 1e-6);
  const double hi_a = four_kappa * lam_hi * (1.0 + 1e-6);
  const RationalApprox rational = kraus_rational(f, lo_a, eps_f / 2.0, hi_a);
  rep.quadrature_m = rational.m();

  const double lam_floor = lam_eff * (1.0 - 1e-6);
  const double delta_norm = std::max(hi_a - 1.0, 1.0 - lo_a);
  std::vector<double> weight_k(rational.m());
  double err_gain = 0.0;
  for (int k = 0; k < rational.m(); ++k) {
    const double tau_small = rational.nodes[k] / four_kappa;
    const double kap = (1.0 + tau_small) / (lam_floor + tau_small) *
                       (1.0 + 1e-9);
    const double c_small = kap / (1.0 + tau_small);
    weight_k[k] = rational.weights[k] * c_small / four_kappa;
    err_gain += weight_k[k] * delta_norm * delta_norm;
  }
  const double eps_inv =
      std::min(eps_f / (4.0 * std::max(1.0, err_gain)), 1e-6);

  BlockEncoding id_enc = BlockEncoding::identity_encoding(rho.dim());
  BlockEncoding delta_enc =
      linear_combination({gamma_enc, id_enc}, {four_kappa, -1.0});
  BlockEncoding delta_sq = product(delta_enc, delta_enc);

  std::vector<BlockEncoding> encs = {id_enc, gamma_enc,
                                     product(gamma_enc, gamma_enc)};
  std::vector<double> weights = {rational.a, rational.b * four_kappa,
                                 rational.c * four_kappa * four_kappa};
  for (int k = 0; k < rational.m(); ++k) {
    const double tau_small = rational.nodes[k] / four_kappa;
    const double kap = (1.0 + tau_small) / (lam_floor + tau_small) *
                       (1.0 + 1e-9);
    BlockEncoding shifted =
        linear_combination({gamma_enc, id_enc}, {1.0, tau_small});
    BlockEncoding inv = invert(shifted, kap, eps_inv);
    encs.push_back(product(delta_sq, inv));
    weights.push_back(weight_k[k]);
  }
  BlockEncoding big = linear_combination(encs, weights);
  std::ostringstream label;
  label << "m=" << rational.m() << " f=" << f.name();
  big = BlockEncoding::from_parts(big.block(), big.alpha(), big.eps_ledger(),
                                  big.ancilla_count(), big.queries(),
                                  wrap_node("convex-rational-assembly",
                                            label.str(), big));

  run_trace_step(rep, sigma, big, eps_tr, {}, 0.0, opt);
  return rep;
}

std::string DivergenceReport::to_kv() const {
  std::ostringstream os;
  os << "route=" << route << "\n";
  os << "access=" << access_model << "\n";
  os << "f=" << f_name << "\n";
  os << "dim=" << dim << "\n";
  os << "eps_requested=" << format_g17(eps_requested) << "\n";
  os << "estimate=" << format_g17(estimate) << "\n";
  os << "oracle=" << format_g17(oracle) << "\n";
  os << "abs_error=" << format_g17(std::abs(estimate - oracle)) << "\n";
  os << "trail_raw=" << format_g17(trail.raw) << "\n";
  for (std::size_t i = 0; i < trail.multipliers.size(); ++i) {
    os << "trail_mult_" << i << "=" << format_g17(trail.multipliers[i])
       << "\n";
  }
  os << "trail_addend=" << format_g17(trail.addend) << "\n";
  os << "eps_ledger=" << format_g17(eps_ledger) << "\n";
  os << "kappa_sigma=" << format_g17(kappa_sigma) << "\n";
  os << "kappa_used=" << format_g17(kappa_used) << "\n";
  os << "kappa_gamma=" << format_g17(kappa_gamma) << "\n";
  os << "quadrature_m=" << quadrature_m << "\n";
  os << "noise=" << (noise_applied ? 1 : 0) << "\n";
  os << "repetitions=" << repetitions << "\n";
  os << "queries_total=" << queries.total() << "\n";
  for (const auto& [k, v] : queries.tallies) {
    os << "queries." << k << "=" << v << "\n";
  }
  return os.str();
}

std::string DivergenceReport::to_text() const {
  std::ostringstream os;
  os << "divergence " << f_name << " via " << route << " (" << access_model
     << " access)\n";
  os << "  dim " << dim << ", eps " << format_g17(eps_requested)
     << (noise_applied ? ", noise on" : "") << "\n";
  os << "  estimate " << format_g17(estimate) << "\n";
  os << "  oracle   " << format_g17(oracle) << "  |error| "
     << format_g17(std::abs(estimate - oracle)) << "\n";
  os << "  trail    " << trail.to_string() << "\n";
  os << "  kappa_sigma " << format_g17(kappa_sigma) << ", kappa_used "
     << format_g17(kappa_used) << ", kappa_gamma " << format_g17(kappa_gamma)
     << "\n";
  if (quadrature_m > 0) os << "  quadrature m " << quadrature_m << "\n";
  os << "  encoding eps ledger " << format_g17(eps_ledger) << "\n";
  os << "  repetitions " << repetitions << ", queries "
     << queries.to_string() << "\n";
  return os.str();
}

}  // namespace qmatfun
