// Command-line front end: divergence and mean pipelines, quadrature and cost
// tables, and the self-check suite.  Machine-readable output is line-oriented
// key=value with 17-digit doubles; identical arguments and seed produce
// byte-identical reports.
//
// Exit codes:
//   0 success (estimate within tolerance, or noise model on)
//   1 tolerance exceeded
//   2 bad parameters / usage
//   3 I/O failure
//   4 validation failure (malformed matrix, broken invariant)
//   5 spectral window violation
//   6 domain error (function undefined on spectrum)
//   7 internal error

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmatfun/blockenc.hpp"
#include "qmatfun/common.hpp"
#include "qmatfun/divergence.hpp"
#include "qmatfun/funcapprox.hpp"
#include "qmatfun/funcspec.hpp"
#include "qmatfun/matcore.hpp"
#include "qmatfun/matrix_io.hpp"
#include "qmatfun/means.hpp"
#include "qmatfun/qsvt.hpp"
#include "qmatfun/resources.hpp"

namespace {

using namespace qmatfun;

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitParameter = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;
constexpr int kExitWindow = 5;
constexpr int kExitDomain = 6;
constexpr int kExitInternal = 7;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QMATFUN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParameterError("QMATFUN_SEED is not an unsigned integer");
    }
  }
  return 12345;
}

void emit(const std::string& text, const std::string& kv,
          const std::string& out_path) {
  std::cout << text;
  if (out_path.empty()) {
    std::cout << "\n" << kv;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot open output file " + out_path);
  f << kv;
  if (!f) throw IoError("write failed on " + out_path);
}

FunctionSpec convex_spec(const std::string& name, double alpha) {
  if (name == "xlogx") return FunctionSpec::xlogx();
  if (name == "chi_square") return FunctionSpec::chi_square();
  if (name == "power_alpha") return FunctionSpec::power_alpha(alpha);
  if (name == "kl_form") return FunctionSpec::kl_form();
  throw ParameterError("unknown divergence function '" + name +
                       "' (xlogx, chi_square, power_alpha, kl_form)");
}

FunctionSpec monotone_spec(const std::string& name, double t, double p) {
  if (name == "arithmetic") return FunctionSpec::arithmetic(t);
  if (name == "harmonic") return FunctionSpec::harmonic(t);
  if (name == "geometric") return FunctionSpec::geometric(t);
  if (name == "logarithmic") return FunctionSpec::logarithmic();
  if (name == "heinz") return FunctionSpec::heinz(t);
  if (name == "power_p") return FunctionSpec::power_p(p, t);
  throw ParameterError("unknown mean function '" + name +
                       "' (arithmetic, harmonic, geometric, logarithmic, "
                       "heinz, power_p)");
}

DensityMatrix load_density(const std::string& path) {
  return DensityMatrix::from_matrix(read_matrix_file(path));
}

PSDMatrix load_psd(const std::string& path) {
  return PSDMatrix::from_matrix(read_matrix_file(path));
}

// ---------------------------------------------------------------- divergence

struct DivergenceArgs {
  std::string f = "xlogx";
  double alpha = 0.5;
  std::string rho_path, sigma_path;
  int route = 1;
  double eps = 1e-3;
  std::string access = "purification";
  bool noise = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool explain = false;
};

int run_divergence(const DivergenceArgs& a) {
  DivergenceOptions opt;
  if (a.access == "purification") {
    opt.access = AccessModel::purification;
  } else if (a.access == "sample" || a.access == "sample_emulated") {
    opt.access = AccessModel::sample_emulated;
  } else {
    throw ParameterError("access must be purification or sample_emulated");
  }
  opt.noise = a.noise;
  opt.seed = a.seed_set ? a.seed : default_seed();

  DensityMatrix rho = load_density(a.rho_path);
  DensityMatrix sigma = load_density(a.sigma_path);
  FunctionSpec f = convex_spec(a.f, a.alpha);

  DivergenceReport rep;
  if (a.f == "xlogx") {
    if (a.route == 1) {
      rep = xlogx_route1(rho, sigma, a.eps, opt);
    } else if (a.route == 2) {
      rep = xlogx_route2(rho, sigma, a.eps, opt);
    } else {
      throw ParameterError("route must be 1 or 2");
    }
  } else {
    rep = general_convex(rho, sigma, f, a.eps, opt);
  }

  std::string text = rep.to_text();
  if (a.explain && rep.provenance) {
    text += render_provenance(*rep.provenance);
  }
  emit(text, rep.to_kv(), a.out);

  if (rep.noise_applied) return kExitOk;
  return std::abs(rep.estimate - rep.oracle) <= a.eps ? kExitOk
                                                      : kExitTolerance;
}

// ---------------------------------------------------------------------- mean

struct MeanArgs {
  std::string f = "geometric";
  double t = 0.5;
  double p = 0.5;
  std::string a_path, b_path;
  std::string method = "stieltjes";
  double delta = 0.1;
  double eps = 1e-5;
  int m = 0;
  std::string out;
  std::string out_matrix;
  bool explain = false;
};

int run_mean(const MeanArgs& a) {
  PSDMatrix am = load_psd(a.a_path);
  PSDMatrix bm = load_psd(a.b_path);
  FunctionSpec f = monotone_spec(a.f, a.t, a.p);
  MeanMethod method = mean_method_from_name(a.method);

  MeanReport rep;
  if (method == MeanMethod::oracle) {
    rep.result = oracle_mean(am, bm, f);
    rep.oracle = rep.result;
    rep.method = "oracle";
    rep.f_name = f.name();
    rep.delta = a.delta;
    rep.eps_requested = a.eps;
  } else if (method == MeanMethod::harmonic_mixture) {
    rep = harmonic_mixture_mean(am, bm, f, a.delta, a.eps, a.m);
  } else {
    rep = stieltjes_mean(am, bm, f, a.delta, a.eps, a.m);
  }

  std::string text = rep.to_text();
  if (a.explain && rep.provenance) {
    text += render_provenance(*rep.provenance);
  }
  emit(text, rep.to_kv(), a.out);
  if (!a.out_matrix.empty()) {
    write_matrix_file(a.out_matrix, rep.result);
  }
  return rep.error_norm <= a.eps ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------- quadrature

struct QuadArgs {
  std::string kind = "log_stieltjes";
  double beta = 1.0 / 16.0;
  double eps = 1e-6;
  int m = 0;
  std::string f = "geometric";
  double t = 0.5;
  double p = 0.5;
  double delta = 0.1;
  double hi = 1.0;
  std::string out;
};

int run_quadrature(const QuadArgs& a) {
  std::ostringstream text, kv;
  kv << "kind=" << a.kind << "\n";
  if (a.kind == "log_poly") {
    Polynomial poly = log_poly(a.beta, a.eps);
    text << "polynomial log approximation on [" << format_g17(a.beta)
         << ", 1], target " << format_g17(a.eps) << "\n";
    text << "  degree " << poly.degree() << ", certified error "
         << format_g17(poly.certified_error()) << "\n";
    kv << "beta=" << format_g17(a.beta) << "\n";
    kv << "eps=" << format_g17(a.eps) << "\n";
    kv << "degree=" << poly.degree() << "\n";
    kv << "certified_error=" << format_g17(poly.certified_error()) << "\n";
    CostFormula bound = evaluate_cost(
        "qsvt_log_degree", {{"kappa_gamma", 1.0 / a.beta}, {"eps", a.eps}});
    text << "  degree bound " << format_g17(bound.value) << "\n";
    kv << "degree_bound=" << format_g17(bound.value) << "\n";
  } else if (a.kind == "log_stieltjes") {
    RationalApprox rule = a.m > 0 ? log_stieltjes_m(a.beta, a.m)
                                  : log_stieltjes(a.beta, a.eps);
    rule.check_invariants();
    text << "resolvent log approximation on [" << format_g17(a.beta)
         << ", 1]\n";
    text << "  m " << rule.m() << ", certified error "
         << format_g17(rule.certified_error) << "\n";
    CostFormula bound =
        evaluate_cost("log_rule_size", {{"beta", a.beta}, {"eps", a.eps}});
    text << "  size bound " << format_g17(bound.value) << "\n";
    text << "  k, node, weight, raw_weight\n";
    for (int k = 0; k < rule.m(); ++k) {
      text << "  " << k << " " << format_g17(rule.nodes[k]) << " "
           << format_g17(rule.weights[k]) << " "
           << format_g17(rule.raw_weights[k]) << "\n";
    }
    kv << "beta=" << format_g17(a.beta) << "\n";
    kv << "m=" << rule.m() << "\n";
    kv << "certified_error=" << format_g17(rule.certified_error) << "\n";
    kv << "size_bound=" << format_g17(bound.value) << "\n";
    for (int k = 0; k < rule.m(); ++k) {
      kv << "node_" << k << "=" << format_g17(rule.nodes[k]) << "\n";
      kv << "weight_" << k << "=" << format_g17(rule.weights[k]) << "\n";
    }
  } else if (a.kind == "kraus" || a.kind == "monotone") {
    FunctionSpec spec = a.kind == "kraus"
                            ? convex_spec(a.f, a.p)
                            : monotone_spec(a.f, a.t, a.p);
    RationalApprox rule;
    if (a.kind == "kraus") {
      rule = a.m > 0 ? kraus_rational_m(spec, a.delta, a.m, a.hi)
                     : kraus_rational(spec, a.delta, a.eps, a.hi);
    } else {
      rule = a.m > 0 ? monotone_stieltjes_m(spec, a.delta, a.m, a.hi)
                     : monotone_stieltjes_rational(spec, a.delta, a.eps, a.hi);
    }
    rule.check_invariants();
    text << "rational approximation of " << spec.name() << " on ["
         << format_g17(a.delta) << ", " << format_g17(a.hi) << "]\n";
    text << "  m " << rule.m() << ", certified error "
         << format_g17(rule.certified_error) << "\n";
    text << "  affine a " << format_g17(rule.a) << ", b " << format_g17(rule.b)
         << ", c " << format_g17(rule.c) << "\n";
    text << "  k, node, weight\n";
    for (int k = 0; k < rule.m(); ++k) {
      text << "  " << k << " " << format_g17(rule.nodes[k]) << " "
           << format_g17(rule.weights[k]) << "\n";
    }
    kv << "f=" << spec.name() << "\n";
    kv << "m=" << rule.m() << "\n";
    kv << "certified_error=" << format_g17(rule.certified_error) << "\n";
    kv << "a=" << format_g17(rule.a) << "\n";
    kv << "b=" << format_g17(rule.b) << "\n";
    kv << "c=" << format_g17(rule.c) << "\n";
    for (int k = 0; k < rule.m(); ++k) {
      kv << "node_" << k << "=" << format_g17(rule.nodes[k]) << "\n";
      kv << "weight_" << k << "=" << format_g17(rule.weights[k]) << "\n";
    }
  } else if (a.kind == "kubo") {
    FunctionSpec spec = monotone_spec(a.f, a.t, a.p);
    QuadratureRule rule = kubo_ando_measure(spec, a.m > 0 ? a.m : 16);
    rule.check_invariants();
    text << "representing measure of " << spec.name() << "\n";
    text << "  m " << rule.m() << ", weight sum "
         << format_g17(rule.weight_sum()) << ", certified error "
         << format_g17(rule.certified_error) << "\n";
    text << "  j, node, weight\n";
    for (int j = 0; j < rule.m(); ++j) {
      text << "  " << j << " " << format_g17(rule.nodes[j]) << " "
           << format_g17(rule.weights[j]) << "\n";
    }
    kv << "f=" << spec.name() << "\n";
    kv << "m=" << rule.m() << "\n";
    kv << "weight_sum=" << format_g17(rule.weight_sum()) << "\n";
    kv << "certified_error=" << format_g17(rule.certified_error) << "\n";
    for (int j = 0; j < rule.m(); ++j) {
      kv << "node_" << j << "=" << format_g17(rule.nodes[j]) << "\n";
      kv << "weight_" << j << "=" << format_g17(rule.weights[j]) << "\n";
    }
  } else {
    throw ParameterError("kind must be log_poly, log_stieltjes, kraus, "
                         "monotone, or kubo");
  }
  emit(text.str(), kv.str(), a.out);
  return kExitOk;
}

// ----------------------------------------------------------------- resources

struct ResourceArgs {
  std::string formula;
  std::vector<std::string> inputs;
  std::vector<std::string> scales;
  std::string out;
};

int run_resources(const ResourceArgs& a) {
  std::ostringstream text, kv;
  if (a.formula.empty()) {
    text << "registered cost formulas:\n";
    for (const std::string& id : cost_formula_ids()) {
      text << "  " << id << "\n";
      kv << "formula." << id << "=registered\n";
    }
    emit(text.str(), kv.str(), a.out);
    return kExitOk;
  }
  std::map<std::string, double> in;
  for (const std::string& spec : a.inputs) {
    auto pos = spec.find('=');
    if (pos == std::string::npos) {
      throw ParameterError("--in expects key=value, got '" + spec + "'");
    }
    try {
      in[spec.substr(0, pos)] = std::stod(spec.substr(pos + 1));
    } catch (const std::exception&) {
      throw ParameterError("bad numeric value in '" + spec + "'");
    }
  }
  CostFormula f = evaluate_cost(a.formula, in);
  text << f.to_text();
  kv << "id=" << f.id << "\n";
  kv << "value=" << format_g17(f.value) << "\n";
  for (const auto& [k, v] : f.inputs) {
    kv << "input." << k << "=" << format_g17(v) << "\n";
  }
  for (const auto& [k, e] : f.exponents) {
    kv << "exponent." << k << "=" << format_g17(e) << "\n";
  }
  for (const std::string& spec : a.scales) {
    auto pos = spec.find(':');
    if (pos == std::string::npos) {
      throw ParameterError("--scale expects var:multiplier, got '" + spec +
                           "'");
    }
    const std::string var = spec.substr(0, pos);
    double mult = 0.0;
    try {
      mult = std::stod(spec.substr(pos + 1));
    } catch (const std::exception&) {
      throw ParameterError("bad multiplier in '" + spec + "'");
    }
    const double factor = f.scale_factor(var, mult);
    text << "  scaling " << var << " by " << format_g17(mult)
         << " multiplies cost by " << format_g17(factor) << "\n";
    kv << "scale." << var << "=" << format_g17(factor) << "\n";
  }
  emit(text.str(), kv.str(), a.out);
  return kExitOk;
}

// ------------------------------------------------------------------ validate

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> messages;
};

class Suite {
 public:
  explicit Suite(std::string name) { result_.name = std::move(name); }
  void check(bool ok, const std::string& what) {
    ++result_.checks;
    if (!ok) {
      ++result_.failures;
      result_.messages.push_back(what);
    }
  }
  const SuiteResult& result() const { return result_; }

 private:
  SuiteResult result_;
};

SuiteResult validate_matcore() {
  Suite s("matcore");
  DensityMatrix rho = random_density(4, 8.0, 11);
  s.check(std::abs(rho.mat().trace().real() - 1.0) < tol::trace_one,
          "random density trace");
  SpectralDecomposition sd = hermitian_eig(rho.psd());
  CMat rebuilt = CMat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    rebuilt += sd.values[i] * sd.vectors.col(i) * sd.vectors.col(i).adjoint();
  }
  s.check(operator_norm(rebuilt - rho.mat()) < tol::eig_reconstruct,
          "eigendecomposition rebuild");
  PSDMatrix p = random_psd(4, 0.25, 12);
  s.check(std::abs(p.spectral_floor() - 0.25) < 1e-12 &&
              std::abs(p.spectral_ceiling() - 1.0) < 1e-12,
          "psd spectrum endpoints");
  HermitianMatrix lg = apply_spectral_function(
      p, [](double x) { return std::log(x); });
  HermitianMatrix back =
      apply_spectral_function(lg, [](double x) { return std::exp(x); });
  s.check(operator_norm(back.mat() - p.mat()) < 1e-10, "log/exp roundtrip");
  DensityMatrix big = random_density(8, 4.0, 13);
  CMat joint = CMat::Zero(32, 32);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      joint.block(8 * r, 8 * c, 8, 8) = rho.mat()(r, c) * big.mat();
    }
  }
  CMat traced = partial_trace_second(joint, 4, 8);
  s.check(operator_norm(traced - rho.mat()) < 1e-10, "partial trace of kron");
  return s.result();
}

SuiteResult validate_io() {
  Suite s("io");
  Rng rng(21);
  CMat m(3, 5);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) m(r, c) = rng.cnormal();
  }
  const std::string once = matrix_to_string(m);
  CMat parsed = matrix_from_string(once);
  const std::string twice = matrix_to_string(parsed);
  s.check(once == twice, "serialize/parse/serialize byte identity");
  bool exact = parsed.rows() == m.rows() && parsed.cols() == m.cols();
  if (exact) {
    for (int r = 0; r < 3 && exact; ++r) {
      for (int c = 0; c < 5 && exact; ++c) {
        exact = parsed(r, c).real() == m(r, c).real() &&
                parsed(r, c).imag() == m(r, c).imag();
      }
    }
  }
  s.check(exact, "17-digit round trip is bit exact");
  const std::string with_comments = "# header\n2 1\n# mid\n1 0\n0.5 -0.25\n";
  CMat commented = matrix_from_string(with_comments);
  s.check(commented(1, 0) == Complex(0.5, -0.25), "comment handling");
  return s.result();
}

SuiteResult validate_funcapprox() {
  Suite s("funcapprox");
  const double beta = 1.0 / 16.0;
  Polynomial lp = log_poly(beta, 1e-7);
  const double log_err = sup_error(
      [&lp](double x) { return lp.eval(x); },
      [beta](double x) { return std::log(x) / (2.0 * std::log(beta)); }, beta,
      1.0, 4001);
  s.check(log_err <= 1e-6, "polynomial log approximation at 1e-6");
  RationalApprox rs = log_stieltjes(beta, 1e-7);
  const double rs_err = sup_error(
      [&rs](double x) { return rs.eval(x); },
      [beta](double x) { return x * std::log(x) / std::log(beta); }, beta, 1.0,
      4001);
  s.check(rs_err <= 1e-6, "resolvent log approximation at 1e-6");
  RationalApprox chi = kraus_rational(FunctionSpec::chi_square(), 0.5, 1e-9,
                                      1.5);
  s.check(chi.m() == 0 && std::abs(chi.a - 1.0) < 1e-12 &&
              std::abs(chi.b + 2.0) < 1e-12 && std::abs(chi.c - 1.0) < 1e-12,
          "quadratic rational form is exact");
  QuadratureRule mu = kubo_ando_measure(FunctionSpec::geometric(0.5), 16);
  s.check(std::abs(mu.weight_sum() - 1.0) < tol::weight_sum,
          "measure weights sum to one");
  RationalApprox mono =
      monotone_stieltjes_rational(FunctionSpec::geometric(0.5), 0.1, 1e-8,
                                  10.0);
  s.check(std::abs(mono.eval(1.0) - 1.0) < 1e-9, "monotone rule fixes f(1)=1");
  return s.result();
}

SuiteResult validate_blockenc() {
  Suite s("blockenc");
  PSDMatrix p = random_psd(4, 0.3, 31);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  s.check(operator_norm(enc.extract_block() - p.mat()) < 1e-12,
          "dilation extracts the operator");
  CMat u = enc.unitary();
  s.check(operator_norm(u * u.adjoint() - CMat::Identity(8, 8)) <
              tol::unitarity,
          "dilation unitarity");
  BlockEncoding prod = product(enc, enc);
  s.check(operator_norm(prod.extract_block() - p.mat() * p.mat()) < 1e-10,
          "product extract");
  BlockEncoding lcu = linear_combination({enc, enc}, {0.25, -0.75});
  s.check(operator_norm(lcu.extract_block() + 0.5 * p.mat()) < 1e-10,
          "combination extract");
  s.check(lcu.queries().get("U_P") == prod.queries().get("U_P"),
          "query tallies add");
  enc.attach_target(p.mat());
  s.check(enc.measured_error() <= enc.eps_ledger(), "ledger covers error");
  return s.result();
}

SuiteResult validate_qsvt() {
  Suite s("qsvt");
  PSDMatrix p = random_psd(4, 0.5, 41);
  BlockEncoding enc = BlockEncoding::dilate(p.mat(), "U_P");
  BlockEncoding inv = invert(enc, 2.0 + 1e-9, 1e-9);
  CMat want = apply_spectral_function(
                  p, [](double x) { return 1.0 / (x * (2.0 + 1e-9)); })
                  .mat();
  s.check(operator_norm(inv.extract_block() - want) < 1e-8,
          "inversion matches dense oracle");
  BlockEncoding rt = power_pos(enc, 0.5, 1e-9);
  CMat wantr =
      apply_spectral_function(p, [](double x) { return std::sqrt(x) / 2.0; })
          .mat();
  s.check(operator_norm(rt.extract_block() - wantr) < 1e-8,
          "square root matches dense oracle");
  BlockEncoding small = BlockEncoding::dilate(0.1 * p.mat(), "U_P");
  BlockEncoding amp = amplify(small, 4.0, 0.2, 0.01);
  s.check(operator_norm(amp.extract_block() - 0.4 * p.mat()) < 1e-8,
          "amplification boosts the block");
  bool threw = false;
  try {
    invert(enc, 1.2, 1e-6);
  } catch (const WindowError&) {
    threw = true;
  }
  s.check(threw, "window violation rejected");
  return s.result();
}

SuiteResult validate_divergence() {
  Suite s("divergence");
  RVec pr(2), qr(2);
  pr << 0.75, 0.25;
  qr << 0.5, 0.5;
  DensityMatrix rho = DensityMatrix::diagonal(pr);
  DensityMatrix sigma = DensityMatrix::diagonal(qr);
  const double fixture = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  const double oracle = oracle_divergence(rho, sigma, FunctionSpec::xlogx());
  s.check(std::abs(oracle - fixture) < 1e-12, "commuting oracle fixture");
  DivergenceReport rep = xlogx_route1(rho, sigma, 1e-4);
  s.check(std::abs(rep.estimate - oracle) <= 1e-4, "pipeline hits tolerance");
  s.check(rep.estimate == rep.trail.replay(), "trail replays the estimate");
  DivergenceReport chi =
      general_convex(rho, sigma, FunctionSpec::chi_square(), 1e-4);
  s.check(std::abs(chi.estimate - 0.25) < 1e-6, "chi-square fixture");
  s.check(oracle_divergence(rho, rho, FunctionSpec::xlogx()) < 1e-12,
          "divergence vanishes at rho = sigma");
  return s.result();
}

SuiteResult validate_means() {
  Suite s("means");
  RVec da(2), db(2);
  da << 0.64, 0.25;
  db << 0.25, 0.64;
  PSDMatrix a = PSDMatrix::diagonal(da);
  PSDMatrix b = PSDMatrix::diagonal(db);
  CMat g = oracle_mean(a, b, FunctionSpec::geometric(0.5));
  s.check(std::abs(g(0, 0).real() - 0.4) < 1e-12 &&
              std::abs(g(1, 1).real() - 0.4) < 1e-12 &&
              std::abs(g(0, 1)) < 1e-12,
          "commuting geometric fixture");
  PSDMatrix a4 = random_psd(4, 0.2, 51);
  PSDMatrix b4 = random_psd(4, 0.2, 52);
  CMat geo = oracle_mean(a4, b4, FunctionSpec::geometric(0.5));
  CMat ainv =
      apply_spectral_function(a4, [](double x) { return 1.0 / x; }).mat();
  s.check(operator_norm(geo * ainv * geo - b4.mat()) < 1e-8,
          "geometric mean solves the Riccati identity");
  MeanReport mix = harmonic_mixture_mean(a4, b4, FunctionSpec::geometric(0.5),
                                         0.2, 1e-5, 24);
  s.check(mix.error_norm <= 1e-4, "mixture pipeline accuracy");
  MeanReport st =
      stieltjes_mean(a4, b4, FunctionSpec::geometric(0.5), 0.2, 1e-6);
  s.check(st.error_norm <= 1e-5, "resolvent pipeline accuracy");
  MeanReport idem =
      stieltjes_mean(a4, a4, FunctionSpec::logarithmic(), 0.2, 1e-9);
  s.check(operator_norm(idem.result - a4.mat()) <= 1e-8,
          "pipeline idempotence");
  return s.result();
}

SuiteResult validate_resources() {
  Suite s("resources");
  for (const std::string& id : cost_formula_ids()) {
    std::map<std::string, double> in = {
        {"T", 4},       {"N", 8},        {"kappa_sigma", 8},
        {"kappa_gamma", 32}, {"eps", 1e-3}, {"C_sigma", 11},
        {"C_rho", 11},  {"kappa_tau", 16}, {"T_sigma", 4},
        {"T_g", 100},   {"C_A", 10},     {"C_B", 10},
        {"delta", 0.1}, {"m", 32},       {"kappa", 10},
        {"c", 0.5},     {"alpha", 2},    {"gamma", 12},
        {"beta", 0.01}};
    CostFormula f = evaluate_cost(id, in);
    in["eps"] = 5e-4;
    CostFormula tighter = evaluate_cost(id, in);
    s.check(f.value > 0.0 && tighter.value >= f.value,
            "formula " + id + " positive and eps-monotone");
  }
  CostFormula d = divergence_cost("route1", "purification", 8, 32, 1e-3, 8, 4);
  s.check(d.scale_factor("kappa_gamma", 2.0) == 2.0,
          "route1 scaling linear in kappa_gamma");
  CostFormula m = mean_cost(10, 10, 0.2, 1e-4);
  s.check(m.scale_factor("delta", 0.5) == 8.0, "mean scaling cubic in delta");
  CostFormula srep = evaluate_cost(
      "sample_repetitions",
      {{"kappa_sigma", 8}, {"kappa_gamma", 32}, {"eps", 1e-2}});
  s.check(srep.scale_factor("eps", 0.5) == 4.0,
          "halving eps quadruples repetitions");
  return s.result();
}

int run_validate(const std::string& suite, const std::string& out) {
  std::vector<std::pair<std::string, SuiteResult (*)()>> suites = {
      {"matcore", validate_matcore},     {"io", validate_io},
      {"funcapprox", validate_funcapprox}, {"blockenc", validate_blockenc},
      {"qsvt", validate_qsvt},           {"divergence", validate_divergence},
      {"means", validate_means},         {"resources", validate_resources}};
  std::ostringstream text, kv;
  int total_failures = 0;
  bool matched = false;
  for (const auto& [name, fn] : suites) {
    if (!suite.empty() && suite != name) continue;
    matched = true;
    SuiteResult r = fn();
    total_failures += r.failures;
    text << "suite " << r.name << ": "
         << (r.failures == 0 ? "ok" : "FAILED") << " (" << r.checks
         << " checks)\n";
    for (const std::string& msg : r.messages) {
      text << "    failed: " << msg << "\n";
    }
    kv << "suite." << r.name << "=" << (r.failures == 0 ? "pass" : "fail")
       << "\n";
    kv << "checks." << r.name << "=" << r.checks << "\n";
  }
  if (!matched) {
    throw ParameterError("unknown suite '" + suite + "'");
  }
  emit(text.str(), kv.str(), out);
  return total_failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-encoding pipelines for matrix divergences and means"};
  app.require_subcommand(1);

  DivergenceArgs da;
  CLI::App* div = app.add_subcommand(
      "divergence", "estimate a maximal f-divergence through the pipelines");
  div->add_option("--f", da.f, "xlogx, chi_square, power_alpha, kl_form");
  div->add_option("--alpha", da.alpha, "exponent for power_alpha");
  div->add_option("--rho", da.rho_path, "density matrix file")->required();
  div->add_option("--sigma", da.sigma_path, "density matrix file")->required();
  div->add_option("--route", da.route, "1 (polynomial) or 2 (resolvent)");
  div->add_option("--eps", da.eps, "target additive accuracy");
  div->add_option("--access", da.access, "purification or sample_emulated");
  div->add_flag("--noise", da.noise, "emulate estimation jitter");
  auto* seed_opt = div->add_option("--seed", da.seed, "noise seed");
  div->add_option("--out", da.out, "write key=value report to file");
  div->add_flag("--explain", da.explain, "print the construction tree");

  MeanArgs ma;
  CLI::App* mean = app.add_subcommand(
      "mean", "compute an operator mean through the pipelines");
  mean->add_option("--f", ma.f, "arithmetic, harmonic, geometric, "
                                "logarithmic, heinz, power_p");
  mean->add_option("--t", ma.t, "mixing weight");
  mean->add_option("--p", ma.p, "exponent for power_p");
  mean->add_option("--A", ma.a_path, "positive matrix file")->required();
  mean->add_option("--B", ma.b_path, "positive matrix file")->required();
  mean->add_option("--method", ma.method,
                   "oracle, harmonic-mixture, or stieltjes");
  mean->add_option("--delta", ma.delta, "spectral floor of the inputs");
  mean->add_option("--eps", ma.eps, "target operator-norm accuracy");
  mean->add_option("--m", ma.m, "quadrature size override");
  mean->add_option("--out", ma.out, "write key=value report to file");
  mean->add_option("--out-matrix", ma.out_matrix, "write result matrix file");
  mean->add_flag("--explain", ma.explain, "print the construction tree");

  QuadArgs qa;
  CLI::App* quad = app.add_subcommand(
      "quadrature", "print certified approximation rules");
  quad->add_option("--kind", qa.kind,
                   "log_poly, log_stieltjes, kraus, monotone, kubo");
  quad->add_option("--beta", qa.beta, "left window edge for the log rules");
  quad->add_option("--eps", qa.eps, "target sup error");
  quad->add_option("--m", qa.m, "size override");
  quad->add_option("--f", qa.f, "function name for kraus/monotone/kubo");
  quad->add_option("--t", qa.t, "mixing weight");
  quad->add_option("--p", qa.p, "exponent parameter");
  quad->add_option("--delta", qa.delta, "left edge for rational rules");
  quad->add_option("--hi", qa.hi, "right edge for rational rules");
  quad->add_option("--out", qa.out, "write key=value report to file");

  ResourceArgs ra;
  CLI::App* res = app.add_subcommand(
      "resources", "evaluate closed-form cost predictions");
  res->add_option("--formula", ra.formula, "formula id (omit to list all)");
  res->add_option("--in", ra.inputs, "input as key=value (repeatable)");
  res->add_option("--scale", ra.scales,
                  "report scale factor as var:multiplier (repeatable)");
  res->add_option("--out", ra.out, "write key=value report to file");

  std::string suite, vout;
  CLI::App* val = app.add_subcommand("validate", "run the self-check suites");
  val->add_option("--suite", suite, "restrict to one suite");
  val->add_option("--out", vout, "write key=value report to file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParameter;
  }

  try {
    da.seed_set = seed_opt->count() > 0;
    if (div->parsed()) return run_divergence(da);
    if (mean->parsed()) return run_mean(ma);
    if (quad->parsed()) return run_quadrature(qa);
    if (res->parsed()) return run_resources(ra);
    if (val->parsed()) return run_validate(suite, vout);
    return kExitParameter;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const WindowError& e) {
    std::cerr << "window error: " << e.what() << "\n";
    return kExitWindow;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
