#include "qmatfun/qsvt.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace qmatfun {

namespace {

constexpr double kPropFloor = 1e-13;

double clamped_log(double x) { return std::max(1.0, std::log(x)); }

SpectralDecomposition block_spectrum(const BlockEncoding& be,
                                     const char* who) {
  CMat b = be.block();
  const double asym = hermitian_asymmetry(b);
  if (asym > 1e-9) {
    throw ValidationError(std::string(who) +
                          ": encoded block is not Hermitian (asymmetry " +
                          format_g17(asym) + ")");
  }
  return hermitian_eig(HermitianMatrix::from_symmetric_parts(
      0.5 * (b + b.adjoint())));
}

void require_window(const SpectralDecomposition& sd, double lo, double hi,
                    const char* who) {
  const double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int i = 0; i < sd.values.size(); ++i) {
    if (sd.values[i] < lo - slack || sd.values[i] > hi + slack) {
      std::ostringstream os;
      os << who << ": eigenvalue " << format_g17(sd.values[i])
         << " outside window [" << format_g17(lo) << ", " << format_g17(hi)
         << "]";
      throw WindowError(os.str());
    }
  }
}

CMat rebuild(const SpectralDecomposition& sd, const RVec& mapped) {
  return sd.vectors * mapped.asDiagonal() * sd.vectors.adjoint();
}

std::shared_ptr<const ProvNode> transform_node(const std::string& op,
                                               const std::string& detail,
                                               const BlockEncoding& out,
                                               const BlockEncoding& in) {
  auto node = std::make_shared<ProvNode>();
  node->op = op;
  node->detail = detail;
  node->alpha = out.alpha();
  node->ancillas = out.ancilla_count();
  node->eps = out.eps_ledger();
  node->queries = out.queries();
  node->children = {in.provenance()};
  return node;
}

// Shared tail: apply a fitted map to the block spectrum, clamp to [-1, 1]
// (the true map is bounded by 1 on the validated window, so clamping can
// only move an overshooting fit toward the truth), and assemble the ledger.
BlockEncoding finish_transform(const BlockEncoding& be,
                               const SpectralDecomposition& sd,
                               const Polynomial& fit, const std::string& op,
                               const std::string& detail, int charged_degree,
                               double eps_budget, double window_lo,
                               double window_hi, TransformRecord* rec) {
  RVec mapped(sd.values.size());
  for (int i = 0; i < sd.values.size(); ++i) {
    mapped[i] = std::clamp(fit.eval(sd.values[i]), -1.0, 1.0);
  }
  const double lip = fit.lipschitz_on_grid();
  const double eps_out =
      eps_budget + lip * (be.eps_ledger() / be.alpha()) + kPropFloor;
  QueryCount q = be.queries();
  q.scale(2LL * charged_degree);
  BlockEncoding out = BlockEncoding::from_parts(
      rebuild(sd, mapped), 1.0, eps_out, be.ancilla_count() + 1, std::move(q),
      nullptr);
  if (rec) {
    rec->op = op;
    rec->degree = charged_degree;
    rec->eps_fit = fit.certified_error();
    rec->lipschitz = lip;
    rec->eps_out = eps_out;
    rec->window_lo = window_lo;
    rec->window_hi = window_hi;
  }
  return BlockEncoding::from_parts(out.block(), out.alpha(), out.eps_ledger(),
                                   out.ancilla_count(), out.queries(),
                                   transform_node(op, detail, out, be));
}

}  // namespace

BlockEncoding apply_polynomial(const BlockEncoding& be, const Polynomial& p,
                               TransformRecord* rec) {
  // Admissibility scan; the violation report names the offending grid point.
  const int grid = 2001;
  for (int i = 0; i < grid; ++i) {
    const double x = p.lo() + (p.hi() - p.lo()) * i / (grid - 1);
    const double v = p.eval(x);
    if (std::abs(v) > 1.0 + tol::qsvt_admissible) {
      std::ostringstream os;
      os << "apply_polynomial: |p(" << format_g17(x) << ")| = "
         << format_g17(std::abs(v)) << " exceeds 1";
      throw ValidationError(os.str());
    }
  }
  SpectralDecomposition sd = block_spectrum(be, "apply_polynomial");
  require_window(sd, p.lo(), p.hi(), "apply_polynomial");
  std::ostringstream detail;
  detail << "deg=" << p.degree();
  return finish_transform(be, sd, p, "qsvt_poly", detail.str(), p.degree(),
                          p.certified_error(), p.lo(), p.hi(), rec);
}

BlockEncoding invert(const BlockEncoding& be, double kappa, double eps,
                     TransformRecord* rec) {
  if (!(kappa >= 1.0)) throw ParameterError("invert: kappa must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("invert: eps must lie in (0, 1)");
  }
  SpectralDecomposition sd = block_spectrum(be, "invert");
  require_window(sd, 1.0 / kappa, 1.0, "invert");
  const int d = static_cast<int>(std::ceil(kappa * clamped_log(1.0 / eps)));
  std::ostringstream detail;
  detail << "kappa=" << format_g17(kappa) << " deg=" << d;
  if (kappa <= 1.0 + 1e-12) {
    // Degenerate window: every eigenvalue sits at 1 within slack, so the
    // exact eigen-map replaces a fit while the ledger still charges d.
    RVec mapped(sd.values.size());
    for (int i = 0; i < sd.values.size(); ++i) {
      mapped[i] =
          std::clamp(1.0 / (kappa * std::max(sd.values[i], 0.5)), -1.0, 1.0);
    }
    const double lip = kappa;
    const double eps_out = eps + lip * (be.eps_ledger() / be.alpha()) +
                           kPropFloor;
    QueryCount q = be.queries();
    q.scale(2LL * d);
    BlockEncoding out = BlockEncoding::from_parts(
        rebuild(sd, mapped), 1.0, eps_out, be.ancilla_count() + 1,
        std::move(q), nullptr);
    if (rec) {
      rec->op = "invert";
      rec->degree = d;
      rec->eps_fit = 0.0;
      rec->lipschitz = lip;
      rec->eps_out = eps_out;
      rec->window_lo = 1.0 / kappa;
      rec->window_hi = 1.0;
    }
    return BlockEncoding::from_parts(
        out.block(), out.alpha(), out.eps_ledger(), out.ancilla_count(),
        out.queries(), transform_node("invert", detail.str(), out, be));
  }
  const double lo = (1.0 / kappa) * (1.0 - 1e-9);
  Polynomial p = Polynomial::fit(
      [kappa](double x) { return 1.0 / (kappa * x); }, lo, 1.0 + 1e-9,
      eps / 2.0);
  return finish_transform(be, sd, p, "invert", detail.str(), d, eps,
                          1.0 / kappa, 1.0, rec);
}

BlockEncoding power_neg(const BlockEncoding& be, double c, double kappa,
                        double eps, TransformRecord* rec) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw ParameterError("power_neg: c must lie in (0, 1]");
  }
  if (!(kappa >= 1.0)) throw ParameterError("power_neg: kappa must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("power_neg: eps must lie in (0, 1)");
  }
  SpectralDecomposition sd = block_spectrum(be, "power_neg");
  const double alpha = be.alpha();
  // The result M^{-c}/(2 kappa^c) is a contraction iff
  // lambda_min(M) >= 2^{-1/c}/kappa; validate on the block spectrum.
  const double floor_block = std::pow(2.0, -1.0 / c) / (kappa * alpha);
  require_window(sd, floor_block, 1.0, "power_neg");
  const double scale = 1.0 / (2.0 * std::pow(kappa, c));
  auto g = [alpha, c, scale](double x) {
    return std::pow(alpha * x, -c) * scale;
  };
  const int d = static_cast<int>(
      std::ceil(kappa * (1.0 + c) * clamped_log(alpha / eps)));
  Polynomial p = Polynomial::fit(g, floor_block * (1.0 - 1e-9), 1.0 + 1e-9,
                                 eps / 2.0);
  std::ostringstream detail;
  detail << "c=" << format_g17(c) << " kappa=" << format_g17(kappa)
         << " deg=" << d;
  return finish_transform(be, sd, p, "power_neg", detail.str(), d, eps,
                          floor_block, 1.0, rec);
}

BlockEncoding power_pos(const BlockEncoding& be, double c, double eps,
                        TransformRecord* rec) {
  if (!(c > 0.0 && c < 1.0)) {
    throw ParameterError("power_pos: c must lie in (0, 1)");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("power_pos: eps must lie in (0, 1)");
  }
  SpectralDecomposition sd = block_spectrum(be, "power_pos");
  const double floor = sd.values[0];
  if (!(floor > tol::invert_floor)) {
    throw WindowError("power_pos: spectral floor " + format_g17(floor) +
                      " too small");
  }
  require_window(sd, floor, 1.0, "power_pos");
  const double kappa = 1.0 / floor;
  auto g = [c](double x) { return 0.5 * std::pow(std::max(x, 0.0), c); };
  const int d = static_cast<int>(std::ceil(kappa * clamped_log(1.0 / eps)));
  Polynomial p =
      Polynomial::fit(g, floor * (1.0 - 1e-9), 1.0 + 1e-9, eps / 2.0);
  std::ostringstream detail;
  detail << "c=" << format_g17(c) << " deg=" << d;
  return finish_transform(be, sd, p, "power_pos", detail.str(), d, eps, floor,
                          1.0, rec);
}

BlockEncoding amplify(const BlockEncoding& be, double gamma_factor,
                      double delta, double eps, TransformRecord* rec) {
  if (!(gamma_factor > 1.0)) {
    throw ParameterError("amplify: gamma_factor must be > 1");
  }
  if (!(delta > 0.0 && delta < 0.5) || !(eps > 0.0 && eps < 0.5)) {
    throw ParameterError("amplify: delta and eps must lie in (0, 1/2)");
  }
  const double smax = operator_norm(be.block());
  const double window = (1.0 - delta) / gamma_factor;
  if (smax > window * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "amplify: largest singular value " << format_g17(smax)
       << " exceeds (1-delta)/gamma = " << format_g17(window);
    throw WindowError(os.str());
  }
  const int m = static_cast<int>(std::ceil(
      (gamma_factor / delta) * clamped_log(gamma_factor / eps)));
  const double eps_out = gamma_factor * be.eps_ledger() +
                         be.alpha() * eps * gamma_factor * smax + kPropFloor;
  QueryCount q = be.queries();
  q.scale(2LL * m);
  BlockEncoding out = BlockEncoding::from_parts(
      gamma_factor * be.block(), be.alpha(), eps_out, be.ancilla_count() + 1,
      std::move(q), nullptr);
  std::ostringstream detail;
  detail << "gamma=" << format_g17(gamma_factor)
         << " delta=" << format_g17(delta) << " m=" << m;
  if (rec) {
    rec->op = "amplify";
    rec->degree = m;
    rec->eps_fit = 0.0;
    rec->lipschitz = gamma_factor;
    rec->eps_out = eps_out;
    rec->window_lo = 0.0;
    rec->window_hi = window;
  }
  return BlockEncoding::from_parts(out.block(), out.alpha(), out.eps_ledger(),
                                   out.ancilla_count(), out.queries(),
                                   transform_node("amplify", detail.str(), out,
                                                  be));
}

}  // namespace qmatfun
