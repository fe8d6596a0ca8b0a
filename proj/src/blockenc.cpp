#include "qmatfun/blockenc.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmatfun {

namespace {

// Leaf constructors carry a small ledger floor so that composed ledgers
// stay sound against floating-point roundoff without being vacuous.
constexpr double kLeafEps = 1e-12;

int qubits_for(int dim) {
  int q = 0;
  while ((1 << q) < dim) ++q;
  return q;
}

std::shared_ptr<const ProvNode> make_node(
    std::string op, std::string detail, double alpha, int ancillas, double eps,
    const QueryCount& queries,
    std::vector<std::shared_ptr<const ProvNode>> children = {}) {
  auto node = std::make_shared<ProvNode>();
  node->op = std::move(op);
  node->detail = std::move(detail);
  node->alpha = alpha;
  node->ancillas = ancillas;
  node->eps = eps;
  node->queries = queries;
  node->children = std::move(children);
  return node;
}

}  // namespace

// --- QueryCount --------------------------------------------------------------

// Tallies saturate here instead of overflowing; deep pipelines scaled by
// repetition counts can exceed 2^63 otherwise.
constexpr long long kTallyCap = 4000000000000000000LL;

void QueryCount::add(const std::string& key, long long n) {
  if (n < 0) throw ParameterError("QueryCount: negative tally");
  long long& v = tallies[key];
  v = (v > kTallyCap - n) ? kTallyCap : v + n;
}

QueryCount& QueryCount::operator+=(const QueryCount& other) {
  for (const auto& [k, v] : other.tallies) add(k, v);
  return *this;
}

QueryCount& QueryCount::scale(long long factor) {
  if (factor < 0) throw ParameterError("QueryCount: negative scale factor");
  for (auto& [k, v] : tallies) {
    v = (factor != 0 && v > kTallyCap / factor) ? kTallyCap : v * factor;
  }
  return *this;
}

long long QueryCount::get(const std::string& key) const {
  auto it = tallies.find(key);
  return it == tallies.end() ? 0 : it->second;
}

long long QueryCount::total() const {
  long long s = 0;
  for (const auto& [k, v] : tallies) s += v;
  return s;
}

double QueryCount::weighted(
    const std::map<std::string, double>& unit_costs) const {
  double s = 0.0;
  for (const auto& [k, v] : tallies) {
    auto it = unit_costs.find(k);
    s += static_cast<double>(v) * (it == unit_costs.end() ? 1.0 : it->second);
  }
  return s;
}

std::string QueryCount::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : tallies) {
    if (!first) os << " ";
    os << k << ":" << v;
    first = false;
  }
  return os.str();
}

QueryCount operator+(QueryCount a, const QueryCount& b) {
  a += b;
  return a;
}

// --- provenance rendering ----------------------------------------------------

namespace {

void render_node(const ProvNode& node, int depth, std::ostringstream& os) {
  for (int i = 0; i < depth; ++i) os << "  ";
  os << node.op;
  if (!node.detail.empty()) os << " [" << node.detail << "]";
  os << "  (alpha=" << format_g17(node.alpha) << " a=" << node.ancillas
     << " eps=" << format_g17(node.eps);
  const std::string q = node.queries.to_string();
  if (!q.empty()) os << " queries{" << q << "}";
  os << ")\n";
  for (const auto& c : node.children) {
    if (c) render_node(*c, depth + 1, os);
  }
}

}  // namespace

std::string render_provenance(const ProvNode& root) {
  std::ostringstream os;
  render_node(root, 0, os);
  return os.str();
}

// --- BlockEncoding -----------------------------------------------------------

int BlockEncoding::system_qubits() const { return qubits_for(dim()); }

BlockEncoding BlockEncoding::dilate(const CMat& a, const std::string& name) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw ParameterError("dilate: matrix must be square and nonempty");
  }
  const double nrm = operator_norm(a);
  if (nrm > 1.0 + 1e-12) {
    throw ValidationError("dilate: operator norm " + format_g17(nrm) +
                          " exceeds 1");
  }
  BlockEncoding be;
  be.block_ = a;
  be.alpha_ = 1.0;
  be.eps_ = kLeafEps;
  be.ancillas_ = 1;
  be.queries_.add(name);
  be.queries_.add(name + "_dag");
  be.prov_ = make_node("dilate", name, be.alpha_, be.ancillas_, be.eps_,
                       be.queries_);
  return be;
}

BlockEncoding BlockEncoding::encode_density(const DensityMatrix& rho,
                                            const std::string& name) {
  const CMat& r = rho.mat();
  const int n = static_cast<int>(r.rows());
  // Build the explicit purification sum_i sqrt(p_i) |v_i>|i> and verify that
  // tracing out the second register really returns rho.
  SpectralDecomposition sd = hermitian_eig(HermitianMatrix::from_matrix(r));
  CVec psi = CVec::Zero(static_cast<long>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double p = std::max(sd.values[i], 0.0);
    const double s = std::sqrt(p);
    for (int row = 0; row < n; ++row) {
      psi[static_cast<long>(row) * n + i] += s * sd.vectors(row, i);
    }
  }
  const CMat reduced = partial_trace_second(psi * psi.adjoint(), n, n);
  if ((reduced - r).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("encode_density: purification check failed");
  }
  BlockEncoding be;
  be.block_ = r;
  be.alpha_ = 1.0;
  be.eps_ = kLeafEps;
  be.ancillas_ = qubits_for(n);
  be.queries_.add(name);
  be.queries_.add(name + "_dag");
  be.prov_ = make_node("encode_density", name, be.alpha_, be.ancillas_,
                       be.eps_, be.queries_);
  return be;
}

BlockEncoding BlockEncoding::identity_encoding(int dim) {
  if (dim < 1) throw ParameterError("identity_encoding: dim must be >= 1");
  BlockEncoding be;
  be.block_ = CMat::Identity(dim, dim);
  be.alpha_ = 1.0;
  be.eps_ = kLeafEps;
  be.ancillas_ = 1;
  be.prov_ = make_node("identity", "dim=" + std::to_string(dim), be.alpha_,
                       be.ancillas_, be.eps_, be.queries_);
  return be;
}

BlockEncoding BlockEncoding::from_parts(CMat block, double alpha, double eps,
                                        int ancillas, QueryCount queries,
                                        std::shared_ptr<const ProvNode> prov) {
  const double nrm = operator_norm(block);
  if (nrm > 1.0 + 1e-9) {
    throw ValidationError("from_parts: block norm " + format_g17(nrm) +
                          " exceeds 1");
  }
  if (!(alpha > 0.0) || eps < 0.0 || ancillas < 0) {
    throw ParameterError("from_parts: invalid ledger");
  }
  BlockEncoding be;
  be.block_ = std::move(block);
  be.alpha_ = alpha;
  be.eps_ = eps;
  be.ancillas_ = ancillas;
  be.queries_ = std::move(queries);
  be.prov_ = std::move(prov);
  return be;
}

CMat BlockEncoding::unitary() const {
  const int n = dim();
  Eigen::JacobiSVD<CMat> svd(block_,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMat& w = svd.matrixU();
  const CMat& v = svd.matrixV();
  RVec s = svd.singularValues();
  RVec comp(n);
  for (int i = 0; i < n; ++i) {
    const double rem = 1.0 - s[i] * s[i];
    comp[i] = std::sqrt(std::max(rem, 0.0));  // clamp tiny negatives
  }
  CMat u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = block_;
  u.topRightCorner(n, n) = w * comp.asDiagonal() * w.adjoint();
  u.bottomLeftCorner(n, n) = v * comp.asDiagonal() * v.adjoint();
  u.bottomRightCorner(n, n) = -block_.adjoint();
  const double defect =
      (u.adjoint() * u - CMat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (defect > tol::unitarity) {
    throw ValidationError("unitary: dilation defect " + format_g17(defect));
  }
  return u;
}

BlockEncoding BlockEncoding::with_alpha_one() const {
  BlockEncoding be(*this);
  be.alpha_ = 1.0;
  be.eps_ = eps_ / alpha_;
  be.prov_ = make_node("renormalize", "alpha_was=" + format_g17(alpha_),
                       be.alpha_, be.ancillas_, be.eps_, be.queries_, {prov_});
  return be;
}

void BlockEncoding::attach_target(const CMat& target) {
  if (target.rows() != block_.rows() || target.cols() != block_.cols()) {
    throw ParameterError("attach_target: dimension mismatch");
  }
  target_ = target;
  has_target_ = true;
}

double BlockEncoding::measured_error() const {
  if (!has_target_) throw ParameterError("measured_error: no target attached");
  return operator_norm(extract_block() - target_);
}

BlockEncoding product(const BlockEncoding& u, const BlockEncoding& v) {
  if (u.dim() != v.dim()) {
    throw ValidationError("product: system dimension mismatch");
  }
  BlockEncoding be;
  be.block_ = u.block_ * v.block_;
  be.alpha_ = u.alpha_ * v.alpha_;
  be.eps_ = u.alpha_ * v.eps_ + v.alpha_ * u.eps_;
  be.ancillas_ = u.ancillas_ + v.ancillas_;
  be.queries_ = u.queries_ + v.queries_;
  be.prov_ = make_node("product", "", be.alpha_, be.ancillas_, be.eps_,
                       be.queries_, {u.prov_, v.prov_});
  return be;
}

BlockEncoding linear_combination(const std::vector<BlockEncoding>& encs,
                                 const std::vector<double>& gamma) {
  if (encs.empty() || encs.size() != gamma.size()) {
    throw ValidationError("linear_combination: need matching nonempty lists");
  }
  const int n = encs[0].dim();
  double norm1 = 0.0, max_alpha = 0.0, max_eps = 0.0;
  for (std::size_t j = 0; j < encs.size(); ++j) {
    if (encs[j].dim() != n) {
      throw ValidationError("linear_combination: dimension mismatch");
    }
    norm1 += std::abs(gamma[j]);
    max_alpha = std::max(max_alpha, encs[j].alpha_);
    max_eps = std::max(max_eps, encs[j].eps_);
  }
  if (!(norm1 > 0.0)) {
    throw ValidationError("linear_combination: weights have zero 1-norm");
  }
  BlockEncoding be;
  be.alpha_ = norm1 * max_alpha;
  be.block_ = CMat::Zero(n, n);
  int max_anc = 0;
  std::vector<std::shared_ptr<const ProvNode>> children;
  std::ostringstream detail;
  detail << "weights=";
  for (std::size_t j = 0; j < encs.size(); ++j) {
    be.block_ += (gamma[j] * encs[j].alpha_ / be.alpha_) * encs[j].block_;
    be.queries_ += encs[j].queries_;
    max_anc = std::max(max_anc, encs[j].ancillas_);
    children.push_back(encs[j].prov_);
    if (j) detail << ",";
    detail << format_g17(gamma[j]);
  }
  const int m = static_cast<int>(encs.size());
  be.ancillas_ =
      max_anc + static_cast<int>(std::ceil(std::log2(std::max(m, 2))));
  if (m == 1) be.ancillas_ = max_anc;  // no selector register needed
  be.eps_ = norm1 * max_eps;
  be.prov_ = make_node("lcu", detail.str(), be.alpha_, be.ancillas_, be.eps_,
                       be.queries_, std::move(children));
  return be;
}

BlockEncoding scale_down(const BlockEncoding& be, double p) {
  if (!(p > 1.0)) throw ParameterError("scale_down: p must be > 1");
  BlockEncoding out(be);
  out.alpha_ = be.alpha_ / p;
  out.eps_ = be.eps_ / p;
  out.ancillas_ = be.ancillas_ + 1;
  out.has_target_ = false;
  out.prov_ = make_node("scale_down", "p=" + format_g17(p), out.alpha_,
                        out.ancillas_, out.eps_, out.queries_, {be.prov_});
  return out;
}

}  // namespace qmatfun
