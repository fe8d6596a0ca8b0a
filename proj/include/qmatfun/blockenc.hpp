#pragma once

// Block-encoding ledger objects.  Each encoding stores the represented block
// B (operator norm at most 1) together with the (alpha, a, eps) contract:
// the encoded matrix is alpha * B up to eps in operator norm.  The dense
// 2N x 2N dilation unitary is rebuilt on demand from B; ancilla_count tracks
// what the standard compositions would cost, not the literal tensor size.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qmatfun/common.hpp"
#include "qmatfun/matcore.hpp"

namespace qmatfun {

// Per-primitive query tallies (uses of U_rho, U_sigma, U_A, ... and their
// adjoints).  Nonnegative, additive under composition.
struct QueryCount {
  std::map<std::string, long long> tallies;

  void add(const std::string& key, long long n = 1);
  QueryCount& operator+=(const QueryCount& other);
  QueryCount& scale(long long factor);
  long long get(const std::string& key) const;
  long long total() const;
  // Gate-model surrogate: sum of tally * unit_cost, default unit cost 1.
  double weighted(const std::map<std::string, double>& unit_costs) const;
  std::string to_string() const;
};

QueryCount operator+(QueryCount a, const QueryCount& b);

// Construction trace node; children are the encodings an operation consumed.
struct ProvNode {
  std::string op;      // constructor name
  std::string detail;  // parameters, e.g. weights or charged degree
  double alpha = 1.0;
  int ancillas = 0;
  double eps = 0.0;
  QueryCount queries;
  std::vector<std::shared_ptr<const ProvNode>> children;
};

std::string render_provenance(const ProvNode& root);

class BlockEncoding {
 public:
  // Empty placeholder (dim 0); the factories below make usable encodings.
  BlockEncoding() = default;
  // Exact dilation of a contraction; alpha = 1, one ancilla.
  static BlockEncoding dilate(const CMat& a, const std::string& name = "U_A");
  // Exact encoding of a density matrix through an explicit purification;
  // charges one use of the preparation unitary and its adjoint.
  static BlockEncoding encode_density(const DensityMatrix& rho,
                                      const std::string& name = "U_rho");
  static BlockEncoding identity_encoding(int dim);
  // Assembles an encoding from an explicit ledger; used by the transform
  // layer, which computes blocks spectrally but must keep the ledger honest.
  static BlockEncoding from_parts(CMat block, double alpha, double eps,
                                  int ancillas, QueryCount queries,
                                  std::shared_ptr<const ProvNode> prov);

  int dim() const { return static_cast<int>(block_.rows()); }
  int system_qubits() const;
  int ancilla_count() const { return ancillas_; }
  double alpha() const { return alpha_; }
  double eps_ledger() const { return eps_; }
  const CMat& block() const { return block_; }
  const QueryCount& queries() const { return queries_; }
  std::shared_ptr<const ProvNode> provenance() const { return prov_; }

  // alpha * block: the matrix this object claims to represent, up to eps.
  CMat extract_block() const { return alpha_ * block_; }

  // Dense unitary dilation [[B, sqrt(I-BB+)], [sqrt(I-B+B), -B+]];
  // checked unitary to tol::unitarity before returning.
  CMat unitary() const;

  // Same block viewed as an encoding of extract/alpha: alpha 1, eps/alpha.
  BlockEncoding with_alpha_one() const;

  // Test mode: attach the matrix this encoding is supposed to represent and
  // measure against it.
  void attach_target(const CMat& target);
  bool has_target() const { return has_target_; }
  double measured_error() const;  // ||extract - target||_2, needs target

  friend BlockEncoding product(const BlockEncoding& u, const BlockEncoding& v);
  friend BlockEncoding linear_combination(
      const std::vector<BlockEncoding>& encs, const std::vector<double>& gamma);
  friend BlockEncoding scale_down(const BlockEncoding& be, double p);

 private:
  CMat block_;
  double alpha_ = 1.0;
  double eps_ = 0.0;
  int ancillas_ = 0;
  QueryCount queries_;
  std::shared_ptr<const ProvNode> prov_;
  CMat target_;
  bool has_target_ = false;
};

BlockEncoding product(const BlockEncoding& u, const BlockEncoding& v);
BlockEncoding linear_combination(const std::vector<BlockEncoding>& encs,
                                 const std::vector<double>& gamma);
BlockEncoding scale_down(const BlockEncoding& be, double p);

}  // namespace qmatfun
