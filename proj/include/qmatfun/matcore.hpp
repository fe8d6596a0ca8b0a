#pragma once

// Dense Hermitian value types and spectral matrix functions.  Everything
// here is exact up to LAPACK-grade roundoff; these routines double as the
// reference oracles the encoding pipelines are tested against.

#include <cstdint>
#include <functional>

#include "qmatfun/common.hpp"

namespace qmatfun {

// Hermitian matrix with value semantics.  Construction symmetrizes the
// input to (M + M^dag)/2 and records the asymmetry it removed; inputs with
// relative asymmetry beyond tol::hermitian_asym are rejected.
class HermitianMatrix {
 public:
  static HermitianMatrix from_matrix(const CMat& raw);
  // Trusted path: caller guarantees exact Hermiticity (diagonals, sums of
  // Hermitian terms).  Still symmetrized, never rejected.
  static HermitianMatrix from_symmetric_parts(const CMat& raw);
  static HermitianMatrix diagonal(const RVec& entries);
  static HermitianMatrix identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMat& mat() const { return mat_; }
  double asymmetry() const { return asymmetry_; }

 private:
  HermitianMatrix(CMat m, double asym) : mat_(std::move(m)), asymmetry_(asym) {}
  CMat mat_;
  double asymmetry_ = 0.0;
};

// Eigenvalues ascending; columns of `vectors` are the matching
// orthonormal eigenvectors.
struct SpectralDecomposition {
  RVec values;
  CMat vectors;

  CMat reconstruct() const;
};

class PSDMatrix {
 public:
  // Validates min eigenvalue >= tol::psd_floor, else ValidationError.
  static PSDMatrix from_hermitian(const HermitianMatrix& h);
  static PSDMatrix from_matrix(const CMat& raw);
  static PSDMatrix diagonal(const RVec& entries);
  static PSDMatrix identity(int dim);

  int dim() const { return base_.dim(); }
  const CMat& mat() const { return base_.mat(); }
  const HermitianMatrix& hermitian() const { return base_; }
  // Smallest eigenvalue (may be slightly negative within tolerance).
  double spectral_floor() const { return floor_; }
  double spectral_ceiling() const { return ceiling_; }

 private:
  PSDMatrix(HermitianMatrix b, double lo, double hi)
      : base_(std::move(b)), floor_(lo), ceiling_(hi) {}
  HermitianMatrix base_;
  double floor_ = 0.0;
  double ceiling_ = 0.0;
};

class DensityMatrix {
 public:
  // PSD with trace within tol::trace_one of 1.
  static DensityMatrix from_psd(const PSDMatrix& p);
  static DensityMatrix from_matrix(const CMat& raw);
  static DensityMatrix diagonal(const RVec& entries);

  int dim() const { return base_.dim(); }
  const CMat& mat() const { return base_.mat(); }
  const PSDMatrix& psd() const { return base_; }

 private:
  explicit DensityMatrix(PSDMatrix b) : base_(std::move(b)) {}
  PSDMatrix base_;
};

// Full Hermitian eigendecomposition; reconstruction residual is checked
// against tol::eig_reconstruct * dim.
SpectralDecomposition hermitian_eig(const HermitianMatrix& h);
SpectralDecomposition hermitian_eig(const PSDMatrix& p);

// V f(Lambda) V^dag.  DomainError (naming the eigenvalue) if f returns a
// non-finite value at any eigenvalue.
HermitianMatrix apply_spectral_function(const HermitianMatrix& h,
                                        const std::function<double(double)>& f);
HermitianMatrix apply_spectral_function(const PSDMatrix& p,
                                        const std::function<double(double)>& f);

// lambda_max / lambda_min for positive definite input; ValidationError when
// the floor is at or below tol::invert_floor.
double condition_number(const PSDMatrix& p);

// Operator 2-norm (largest singular value).
double operator_norm(const CMat& m);

// Haar-distributed unitary from QR of a Ginibre draw with phase fixing.
CMat random_unitary(int dim, Rng& rng);

// Random density matrix with condition number exactly kappa: eigenvalues
// {1, kappa, uniform(1,kappa)...} normalized to unit trace, conjugated by a
// Haar unitary.  kappa == 1 returns I/dim for every seed.
DensityMatrix random_density(int dim, double kappa, std::uint64_t seed);

// Random PSD matrix with spectrum inside [delta, 1] and both endpoints
// attained (dim >= 2).
PSDMatrix random_psd(int dim, double delta, std::uint64_t seed);

// Max-abs entry of M - M^dag relative to max-abs entry of M.
double hermitian_asymmetry(const CMat& m);

// Partial trace over the second factor of C^{dim_keep} (x) C^{dim_drop};
// m must be (dim_keep*dim_drop) square with that row-major tensor layout.
CMat partial_trace_second(const CMat& m, int dim_keep, int dim_drop);

}  // namespace qmatfun
