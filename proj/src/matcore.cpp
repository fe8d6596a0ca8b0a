#include "qmatfun/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qmatfun {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double hermitian_asymmetry(const CMat& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return asym / scale;
}

HermitianMatrix HermitianMatrix::from_matrix(const CMat& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 1) {
    throw ValidationError("hermitian: matrix must be square and nonempty");
  }
  const double asym = hermitian_asymmetry(raw);
  if (asym > tol::hermitian_asym) {
    std::ostringstream os;
    os << "hermitian: relative asymmetry " << format_g17(asym)
       << " exceeds tolerance " << format_g17(tol::hermitian_asym);
    throw ValidationError(os.str());
  }
  CMat sym = 0.5 * (raw + raw.adjoint());
  return HermitianMatrix(std::move(sym), asym);
}

HermitianMatrix HermitianMatrix::from_symmetric_parts(const CMat& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 1) {
    throw ValidationError("hermitian: matrix must be square and nonempty");
  }
  CMat sym = 0.5 * (raw + raw.adjoint());
  return HermitianMatrix(std::move(sym), hermitian_asymmetry(raw));
}

HermitianMatrix HermitianMatrix::diagonal(const RVec& entries) {
  if (entries.size() < 1) {
    throw ValidationError("hermitian: empty diagonal");
  }
  CMat m = CMat::Zero(entries.size(), entries.size());
  for (int i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return HermitianMatrix(std::move(m), 0.0);
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  if (dim < 1) throw ValidationError("hermitian: dim must be >= 1");
  return HermitianMatrix(CMat::Identity(dim, dim), 0.0);
}

CMat SpectralDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.adjoint();
}

SpectralDecomposition hermitian_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(h.mat());
  if (solver.info() != Eigen::Success) {
    throw ValidationError("hermitian_eig: eigensolver failed to converge");
  }
  SpectralDecomposition d{solver.eigenvalues(), solver.eigenvectors()};
  const double resid = (d.reconstruct() - h.mat()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, h.mat().cwiseAbs().maxCoeff());
  if (resid > tol::eig_reconstruct * h.dim() * scale) {
    std::ostringstream os;
    os << "hermitian_eig: reconstruction residual " << format_g17(resid)
       << " exceeds " << format_g17(tol::eig_reconstruct * h.dim() * scale);
    throw ValidationError(os.str());
  }
  return d;
}

SpectralDecomposition hermitian_eig(const PSDMatrix& p) {
  return hermitian_eig(p.hermitian());
}

HermitianMatrix apply_spectral_function(
    const HermitianMatrix& h, const std::function<double(double)>& f) {
  SpectralDecomposition d = hermitian_eig(h);
  RVec mapped(d.values.size());
  for (int i = 0; i < d.values.size(); ++i) {
    const double y = f(d.values[i]);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "apply_spectral_function: f undefined at eigenvalue "
         << format_g17(d.values[i]);
      throw DomainError(os.str());
    }
    mapped[i] = y;
  }
  CMat out = d.vectors * mapped.asDiagonal() * d.vectors.adjoint();
  return HermitianMatrix::from_symmetric_parts(out);
}

HermitianMatrix apply_spectral_function(
    const PSDMatrix& p, const std::function<double(double)>& f) {
  return apply_spectral_function(p.hermitian(), f);
}

PSDMatrix PSDMatrix::from_hermitian(const HermitianMatrix& h) {
  SpectralDecomposition d = hermitian_eig(h);
  const double lo = d.values.minCoeff();
  const double hi = d.values.maxCoeff();
  if (lo < tol::psd_floor) {
    std::ostringstream os;
    os << "psd: minimum eigenvalue " << format_g17(lo)
       << " below floor " << format_g17(tol::psd_floor);
    throw ValidationError(os.str());
  }
  return PSDMatrix(h, lo, hi);
}

PSDMatrix PSDMatrix::from_matrix(const CMat& raw) {
  return from_hermitian(HermitianMatrix::from_matrix(raw));
}

PSDMatrix PSDMatrix::diagonal(const RVec& entries) {
  return from_hermitian(HermitianMatrix::diagonal(entries));
}

PSDMatrix PSDMatrix::identity(int dim) {
  return from_hermitian(HermitianMatrix::identity(dim));
}

DensityMatrix DensityMatrix::from_psd(const PSDMatrix& p) {
  const double tr = p.mat().trace().real();
  if (std::abs(tr - 1.0) > tol::trace_one) {
    std::ostringstream os;
    os << "density: trace " << format_g17(tr) << " differs from 1 beyond "
       << format_g17(tol::trace_one);
    throw ValidationError(os.str());
  }
  return DensityMatrix(p);
}

DensityMatrix DensityMatrix::from_matrix(const CMat& raw) {
  return from_psd(PSDMatrix::from_matrix(raw));
}

DensityMatrix DensityMatrix::diagonal(const RVec& entries) {
  return from_psd(PSDMatrix::diagonal(entries));
}

double condition_number(const PSDMatrix& p) {
  const double lo = p.spectral_floor();
  if (lo <= tol::invert_floor) {
    std::ostringstream os;
    os << "condition_number: spectral floor " << format_g17(lo)
       << " at or below " << format_g17(tol::invert_floor);
    throw ValidationError(os.str());
  }
  return p.spectral_ceiling() / lo;
}

double operator_norm(const CMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CMat random_unitary(int dim, Rng& rng) {
  CMat g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.cnormal();
  }
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix phases so the distribution is Haar rather than QR-convention bound.
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a == 0.0) ? Complex(1, 0) : d / a;
  }
  return q;
}

DensityMatrix random_density(int dim, double kappa, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("random_density: dim must be >= 1");
  if (kappa < 1.0) throw ParameterError("random_density: kappa must be >= 1");
  Rng rng(seed);
  RVec ev(dim);
  if (dim == 1) {
    ev[0] = 1.0;
  } else if (kappa == 1.0) {
    ev.setConstant(1.0 / dim);
  } else {
    ev[0] = 1.0;
    ev[dim - 1] = kappa;
    for (int i = 1; i + 1 < dim; ++i) ev[i] = rng.uniform(1.0, kappa);
    ev /= ev.sum();
  }
  std::sort(ev.data(), ev.data() + dim);
  CMat u = random_unitary(dim, rng);
  CMat m = u * ev.asDiagonal() * u.adjoint();
  return DensityMatrix::from_matrix(0.5 * (m + m.adjoint()));
}

PSDMatrix random_psd(int dim, double delta, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("random_psd: dim must be >= 1");
  if (delta <= 0.0 || delta > 1.0) {
    throw ParameterError("random_psd: delta must lie in (0, 1]");
  }
  Rng rng(seed);
  RVec ev(dim);
  ev[0] = delta;
  if (dim >= 2) ev[dim - 1] = 1.0;
  for (int i = 1; i + 1 < dim; ++i) ev[i] = rng.uniform(delta, 1.0);
  std::sort(ev.data(), ev.data() + dim);
  CMat u = random_unitary(dim, rng);
  CMat m = u * ev.asDiagonal() * u.adjoint();
  return PSDMatrix::from_matrix(0.5 * (m + m.adjoint()));
}

CMat partial_trace_second(const CMat& m, int dim_keep, int dim_drop) {
  if (dim_keep < 1 || dim_drop < 1 ||
      m.rows() != static_cast<long>(dim_keep) * dim_drop || m.rows() != m.cols()) {
    throw ParameterError("partial_trace_second: dimension mismatch");
  }
  CMat out = CMat::Zero(dim_keep, dim_keep);
  for (int i = 0; i < dim_keep; ++i) {
    for (int j = 0; j < dim_keep; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < dim_drop; ++k) {
        s += m(i * dim_drop + k, j * dim_drop + k);
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace qmatfun
