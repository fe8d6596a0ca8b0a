#pragma once

// Shared aliases, tolerances, error taxonomy, and the seeded RNG used by
// every fixture generator in the library.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qmatfun {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

namespace tol {
// Relative Hermiticity asymmetry accepted before rejection.
inline constexpr double hermitian_asym = 1e-12;
// Eigenvalues above this are considered strictly positive for PSD checks.
inline constexpr double psd_floor = -1e-10;
// Pipelines that invert reject spectral floors at or below this.
inline constexpr double invert_floor = 1e-8;
// Trace-one check for density matrices.
inline constexpr double trace_one = 1e-10;
// Per-dimension factor for eigendecomposition reconstruction residuals.
inline constexpr double eig_reconstruct = 1e-10;
// Unitarity residual (max-abs of U*U^dag - I) for explicit encodings.
inline constexpr double unitarity = 1e-10;
// Slack admitted when checking |p(x)| <= 1 on a certification grid.
inline constexpr double qsvt_admissible = 1e-9;
// Quadrature weights on [0,1] must sum to one within this.
inline constexpr double weight_sum = 1e-12;
}  // namespace tol

// Error taxonomy. The CLI maps each class to a distinct exit code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
// Bad argument values (negative tolerance, t outside [0,1], ...).
struct ParameterError : Error {
  using Error::Error;
};
// Input matrices violating a structural invariant (asymmetry, trace, PSD).
struct ValidationError : Error {
  using Error::Error;
};
// Function evaluated where it is undefined (log at 0, pole collision).
struct DomainError : Error {
  using Error::Error;
};
// Spectral window or conditioning violations in encoding pipelines.
struct WindowError : Error {
  using Error::Error;
};
// File and serialization failures.
struct IoError : Error {
  using Error::Error;
};

// Deterministic stream of doubles/normals built on std::mt19937_64.
// Distribution mapping is done by hand (53-bit uniforms, Box-Muller) so a
// fixture is reproducible from its seed on any platform or language.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return state_(); }

  // Uniform on [0,1) with 53 significant bits.
  double uniform() {
    return static_cast<double>(state_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex cnormal() { return Complex(normal(), normal()); }

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Formats a double with 17 significant digits; round-trips bit-exactly
// through strtod.  Used by every writer that promises byte-stable output.
std::string format_g17(double v);

}  // namespace qmatfun
