#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sympolar {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Default absolute tolerance for symplecticity checks (max-norm).
inline constexpr double kSymplecticTol = 1e-9;

// Relative eigenvalue floor below which a shape matrix counts as degenerate.
inline constexpr double kDegenerateTol = 1e-12;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input (wrong sizes, asymmetric where symmetry is
// required, values out of domain). CLI maps this to exit code 1.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input matrix fails the symplecticity test. CLI exit code 2.
class NonSymplecticError : public Error {
 public:
  using Error::Error;
};

// Polar dual (or another conversion) is not computable for the given
// variant/dimension. CLI exit code 3.
class UnsupportedDualError : public Error {
 public:
  using Error::Error;
};

// A grid transform produced (or received) a state the grid cannot resolve.
// CLI exit code 4.
class AliasingError : public Error {
 public:
  using Error::Error;
};

// A mathematical invariant required of the input does not hold (e.g. a
// covariance matrix that is not saturated where saturation is required).
// CLI exit code 5.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: near-singular intermediates, failed convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Deterministic random stream with portable output (the raw engine is
/// std::mt19937_64; doubles are derived by explicit bit manipulation so the
/// stream does not depend on the standard library's distribution objects).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Mat normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Vec normal_vector(Eigen::Index size) {
    Vec v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal();
    return v;
  }

  // Uniform direction on the unit sphere S^{n-1}.
  Vec sphere_direction(Eigen::Index n) {
    Vec v = normal_vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = normal_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_symmetric(const Mat& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.transpose()) <= tol * scale;
}

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

/// Symmetric positive (semi)definite matrix power via eigendecomposition.
/// Eigenvalues at or below the degeneracy floor raise NumericalError for
/// negative exponents instead of propagating NaNs.
inline Mat sym_power(const Mat& m, double exponent, double floor_rel = 1e-300) {
  if (!is_symmetric(m))
    throw DimensionError("sym_power: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  if (es.info() != Eigen::Success)
    throw NumericalError("sym_power: eigendecomposition failed");
  Vec ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (exponent < 0.0 && ev(i) <= floor_rel * scale)
      throw NumericalError("sym_power: matrix is singular to working precision");
    if (ev(i) < 0.0 && std::abs(ev(i)) <= 1e-12 * scale) ev(i) = 0.0;
    if (ev(i) < 0.0)
      throw NumericalError("sym_power: matrix has a negative eigenvalue");
  }
  Vec powered(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    powered(i) = std::pow(ev(i), exponent);
  return es.eigenvectors() * powered.asDiagonal() *
         es.eigenvectors().transpose();
}

inline bool is_positive_definite(const Mat& m, double tol = 1e-12) {
  if (!is_symmetric(m)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() > tol * scale;
}

/// Volume of the Euclidean n-ball of radius r: pi^{n/2} r^n / Gamma(n/2 + 1).
inline double ball_volume(int n, double r) {
  return std::pow(M_PI, 0.5 * n) * std::pow(r, n) / std::tgamma(0.5 * n + 1.0);
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

/// Random orthogonal matrix: QR of a Gaussian matrix with the R-diagonal sign
/// fix (Haar distributed, deterministic for a fixed stream).
inline Mat random_orthogonal(Eigen::Index n, Rng& rng) {
  const Mat g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace sympolar
