#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "sympolar/common.hpp"

namespace sympolar {

/// Standard symplectic form matrix J = [[0, I], [-I, 0]] of order 2n.
inline Mat standard_J(int n) {
  if (n < 1) throw DimensionError("standard_J: n must be >= 1");
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

/// True iff ||M^T J M - J||_max <= tol. Throws on odd order.
inline bool is_symplectic(const Mat& m, double tol = kSymplecticTol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw DimensionError("is_symplectic: matrix must be square of even order");
  const int n = static_cast<int>(m.rows()) / 2;
  const Mat j = standard_J(n);
  return max_abs(m.transpose() * j * m - j) <= tol;
}

/// A real 2n x 2n matrix known to satisfy S^T J S = J. Construction validates;
/// the inverse uses the closed form -J S^T J, which is again exactly
/// symplectic in floating point up to sign bookkeeping.
class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(Mat m, double tol = kSymplecticTol)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
      throw DimensionError("SymplecticMatrix: order must be even and positive");
    if (!is_symplectic(m_, tol))
      throw NonSymplecticError("SymplecticMatrix: S^T J S != J within tolerance");
    n_ = static_cast<int>(m_.rows()) / 2;
  }

  static SymplecticMatrix identity(int n) {
    return SymplecticMatrix(Mat::Identity(2 * n, 2 * n));
  }

  int half_dim() const { return n_; }
  const Mat& matrix() const { return m_; }

  SymplecticMatrix inverse() const {
    const Mat j = standard_J(n_);
    return SymplecticMatrix(-j * m_.transpose() * j);
  }

  SymplecticMatrix operator*(const SymplecticMatrix& rhs) const {
    return SymplecticMatrix(m_ * rhs.m_);
  }

  Vec operator*(const Vec& z) const { return m_ * z; }

 private:
  Mat m_;
  int n_;
};

/// M_L = [[L^{-1}, 0], [0, L^T]], the point transformation (x,p) -> (L^{-1}x, L^T p).
inline SymplecticMatrix generator_ML(const Mat& l) {
  if (l.rows() != l.cols() || l.rows() == 0)
    throw DimensionError("generator_ML: L must be square");
  const int n = static_cast<int>(l.rows());
  Eigen::FullPivLU<Mat> lu(l);
  if (!lu.isInvertible())
    throw NumericalError("generator_ML: L is singular");
  Mat s = Mat::Zero(2 * n, 2 * n);
  s.topLeftCorner(n, n) = lu.inverse();
  s.bottomRightCorner(n, n) = l.transpose();
  return SymplecticMatrix(s);
}

/// V_P = [[I, 0], [-P, I]], the shear (x,p) -> (x, p - Px); P symmetric.
/// With this sign, V_{-P} realizes (x,p) -> (x, Px + p).
inline SymplecticMatrix generator_VP(const Mat& p) {
  if (!is_symmetric(p))
    throw DimensionError("generator_VP: P must be symmetric");
  const int n = static_cast<int>(p.rows());
  Mat s = Mat::Identity(2 * n, 2 * n);
  s.bottomLeftCorner(n, n) = -symmetrize(p);
  return SymplecticMatrix(s);
}

/// Matrix exponential (scaling-and-squaring Pade, via Eigen).
inline Mat matrix_exponential(const Mat& a) {
  if (a.rows() != a.cols())
    throw DimensionError("matrix_exponential: matrix must be square");
  if (!a.allFinite())
    throw NumericalError("matrix_exponential: non-finite entries");
  return a.exp();
}

/// Random symplectic matrix exp(J A) with A symmetric Gaussian, scaled so the
/// condition number stays moderate. Deterministic for a fixed stream.
inline SymplecticMatrix random_symplectic(int n, Rng& rng) {
  if (n < 1) throw DimensionError("random_symplectic: n must be >= 1");
  const Mat g = rng.normal_matrix(2 * n, 2 * n);
  const Mat a = symmetrize(g) / std::sqrt(2.0 * n);
  return SymplecticMatrix(matrix_exponential(standard_J(n) * a));
}

inline SymplecticMatrix random_symplectic(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_symplectic(n, rng);
}

/// Factors of S = V_P M_L R with P symmetric, L symmetric positive definite
/// and R a symplectic rotation [[E, F], [-F, E]].
struct PreIwasawaFactors {
  Mat p;
  Mat l;
  SymplecticMatrix r;

  Mat block_E() const {
    const int n = r.half_dim();
    return r.matrix().topLeftCorner(n, n);
  }
  Mat block_F() const {
    const int n = r.half_dim();
    return r.matrix().topRightCorner(n, n);
  }

  Mat reconstruct() const {
    return (generator_VP(p) * generator_ML(l) * r).matrix();
  }
};

/// Pre-Iwasawa factorization: with S = [[A, B], [C, D]],
///   L = (AA^T + BB^T)^{-1/2}
///   P = -(CA^T + DB^T)(AA^T + BB^T)^{-1}
///   E = (AA^T + BB^T)^{-1/2} A,  F = (AA^T + BB^T)^{-1/2} B.
/// The triple is unique and the computation is deterministic.
inline PreIwasawaFactors pre_iwasawa(const SymplecticMatrix& s) {
  const int n = s.half_dim();
  const Mat& m = s.matrix();
  const Mat a = m.topLeftCorner(n, n);
  const Mat b = m.topRightCorner(n, n);
  const Mat c = m.bottomLeftCorner(n, n);
  const Mat d = m.bottomRightCorner(n, n);

  const Mat u = symmetrize(a * a.transpose() + b * b.transpose());
  const Mat u_inv_sqrt = sym_power(u, -0.5);  // rejects near-singular U
  const Mat u_inv = sym_power(u, -1.0);

  Mat r = Mat::Zero(2 * n, 2 * n);
  const Mat e = u_inv_sqrt * a;
  const Mat f = u_inv_sqrt * b;
  r.topLeftCorner(n, n) = e;
  r.topRightCorner(n, n) = f;
  r.bottomLeftCorner(n, n) = -f;
  r.bottomRightCorner(n, n) = e;
  return PreIwasawaFactors{
      symmetrize(-(c * a.transpose() + d * b.transpose()) * u_inv), u_inv_sqrt,
      SymplecticMatrix(r)};
}

inline PreIwasawaFactors pre_iwasawa(const Mat& s, double tol = kSymplecticTol) {
  return pre_iwasawa(SymplecticMatrix(s, tol));
}

/// The n positive numbers lambda_j with spectrum(JM) = {+-i lambda_j},
/// sorted descending.
struct SymplecticSpectrum {
  Vec values;

  double max() const { return values(0); }
  double min() const { return values(values.size() - 1); }
  double product() const { return values.prod(); }
};

/// Symplectic eigenvalues of a symmetric positive definite M: the positive
/// imaginary parts of eig(JM), pair-checked and sorted. A conjugate-pair
/// mismatch beyond 1e-8 (relative) signals an input that slipped through the
/// symmetry/positivity tolerance and raises NumericalError.
inline SymplecticSpectrum symplectic_eigenvalues(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw DimensionError("symplectic_eigenvalues: order must be even");
  if (!is_symmetric(m))
    throw DimensionError("symplectic_eigenvalues: M must be symmetric");
  if (!is_positive_definite(m))
    throw DimensionError("symplectic_eigenvalues: M must be positive definite");
  const int n = static_cast<int>(m.rows()) / 2;

  Eigen::EigenSolver<Mat> es(standard_J(n) * m);
  if (es.info() != Eigen::Success)
    throw NumericalError("symplectic_eigenvalues: eigensolver failed");
  std::vector<double> imag(2 * n);
  for (int i = 0; i < 2 * n; ++i) imag[i] = es.eigenvalues()(i).imag();
  std::sort(imag.begin(), imag.end());

  const double scale = std::max(1.0, std::abs(imag.back()));
  Vec values(n);
  for (int j = 0; j < n; ++j) {
    const double pos = imag[2 * n - 1 - j];
    const double neg = imag[j];
    if (std::abs(pos + neg) > 1e-8 * scale || pos <= 0.0)
      throw NumericalError(
          "symplectic_eigenvalues: conjugate pairing failed; input is not a "
          "valid symmetric positive definite matrix");
    values(j) = 0.5 * (pos - neg);
  }
  return SymplecticSpectrum{values};
}

/// Williamson normal form: a symplectic S with S^T M S = diag(Lambda, Lambda),
/// Lambda = diag(spectrum) sorted descending.
struct WilliamsonFactors {
  SymplecticMatrix s;
  SymplecticSpectrum spectrum;

  Mat diagonal() const {
    const int n = s.half_dim();
    Vec d(2 * n);
    d.head(n) = spectrum.values;
    d.tail(n) = spectrum.values;
    return d.asDiagonal();
  }
};

/// Williamson factorization of a symmetric positive definite M, computed from
/// the Hermitian eigenproblem of i M^{-1/2} J M^{-1/2}. Degenerate symplectic
/// eigenvalues are handled (orthonormal eigenvectors of the Hermitian matrix
/// already give a symplectic basis).
inline WilliamsonFactors williamson(const Mat& m) {
  if (!is_symmetric(m) || !is_positive_definite(m))
    throw DimensionError("williamson: M must be symmetric positive definite");
  const int n = static_cast<int>(m.rows()) / 2;
  const Mat m_inv_sqrt = sym_power(m, -0.5);
  const Mat a = m_inv_sqrt * standard_J(n) * m_inv_sqrt;  // antisymmetric

  CMat h = Complex(0.0, 1.0) * a.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw NumericalError("williamson: Hermitian eigensolver failed");

  // Positive eigenvalues mu_j (ascending) are 1/lambda_j, so lambda descends.
  Mat q(2 * n, 2 * n);
  Vec lambda(n);
  int written = 0;
  for (int k = 0; k < 2 * n && written < n; ++k) {
    const double mu = es.eigenvalues()(k);
    if (mu <= 0.0) continue;
    const CVec w = es.eigenvectors().col(k);
    q.col(written) = std::sqrt(2.0) * w.imag();
    q.col(n + written) = std::sqrt(2.0) * w.real();
    lambda(written) = 1.0 / mu;
    ++written;
  }
  if (written != n)
    throw NumericalError("williamson: could not extract n positive eigenvalues");

  Vec d_half(2 * n);
  d_half.head(n) = lambda.cwiseSqrt();
  d_half.tail(n) = lambda.cwiseSqrt();
  const Mat s = m_inv_sqrt * q * d_half.asDiagonal();
  return WilliamsonFactors{SymplecticMatrix(s, 1e-7),
                           SymplecticSpectrum{lambda}};
}

}  // namespace sympolar
