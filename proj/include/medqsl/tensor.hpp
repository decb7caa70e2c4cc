#pragma once

// Dense kernel for Hermitian matrices. Everything here is a free function over
// Eigen expressions, templated on the scalar so real and complex inputs share
// one code path.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "medqsl/errors.hpp"

namespace medqsl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative Frobenius tolerance used for every Hermiticity check.
inline constexpr double kHermitianTol = 1e-10;
/// Eigenvalues in [-kPsdTol, 0) are treated as roundoff and clamped to zero.
inline constexpr double kPsdTol = 1e-10;

template <typename Scalar>
struct EigDecomposition {
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  Eigen::Matrix<RealScalar, Eigen::Dynamic, 1> eigenvalues;  // ascending
  DenseMatrix<Scalar> eigenvectors;                           // unitary, columns

  DenseMatrix<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Scalar>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

/// Kronecker product; the left factor's index varies slowest.
template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename A::Scalar,
                                                      typename B::Scalar>::ReturnType;
  const Eigen::Index br = b.rows(), bc = b.cols();
  const DenseMatrix<Scalar> bs = b.template cast<Scalar>();
  DenseMatrix<Scalar> out(a.rows() * br, a.cols() * bc);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * br, j * bc, br, bc) = Scalar(a(i, j)) * bs;
  return out;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double rel_tol = kHermitianTol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  const double scale = std::max<double>(m.norm(), std::numeric_limits<double>::min());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> out = (m + m.adjoint()) / typename Eigen::NumTraits<Scalar>::Real(2);
  return out;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!is_hermitian(m))
    throw Error(ErrorKind::NotHermitian, std::string(what) + " is not Hermitian within tolerance");
}

/// Ascending eigenvalues and a unitary eigenvector matrix.
template <typename Derived>
EigDecomposition<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& m) {
  require_hermitian(m, "matrix");
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(hermitian_part(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Derived>
auto hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  require_hermitian(m, "matrix");
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(hermitian_part(m),
                                                            Eigen::EigenvaluesOnly);
  return solver.eigenvalues().eval();
}

/// exp(-i t H) from an existing eigendecomposition of H.
template <typename Scalar>
Matrix expm_i_hermitian(const EigDecomposition<Scalar>& eig, double t) {
  const Eigen::Index n = eig.eigenvalues.size();
  Vector phases(n);
  for (Eigen::Index k = 0; k < n; ++k)
    phases(k) = std::polar(1.0, -t * static_cast<double>(eig.eigenvalues(k)));
  const Matrix v = eig.eigenvectors.template cast<cplx>();
  return v * phases.asDiagonal() * v.adjoint();
}

template <typename Derived>
Matrix expm_i_hermitian(const Eigen::MatrixBase<Derived>& h, double t) {
  return expm_i_hermitian(hermitian_eig(h), t);
}

/// Eigenvalues below this are indistinguishable from roundoff of a matrix
/// whose largest eigenvalue magnitude is `scale`.
inline double numerical_zero(Eigen::Index n, double scale) {
  return 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
}

/// Clamp a PSD spectrum: roundoff-level values (including small negatives) go to 0.
template <typename Vec>
void clamp_psd_spectrum(Vec& lambda) {
  const Eigen::Index n = lambda.size();
  if (n == 0) return;
  if (lambda.minCoeff() < -kPsdTol)
    throw Error(ErrorKind::NotPSD, "eigenvalue " + std::to_string(lambda.minCoeff()) +
                                       " below -1e-10");
  const double zero = numerical_zero(n, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < n; ++k)
    if (lambda(k) <= zero) lambda(k) = 0;
}

template <typename Derived>
auto sqrtm_psd(const Eigen::MatrixBase<Derived>& m) {
  auto eig = hermitian_eig(m);
  clamp_psd_spectrum(eig.eigenvalues);
  eig.eigenvalues = eig.eigenvalues.cwiseSqrt();
  return eig.reconstruct().eval();
}

}  // namespace medqsl
