#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <string>
#include <string_view>
#include <vector>

#include "eiv/error.hpp"

namespace eiv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative symmetry test: ||S - S^T||_F <= tol * max(1, ||S||_F).
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& S, double tol = 1e-12) {
  if (S.rows() != S.cols()) return false;
  using std::max;
  const double scale = max(1.0, static_cast<double>(S.norm()));
  return static_cast<double>((S - S.transpose()).norm()) <= tol * scale;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& S) {
  return (S + S.transpose()) / typename Derived::Scalar(2);
}

/// Lower Cholesky factor L with L L^T = S. Construction fails loudly, naming
/// the matrix, instead of adding jitter.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;
  CholeskyFactor(const Matrix& spd, std::string_view name = "matrix");

  /// Wraps an already lower-triangular factor with positive diagonal.
  static CholeskyFactor from_lower(Matrix lower, std::string_view name = "factor");

  Eigen::Index dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }
  Matrix reconstruct() const { return lower_ * lower_.transpose(); }
  double log_det() const { return 2.0 * lower_.diagonal().array().log().sum(); }

  /// S^{-1} b by two triangular solves.
  Matrix solve(const Matrix& b) const;
  Vector solve(const Vector& b) const;
  Matrix inverse() const;

 private:
  Matrix lower_;
};

/// Throws not_spd (naming `name`) when S is not symmetric or Cholesky fails.
void check_spd(const Matrix& S, std::string_view name);

/// Inverse of an SPD matrix via its Cholesky factor.
Matrix spd_inverse(const Matrix& S, std::string_view name = "matrix");

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetric_power(const Eigen::MatrixBase<Derived>& S,
                                                  typename Derived::Scalar power,
                                                  std::string_view name) {
  using Scalar = typename Derived::Scalar;
  if (S.rows() != S.cols() || !is_symmetric(S, 1e-10)) {
    fail(ErrorKind::not_spd, std::string(name) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(symmetrize(S));
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= Scalar(0)) {
    fail(ErrorKind::not_spd, std::string(name) + " is not positive definite");
  }
  const auto& Q = eig.eigenvectors();
  MatrixX<Scalar> out =
      Q * eig.eigenvalues().array().pow(power).matrix().asDiagonal() * Q.transpose();
  return symmetrize(out);
}

/// The unique SPD matrix R with R R = S, via eigendecomposition.
template <typename Derived>
MatrixX<typename Derived::Scalar> symmetric_sqrt(const Eigen::MatrixBase<Derived>& S,
                                                 std::string_view name = "matrix") {
  return symmetric_power(S, typename Derived::Scalar(0.5), name);
}

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetric_inv_sqrt(const Eigen::MatrixBase<Derived>& S,
                                                     std::string_view name = "matrix") {
  return symmetric_power(S, typename Derived::Scalar(-0.5), name);
}

/// Largest singular value.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return typename Derived::Scalar(0);
  Eigen::JacobiSVD<MatrixX<typename Derived::Scalar>> svd(A);
  return svd.singularValues()(0);
}

/// A (x) B.
template <typename DA, typename DB>
MatrixX<typename DA::Scalar> kron(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B) {
  MatrixX<typename DA::Scalar> out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

/// Column-stacking vec.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(const Eigen::MatrixBase<Derived>& A) {
  MatrixX<typename Derived::Scalar> tmp = A;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(tmp.data(),
                                                                                     tmp.size());
}

/// Block-diagonal matrix from a list of square blocks.
Matrix block_diagonal(const std::vector<Matrix>& blocks);

}  // namespace eiv
