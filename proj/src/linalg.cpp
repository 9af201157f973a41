#include "eiv/linalg.hpp"

#include <vector>

namespace eiv {

CholeskyFactor::CholeskyFactor(const Matrix& spd, std::string_view name) {
  if (spd.rows() != spd.cols()) {
    fail(ErrorKind::not_spd, std::string(name) + " is not square");
  }
  if (!is_symmetric(spd)) {
    fail(ErrorKind::not_spd, std::string(name) + " is not symmetric");
  }
  Eigen::LLT<Matrix> llt(spd);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
    fail(ErrorKind::not_spd, "Cholesky factorization of " + std::string(name) + " failed");
  }
  lower_ = llt.matrixL();
}

CholeskyFactor CholeskyFactor::from_lower(Matrix lower, std::string_view name) {
  if (lower.rows() != lower.cols() || !(lower.diagonal().array() > 0.0).all()) {
    fail(ErrorKind::not_spd, std::string(name) + " is not a valid Cholesky factor");
  }
  CholeskyFactor f;
  f.lower_ = lower.triangularView<Eigen::Lower>();
  return f;
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
  require(b.rows() == dim(), "CholeskyFactor::solve: dimension mismatch");
  Matrix y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector CholeskyFactor::solve(const Vector& b) const {
  require(b.size() == dim(), "CholeskyFactor::solve: dimension mismatch");
  Vector y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::inverse() const {
  return symmetrize(solve(Matrix(Matrix::Identity(dim(), dim()))));
}

void check_spd(const Matrix& S, std::string_view name) { CholeskyFactor(S, name); }

Matrix spd_inverse(const Matrix& S, std::string_view name) { return CholeskyFactor(S, name).inverse(); }

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    require(b.rows() == b.cols(), "block_diagonal: blocks must be square");
    total += b.rows();
  }
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace eiv
