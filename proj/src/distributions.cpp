#include "eiv/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace eiv {

namespace {

Vector standard_normals(Eigen::Index d, RngStream& rng) {
  Vector z(d);
  for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
  return z;
}

void check_dof(double df, Eigen::Index d) {
  if (!(df >= static_cast<double>(d))) {
    fail(ErrorKind::invalid_dof, "degrees of freedom " + std::to_string(df) +
                                     " must be at least the dimension " + std::to_string(d));
  }
}

}  // namespace

Vector sample_mvn(const Vector& mean, const CholeskyFactor& cov_chol, RngStream& rng) {
  require(mean.size() == cov_chol.dim(), "sample_mvn: mean and covariance dimensions differ");
  return mean + cov_chol.lower() * standard_normals(mean.size(), rng);
}

Vector sample_mvn_precision(const Vector& mean, const CholeskyFactor& precision_chol, RngStream& rng) {
  require(mean.size() == precision_chol.dim(),
          "sample_mvn_precision: mean and precision dimensions differ");
  Vector z = standard_normals(mean.size(), rng);
  return mean + precision_chol.lower().transpose().triangularView<Eigen::Upper>().solve(z);
}

Vector sample_mvt(double df, const Vector& location, const CholeskyFactor& scale_chol, RngStream& rng) {
  require(df > 0.0, "sample_mvt: degrees of freedom must be positive");
  require(location.size() == scale_chol.dim(), "sample_mvt: location and scale dimensions differ");
  Vector z = scale_chol.lower() * standard_normals(location.size(), rng);
  const double w = rng.chi_squared(df) / df;
  return location + z / std::sqrt(w);
}

Matrix bartlett_factor(double df, Eigen::Index d, RngStream& rng) {
  check_dof(df, d);
  Matrix A = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.gamma(0.5 * (df - static_cast<double>(i)), 2.0));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  return A;
}

Matrix sample_wishart(double df, const CholeskyFactor& scale_chol, RngStream& rng) {
  const Matrix A = bartlett_factor(df, scale_chol.dim(), rng);
  const Matrix LA = scale_chol.lower().triangularView<Eigen::Lower>() * A;
  return symmetrize(LA * LA.transpose());
}

Matrix sample_inverse_wishart(double df, const Matrix& scale, RngStream& rng) {
  const CholeskyFactor chol(scale, "inverse-Wishart scale");
  const Matrix A = bartlett_factor(df, chol.dim(), rng);
  // W = L^{-T} A A^T L^{-1}, so W^{-1} = (L A^{-T})(L A^{-T})^T.
  const Matrix T = A.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(chol.lower());
  return symmetrize(T * T.transpose());
}

double log_multivariate_gamma(double a, Eigen::Index d) {
  const double dd = static_cast<double>(d);
  double out = 0.25 * dd * (dd - 1.0) * std::log(std::numbers::pi);
  for (Eigen::Index j = 0; j < d; ++j) out += std::lgamma(a - 0.5 * static_cast<double>(j));
  return out;
}

double logpdf_mvn(const Vector& x, const Vector& mean, const Matrix& cov) {
  require(x.size() == mean.size() && cov.rows() == x.size(), "logpdf_mvn: dimension mismatch");
  const CholeskyFactor chol(cov, "normal covariance");
  const Vector r = chol.lower().triangularView<Eigen::Lower>().solve(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + chol.log_det() + r.squaredNorm());
}

double logpdf_inv_wishart(const Matrix& S, double df, const Matrix& scale) {
  require(S.rows() == scale.rows() && S.cols() == scale.cols(), "logpdf_inv_wishart: dimension mismatch");
  const Eigen::Index d = S.rows();
  const double dd = static_cast<double>(d);
  if (!(df > dd - 1.0)) {
    fail(ErrorKind::invalid_dof, "inverse-Wishart log-density needs df > d - 1");
  }
  const CholeskyFactor s_chol(S, "inverse-Wishart argument");
  const CholeskyFactor psi_chol(scale, "inverse-Wishart scale");
  const double trace = s_chol.solve(scale).trace();
  return 0.5 * df * psi_chol.log_det() - 0.5 * df * dd * std::log(2.0) -
         log_multivariate_gamma(0.5 * df, d) - 0.5 * (df + dd + 1.0) * s_chol.log_det() - 0.5 * trace;
}

}  // namespace eiv
