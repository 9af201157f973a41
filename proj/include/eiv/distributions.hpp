#pragma once

#include "eiv/linalg.hpp"
#include "eiv/rng.hpp"

namespace eiv {

/// mean + L z with z standard normal.
Vector sample_mvn(const Vector& mean, const CholeskyFactor& cov_chol, RngStream& rng);

/// Draw from N(mean, P^{-1}) given the Cholesky factor of the precision P:
/// mean + L^{-T} z. Never forms P^{-1}.
Vector sample_mvn_precision(const Vector& mean, const CholeskyFactor& precision_chol, RngStream& rng);

/// Multivariate t with `df` degrees of freedom, location and scale matrix
/// (scale mixture of normals).
Vector sample_mvt(double df, const Vector& location, const CholeskyFactor& scale_chol, RngStream& rng);

/// Lower Bartlett factor A of a Wishart(df, I_d) draw, W = A A^T. Real df is
/// allowed: the squared diagonal entries are Gamma((df - i) / 2, 2).
Matrix bartlett_factor(double df, Eigen::Index d, RngStream& rng);

/// Wishart(df, S) with S = L L^T, E[W] = df S. Requires df >= d.
Matrix sample_wishart(double df, const CholeskyFactor& scale_chol, RngStream& rng);

/// Inverse-Wishart W^{-1}(df, scale): the inverse of a Wishart(df, scale^{-1})
/// draw. Uses the Cholesky factor of `scale` and a triangular solve against
/// the Bartlett factor. Requires df >= d.
Matrix sample_inverse_wishart(double df, const Matrix& scale, RngStream& rng);

double log_multivariate_gamma(double a, Eigen::Index d);

double logpdf_mvn(const Vector& x, const Vector& mean, const Matrix& cov);

/// Inverse-Wishart log-density; df > d - 1 (so the inverse-gamma case
/// df = 2a, scale = 2b is covered for any a > 0).
double logpdf_inv_wishart(const Matrix& S, double df, const Matrix& scale);

}  // namespace eiv
