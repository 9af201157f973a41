#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eiv/linalg.hpp"

namespace eiv {

// Chains are T x d matrices, one row per stored iteration.

struct BatchMeans {
  Matrix cov;                  // long-run covariance estimate
  Eigen::Index batch_size = 0; // b = floor(sqrt(T))
  Eigen::Index batches = 0;    // a = floor(T / b)
};

/// Non-overlapping batch means with b = floor(sqrt(T)) and a = floor(T / b):
/// b / (a - 1) sum_k (ybar_k - ybar)(ybar_k - ybar)^T over the first a b rows.
BatchMeans batch_means(const Matrix& chain);
inline Matrix batch_means_cov(const Matrix& chain) { return batch_means(chain).cov; }

/// Sample covariance with divisor T - 1.
Matrix sample_covariance(const Matrix& chain);

struct MessResult {
  double value = 0.0;
  bool pseudo_determinant = false;  // batch-means matrix was near singular
  Eigen::Index rank = 0;            // dimensions used in the determinant ratio
  double bm_condition = 0.0;
};

/// Multivariate ESS, T (det Lambda / det Sigma_bm)^{1/d}, through Cholesky
/// log-determinants. When the batch-means matrix has condition number above
/// 1e12 the ratio is taken on the span of its significant eigenvectors and
/// the result is flagged. A singular sample covariance throws rank_deficient.
MessResult mess_detail(const Matrix& chain);
inline double mess(const Matrix& chain) { return mess_detail(chain).value; }

/// d x (max_lag + 1) sample autocorrelations, normalized by the full-sample
/// variance. Zero-variance coordinates get NaN rows.
Matrix autocorrelation(const Matrix& chain, Eigen::Index max_lag);

/// Smallest and largest eigenvalues of the symmetric square root of bm_cov.
std::pair<double, double> se_eigen_extremes(const Matrix& bm_cov);

struct DiagnosticsReport {
  std::vector<std::string> labels;
  Eigen::Index T = 0;
  Eigen::Index d = 0;
  Eigen::Index batch_size = 0;
  Eigen::Index max_lag = 0;
  Vector mean;
  Matrix sample_cov;
  Matrix bm_cov;
  double se_sqrt_eig_min = 0.0;
  double se_sqrt_eig_max = 0.0;
  double mess = 0.0;
  bool mess_exceeds_T = false;
  bool mess_pseudo_determinant = false;
  std::string mess_error;  // set, with mess = NaN, when the chain is rank deficient
  Vector mcse;  // sqrt(bm_cov_kk / T)
  Vector ess;   // T sample_var_k / bm_cov_kk
  Matrix acf;
  std::vector<std::string> zero_variance;  // labels with undefined autocorrelation
};

DiagnosticsReport diagnose(const Matrix& chain, const std::vector<std::string>& labels, Eigen::Index max_lag = 20);

}  // namespace eiv
