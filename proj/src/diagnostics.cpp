#include "eiv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace eiv {

namespace {

constexpr double condition_limit = 1e12;

void require_rows(const Matrix& chain, Eigen::Index min_rows, const char* what) {
  if (chain.rows() < min_rows) {
    fail(ErrorKind::contract_violation,
         std::string(what) + ": chain needs at least " + std::to_string(min_rows) + " rows");
  }
  require(chain.cols() >= 1, std::string(what) + ": chain needs at least one coordinate");
}

std::string coordinate_list(const std::vector<Eigen::Index>& cols) {
  std::string out;
  for (auto c : cols) {
    if (!out.empty()) out += ", ";
    out += std::to_string(c + 1);
  }
  return out;
}

/// Coordinates loading on the near-null direction of a covariance matrix.
std::vector<Eigen::Index> degenerate_coordinates(const Matrix& cov) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < cov.rows(); ++k) {
    if (!(cov(k, k) > 0.0)) cols.push_back(k);
  }
  if (!cols.empty()) return cols;
  const Vector scale = cov.diagonal().cwiseSqrt().cwiseInverse();
  const Matrix corr = scale.asDiagonal() * cov * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
  const Vector v = eig.eigenvectors().col(0);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 0.1) cols.push_back(k);
  }
  return cols;
}

}  // namespace

BatchMeans batch_means(const Matrix& chain) {
  require_rows(chain, 4, "batch_means_cov");
  const Eigen::Index T = chain.rows(), d = chain.cols();
  const auto b = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(T))));
  const Eigen::Index a = T / b;

  Matrix means(a, d);
  for (Eigen::Index k = 0; k < a; ++k) means.row(k) = chain.middleRows(k * b, b).colwise().mean();
  const Eigen::RowVectorXd overall = means.colwise().mean();
  const Matrix centered = means.rowwise() - overall;
  BatchMeans out;
  out.cov = symmetrize(Matrix(static_cast<double>(b) / static_cast<double>(a - 1) * centered.transpose() * centered));
  out.batch_size = b;
  out.batches = a;
  return out;
}

Matrix sample_covariance(const Matrix& chain) {
  require_rows(chain, 2, "sample_covariance");
  const Matrix centered = chain.rowwise() - chain.colwise().mean();
  return symmetrize(Matrix(centered.transpose() * centered / static_cast<double>(chain.rows() - 1)));
}

MessResult mess_detail(const Matrix& chain) {
  require_rows(chain, 4, "mess");
  const Eigen::Index T = chain.rows(), d = chain.cols();
  const Matrix lambda = sample_covariance(chain);
  const Matrix sigma = batch_means_cov(chain);

  Eigen::SelfAdjointEigenSolver<Matrix> lambda_eig(lambda, Eigen::EigenvaluesOnly);
  const double l_max = lambda_eig.eigenvalues().maxCoeff();
  const double l_min = lambda_eig.eigenvalues().minCoeff();
  if (!(l_max > 0.0) || !(l_min > l_max / condition_limit)) {
    fail(ErrorKind::rank_deficient,
         "mess: sample covariance is singular; degenerate coordinates: " +
             coordinate_list(degenerate_coordinates(lambda)));
  }

  Eigen::SelfAdjointEigenSolver<Matrix> sigma_eig(sigma);
  const Vector& ev = sigma_eig.eigenvalues();
  const double s_max = ev.maxCoeff();
  if (!(s_max > 0.0)) {
    fail(ErrorKind::rank_deficient, "mess: batch-means covariance is zero");
  }
  MessResult out;
  out.bm_condition = ev.minCoeff() > 0.0 ? s_max / ev.minCoeff() : std::numeric_limits<double>::infinity();

  if (out.bm_condition <= condition_limit) {
    const double log_ratio =
        CholeskyFactor(lambda, "sample covariance").log_det() - CholeskyFactor(sigma, "batch-means covariance").log_det();
    out.value = static_cast<double>(T) * std::exp(log_ratio / static_cast<double>(d));
    out.rank = d;
    return out;
  }

  // Restrict both matrices to the well-determined eigenspace of sigma.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (ev(k) > s_max / condition_limit) keep.push_back(k);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  Matrix basis(d, r);
  double log_det_sigma = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    basis.col(k) = sigma_eig.eigenvectors().col(keep[static_cast<std::size_t>(k)]);
    log_det_sigma += std::log(ev(keep[static_cast<std::size_t>(k)]));
  }
  const Matrix projected = symmetrize(Matrix(basis.transpose() * lambda * basis));
  const double log_ratio = CholeskyFactor(projected, "projected sample covariance").log_det() - log_det_sigma;
  out.value = static_cast<double>(T) * std::exp(log_ratio / static_cast<double>(r));
  out.rank = r;
  out.pseudo_determinant = true;
  return out;
}

Matrix autocorrelation(const Matrix& chain, Eigen::Index max_lag) {
  require(max_lag >= 0 && max_lag < chain.rows(), "autocorrelation: need 0 <= max_lag < T");
  require(chain.cols() >= 1, "autocorrelation: chain needs at least one coordinate");
  const Eigen::Index T = chain.rows();
  Matrix acf(chain.cols(), max_lag + 1);
  for (Eigen::Index j = 0; j < chain.cols(); ++j) {
    const Vector x = chain.col(j).array() - chain.col(j).mean();
    const double denom = x.squaredNorm();
    if (!(denom > 0.0)) {
      acf.row(j).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    acf(j, 0) = 1.0;
    for (Eigen::Index k = 1; k <= max_lag; ++k) {
      acf(j, k) = x.head(T - k).dot(x.tail(T - k)) / denom;
    }
  }
  return acf;
}

std::pair<double, double> se_eigen_extremes(const Matrix& bm_cov) {
  require(bm_cov.rows() == bm_cov.cols() && bm_cov.rows() > 0, "se_eigen_extremes: need a square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(bm_cov), Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  return {std::sqrt(std::max(0.0, ev.minCoeff())), std::sqrt(std::max(0.0, ev.maxCoeff()))};
}

DiagnosticsReport diagnose(const Matrix& chain, const std::vector<std::string>& labels, Eigen::Index max_lag) {
  require(static_cast<Eigen::Index>(labels.size()) == chain.cols(), "diagnose: one label per coordinate");
  DiagnosticsReport r;
  r.labels = labels;
  r.T = chain.rows();
  r.d = chain.cols();
  r.max_lag = max_lag;
  r.mean = chain.colwise().mean().transpose();
  r.sample_cov = sample_covariance(chain);
  const auto bm = batch_means(chain);
  r.bm_cov = bm.cov;
  r.batch_size = bm.batch_size;
  std::tie(r.se_sqrt_eig_min, r.se_sqrt_eig_max) = se_eigen_extremes(r.bm_cov);

  try {
    const auto m = mess_detail(chain);
    r.mess = m.value;
    r.mess_pseudo_determinant = m.pseudo_determinant;
    r.mess_exceeds_T = m.value > static_cast<double>(r.T);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::rank_deficient) throw;
    r.mess = std::numeric_limits<double>::quiet_NaN();
    r.mess_error = e.what();
  }

  const double T = static_cast<double>(r.T);
  r.mcse = (r.bm_cov.diagonal() / T).cwiseSqrt();
  r.ess.resize(r.d);
  for (Eigen::Index k = 0; k < r.d; ++k) {
    r.ess(k) = r.bm_cov(k, k) > 0.0 ? T * r.sample_cov(k, k) / r.bm_cov(k, k)
                                    : std::numeric_limits<double>::quiet_NaN();
  }
  r.acf = autocorrelation(chain, max_lag);
  for (Eigen::Index k = 0; k < r.d; ++k) {
    if (std::isnan(r.acf(k, 0))) r.zero_variance.push_back(labels[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace eiv
