#include "eiv/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eiv/distributions.hpp"
#include "eiv/model.hpp"

namespace eiv {

namespace {

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, a.norm());
}

Matrix latent_resolvent(const Matrix& B, const Matrix& Sigma, const Matrix& D) {
  const Matrix Sinv = spd_inverse(Sigma, "Sigma");
  return spd_inverse(symmetrize(Matrix(B * Sinv * B.transpose() + spd_inverse(D, "D"))), "latent precision");
}

Matrix coef_covariance(const Matrix& G, const Matrix& Sigma, const Matrix& C0) {
  const Matrix Sinv = spd_inverse(Sigma, "Sigma");
  const Matrix GtG = G.transpose() * G;
  return spd_inverse(symmetrize(Matrix(kron(Sinv, GtG) + spd_inverse(C0, "C0"))), "coefficient precision");
}

Eigen::Index uniform_index(Eigen::Index lo, Eigen::Index hi, RngStream& rng) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng.engine());
}

struct Running {
  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double standard_error() const {
    const double c = static_cast<double>(count);
    const double var = std::max(0.0, (sum_sq - sum * sum / c) / (c - 1.0));
    return std::sqrt(var / c);
  }
};

void record_error(IdentityCheck& check, double error) {
  ++check.instances;
  check.worst = std::max(check.worst, error);
}

void record_slack(IdentityCheck& check, double slack) {
  ++check.instances;
  check.worst = std::min(check.worst, slack);
}

}  // namespace

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  }
  return out;
}

Matrix random_spd(Eigen::Index d, RngStream& rng) {
  const Matrix G = random_matrix(d, d, rng);
  return symmetrize(Matrix(G * G.transpose() / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d)));
}

double mean_shift_identity_error(const Matrix& B, const Matrix& Sigma, const Matrix& D, const Vector& d,
                                 const Vector& shifted) {
  const Matrix Sinv = spd_inverse(Sigma, "Sigma");
  const Matrix Dinv = spd_inverse(D, "D");
  const Matrix cov = latent_resolvent(B, Sigma, D);
  const Vector direct = cov * (Dinv * d + B * Sinv * shifted);
  const Vector shifted_form = d + cov * B * Sinv * (shifted - B.transpose() * d);
  return relative_error(direct, shifted_form);
}

double latent_resolvent_identity_error(const Matrix& B, const Matrix& Sigma, const Matrix& D) {
  const Matrix D_half = symmetric_sqrt(D, "D");
  const Matrix core = D_half * B * symmetric_inv_sqrt(Sigma, "Sigma");
  Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeFullU);
  const Eigen::Index p = B.rows();
  Vector shrink = Vector::Ones(p);
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()(k);
    shrink(k) = 1.0 / (s * s + 1.0);
  }
  const Matrix& U = svd.matrixU();
  const Matrix via_svd = D_half * U * shrink.asDiagonal() * U.transpose() * D_half;
  return relative_error(latent_resolvent(B, Sigma, D), via_svd);
}

double coef_resolvent_identity_error(const Matrix& G, const Matrix& Sigma, const Matrix& C0) {
  const Matrix C0_half = symmetric_sqrt(C0, "C0");
  const Matrix core = kron(symmetric_inv_sqrt(Sigma, "Sigma"), G) * C0_half;
  Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeFullV);
  const Eigen::Index dim = C0.rows();
  Vector shrink = Vector::Ones(dim);
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()(k);
    shrink(k) = 1.0 / (s * s + 1.0);
  }
  const Matrix& V = svd.matrixV();
  const Matrix via_svd = C0_half * V * shrink.asDiagonal() * V.transpose() * C0_half;
  return relative_error(coef_covariance(G, Sigma, C0), via_svd);
}

double latent_trace_term(const Matrix& B, const Matrix& Sigma, const Matrix& D) {
  const Matrix D_ihalf = symmetric_inv_sqrt(D, "D");
  return 0.5 * (D_ihalf * latent_resolvent(B, Sigma, D) * D_ihalf).trace();
}

double coef_trace_term(const Matrix& G, const Matrix& Sigma, const Matrix& C0) {
  const Matrix C0_ihalf = symmetric_inv_sqrt(C0, "C0");
  return 0.5 * (C0_ihalf * coef_covariance(G, Sigma, C0) * C0_ihalf).trace();
}

double latent_gain_norm_sq(const Matrix& B, const Matrix& Sigma, const Matrix& D) {
  const Matrix gain =
      symmetric_inv_sqrt(D, "D") * latent_resolvent(B, Sigma, D) * B * symmetric_inv_sqrt(Sigma, "Sigma");
  const double s = spectral_norm(gain);
  return s * s;
}

double coef_gain_norm_sq(const Matrix& G, const Matrix& Sigma, const Matrix& C0) {
  const Matrix lifted = kron(symmetric_inv_sqrt(Sigma, "Sigma"), G);
  const Matrix gain = symmetric_inv_sqrt(C0, "C0") * coef_covariance(G, Sigma, C0) * lifted.transpose();
  const double s = spectral_norm(gain);
  return s * s;
}

double ratio_value(double x, double a) { return x / (x * x + a); }
double ratio_bound(double a) { return 1.0 / (2.0 * std::sqrt(a)); }

bool IdentityReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

IdentityReport proof_identities_check(const IdentityOptions& opt, RngStream& rng) {
  const double inf = std::numeric_limits<double>::infinity();
  auto identity = [&](std::string name) {
    return IdentityCheck{std::move(name), 0, false, 0.0, opt.tolerance, false};
  };
  auto bound = [&](std::string name) { return IdentityCheck{std::move(name), 0, true, inf, 0.0, false}; };

  IdentityCheck mean_shift = identity("mean_shift_identity");
  IdentityCheck latent_svd = identity("latent_resolvent_svd_identity");
  IdentityCheck coef_svd = identity("coef_resolvent_svd_identity");
  IdentityCheck ratio = bound("ratio_inequality");
  IdentityCheck latent_trace = bound("latent_trace_bound");
  IdentityCheck coef_trace = bound("coef_trace_bound");
  IdentityCheck latent_gain = bound("latent_gain_norm_bound");
  IdentityCheck coef_gain = bound("coef_gain_norm_bound");
  IdentityCheck inv_mean = bound("inverse_wishart_mean_bound");
  IdentityCheck inv_second = bound("inverse_wishart_second_moment_bound");

  for (int t = 0; t < opt.instances; ++t) {
    const Eigen::Index p = uniform_index(1, opt.max_p, rng);
    const Eigen::Index m = uniform_index(1, opt.max_m, rng);
    const Eigen::Index q = uniform_index(1, opt.max_q, rng);
    const Eigen::Index n = uniform_index(1, 8, rng);
    const double scale = std::exp(1.5 * rng.normal());
    const Matrix B = scale * random_matrix(p, m, rng);
    const Matrix Sigma = random_spd(m, rng);
    const Matrix D = random_spd(p, rng);
    const Vector d = random_matrix(p, 1, rng);
    const Vector shifted = random_matrix(m, 1, rng);
    const Matrix G = scale * random_matrix(n, q + p, rng);
    const Matrix C0 = random_spd(m * (q + p), rng);

    record_error(mean_shift, mean_shift_identity_error(B, Sigma, D, d, shifted));
    record_error(latent_svd, latent_resolvent_identity_error(B, Sigma, D));
    record_error(coef_svd, coef_resolvent_identity_error(G, Sigma, C0));
    record_slack(latent_trace, 0.5 * static_cast<double>(p) - latent_trace_term(B, Sigma, D));
    record_slack(coef_trace, 0.5 * static_cast<double>(m * (p + q)) - coef_trace_term(G, Sigma, C0));
    record_slack(latent_gain, 0.25 - latent_gain_norm_sq(B, Sigma, D));
    record_slack(coef_gain, 0.25 - coef_gain_norm_sq(G, Sigma, C0));

    const double x = std::exp(2.0 * rng.normal());
    const double a = std::exp(2.0 * rng.normal());
    record_slack(ratio, (ratio_bound(a) - ratio_value(x, a)) / ratio_bound(a));
  }

  for (int t = 0; t < opt.instances; ++t) {
    const Eigen::Index m = uniform_index(1, opt.max_m, rng);
    const Eigen::Index n = uniform_index(m, 10, rng);
    const double a0 = 0.5 + 4.5 * rng.uniform();
    const double nu = static_cast<double>(n) + a0;
    const Matrix B0 = random_spd(m, rng);
    const Matrix E = random_matrix(n, m, rng) * std::exp(rng.normal());
    const Matrix scale = symmetrize(Matrix(E.transpose() * E + B0));

    Running norm, second;
    for (int k = 0; k < opt.moment_draws; ++k) {
      const Matrix Sigma = sample_inverse_wishart(nu, scale, rng);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(Sigma, Eigen::EigenvaluesOnly);
      const Vector inv = eig.eigenvalues().cwiseInverse();
      norm.add(inv.maxCoeff());
      second.add(inv.squaredNorm());
    }
    record_slack(inv_mean, inverse_wishart_mean_bound(nu, B0) - (norm.mean() - 5.0 * norm.standard_error()));
    record_slack(inv_second,
                 inverse_wishart_second_moment_bound(nu, B0) - (second.mean() - 5.0 * second.standard_error()));
  }

  IdentityReport report;
  for (auto* c : {&mean_shift, &latent_svd, &coef_svd, &ratio, &latent_trace, &coef_trace, &latent_gain,
                  &coef_gain, &inv_mean, &inv_second}) {
    c->passed = c->instances > 0 && (c->is_bound ? c->worst >= 0.0 : c->worst <= c->tolerance);
    report.checks.push_back(*c);
  }
  return report;
}

}  // namespace eiv
