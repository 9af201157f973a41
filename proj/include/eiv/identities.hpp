#pragma once

#include <string>
#include <vector>

#include "eiv/linalg.hpp"
#include "eiv/rng.hpp"

namespace eiv {

// Numerical versions of the identities and inequalities behind the drift
// bound. Errors are relative Frobenius errors; "slack" is bound - value.

/// |d_{n,i} - (d_i + (B S^{-1} B^T + D^{-1})^{-1} B S^{-1} (shifted - B^T d_i))|,
/// where `shifted` is R_i - Theta^T M_i.
double mean_shift_identity_error(const Matrix& B, const Matrix& Sigma, const Matrix& D, const Vector& d,
                                 const Vector& shifted);

/// (B S^{-1} B^T + D^{-1})^{-1} against D^{1/2} U (S_i S_i^T + I)^{-1} U^T D^{1/2}
/// from the SVD D^{1/2} B S^{-1/2} = U S_i V^T.
double latent_resolvent_identity_error(const Matrix& B, const Matrix& Sigma, const Matrix& D);

/// C_n against C0^{1/2} V (S^T S + I)^{-1} V^T C0^{1/2} from the SVD
/// (S^{-1/2} (x) G) C0^{1/2} = U S V^T, with G = [M A].
double coef_resolvent_identity_error(const Matrix& G, const Matrix& Sigma, const Matrix& C0);

/// 1/2 tr[D^{-1/2} (B S^{-1} B^T + D^{-1})^{-1} D^{-1/2}], bounded by p/2.
double latent_trace_term(const Matrix& B, const Matrix& Sigma, const Matrix& D);

/// 1/2 tr(C0^{-1/2} C_n C0^{-1/2}), bounded by m(p + q)/2.
double coef_trace_term(const Matrix& G, const Matrix& Sigma, const Matrix& C0);

/// ||D^{-1/2} (B S^{-1} B^T + D^{-1})^{-1} B S^{-1/2}||_2^2, bounded by 1/4.
double latent_gain_norm_sq(const Matrix& B, const Matrix& Sigma, const Matrix& D);

/// ||C0^{-1/2} C_n (S^{-1/2} (x) G)^T||_2^2, bounded by 1/4.
double coef_gain_norm_sq(const Matrix& G, const Matrix& Sigma, const Matrix& C0);

/// x / (x^2 + a) and its bound 1 / (2 sqrt(a)).
double ratio_value(double x, double a);
double ratio_bound(double a);

struct IdentityCheck {
  std::string name;
  int instances = 0;
  bool is_bound = false;  // bound checks report the smallest slack
  double worst = 0.0;     // largest error, or smallest slack
  double tolerance = 0.0;
  bool passed = false;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
};

struct IdentityOptions {
  int instances = 100;
  int moment_draws = 100000;
  Eigen::Index max_p = 5;
  Eigen::Index max_m = 3;
  Eigen::Index max_q = 3;
  double tolerance = 1e-8;
};

/// Runs every identity and bound on randomized inputs. Failures are reported,
/// not thrown. The inverse-Wishart moment bounds are checked by Monte Carlo:
/// the sample mean minus five standard errors must not exceed the bound.
IdentityReport proof_identities_check(const IdentityOptions& options, RngStream& rng);

/// Random SPD matrix G G^T / d + 0.1 I.
Matrix random_spd(Eigen::Index d, RngStream& rng);
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

}  // namespace eiv
