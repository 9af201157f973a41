#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eiv/layout.hpp"
#include "eiv/linalg.hpp"

namespace eiv {

/// Hyperparameters of the general error-in-variables target
///
///   pi(A, gamma, Sigma) ∝ det(Sigma)^{-(n + a0 + 1 + m)/2} exp(-tr(Sigma^{-1} B0)/2)
///       x exp(-1/2 sum_i (R_i - Theta^T M_i - B^T A_i)^T Sigma^{-1} (...))
///       x exp(-1/2 sum_i (A_i - d_i)^T D_i^{-1} (A_i - d_i))
///       x exp(-1/2 (gamma - c0)^T C0^{-1} (gamma - c0)),
///
/// with gamma = vec([Theta; B]) in canonical (column-stacked) order.
struct GeneralDensityParams {
  double a0 = 0.0;
  Matrix B0;               // m x m
  Vector c0;               // m(q + p), canonical order
  Matrix C0;               // m(q + p) square, canonical order
  Matrix d;                // n x p, row i is d_i
  std::vector<Matrix> D;   // n matrices, p x p
  Matrix R;                // n x m
  Matrix M;                // n x q
};

/// Validated, immutable general density with cached prior precisions.
class GeneralDensity {
 public:
  /// `theta_blocks` splits the q rows of Theta into named row blocks (the
  /// response-error models put the latent responses first). Defaults to a
  /// single "theta" block.
  explicit GeneralDensity(GeneralDensityParams params,
                          std::vector<std::pair<std::string, Eigen::Index>> theta_blocks = {});

  Eigen::Index n() const noexcept { return params_.R.rows(); }
  Eigen::Index m() const noexcept { return params_.R.cols(); }
  Eigen::Index p() const noexcept { return params_.d.cols(); }
  Eigen::Index q() const noexcept { return params_.M.cols(); }
  Eigen::Index coef_dim() const noexcept { return m() * (p() + q()); }

  double a0() const noexcept { return params_.a0; }
  double df() const noexcept { return static_cast<double>(n()) + params_.a0; }
  const Matrix& B0() const noexcept { return params_.B0; }
  const Vector& c0() const noexcept { return params_.c0; }
  const Matrix& C0() const noexcept { return params_.C0; }
  const Matrix& d() const noexcept { return params_.d; }
  const Matrix& D(Eigen::Index i) const { return params_.D[static_cast<std::size_t>(i)]; }
  const Matrix& R() const noexcept { return params_.R; }
  const Matrix& M() const noexcept { return params_.M; }
  const GeneralDensityParams& params() const noexcept { return params_; }

  const Matrix& C0_inv() const noexcept { return C0_inv_; }
  const Vector& C0_inv_c0() const noexcept { return C0_inv_c0_; }
  const CholeskyFactor& C0_chol() const noexcept { return C0_chol_; }
  const Matrix& D_inv(Eigen::Index i) const { return D_inv_[static_cast<std::size_t>(i)]; }
  const Vector& D_inv_d(Eigen::Index i) const { return D_inv_d_[static_cast<std::size_t>(i)]; }

  const CoefficientLayout& layout() const noexcept { return layout_; }
  const std::vector<std::string>& block_names() const noexcept { return block_names_; }

 private:
  GeneralDensityParams params_;
  Matrix C0_inv_;
  Vector C0_inv_c0_;
  CholeskyFactor C0_chol_;
  std::vector<Matrix> D_inv_;
  std::vector<Vector> D_inv_d_;
  CoefficientLayout layout_;
  std::vector<std::string> block_names_;
};

/// One Gibbs state. Rows of A are the latent covariates.
struct ChainState {
  Matrix A;      // n x p
  Vector gamma;  // m(q + p), canonical order
  Matrix Sigma;  // m x m
};

void check_state(const ChainState& state, const GeneralDensity& g);

/// W = [Theta; B] as a (q + p) x m view of gamma.
inline Eigen::Map<const Matrix> coefficient_matrix(const Vector& gamma, const GeneralDensity& g) {
  return {gamma.data(), g.q() + g.p(), g.m()};
}

enum class Variant { berkson_x, classical_x, berkson_xy, classical_xy, general };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
inline bool is_classical(Variant v) { return v == Variant::classical_x || v == Variant::classical_xy; }
inline bool has_response_error(Variant v) { return v == Variant::berkson_xy || v == Variant::classical_xy; }

/// Observed data, known error covariances and priors for one of the four
/// regression models. j0/J0 are in grouped (theta, beta) order.
struct ModelConfig {
  Variant variant = Variant::berkson_x;
  Matrix Y;                // n x m
  Matrix X;                // n x p
  Matrix Z;                // n x q
  std::vector<Matrix> V;   // covariate error covariances, p x p
  std::vector<Matrix> U;   // response error covariances, m x m (xy variants)
  double a0 = 0.0;
  Matrix B0;
  Vector j0;
  Matrix J0;
  Matrix k;                // n x p prior means of A (classical variants)
  std::vector<Matrix> K;   // prior covariances of A (classical variants)
  std::optional<GeneralDensityParams> general;  // variant == general only

  Eigen::Index n() const;
  Eigen::Index m() const;
  Eigen::Index p() const;
  Eigen::Index q() const;
};

/// Throws config/not_spd errors describing the first violated requirement.
void validate(const ModelConfig& config);

/// Classical-error shrinkage of the observed covariate towards its prior mean:
/// D = (V^{-1} + K^{-1})^{-1}, d = D (V^{-1} x + K^{-1} k).
std::pair<Vector, Matrix> classical_latent_prior(const Vector& x, const Matrix& V, const Vector& k,
                                                 const Matrix& K);

/// Maps a model onto the general density.
GeneralDensity build_general(const ModelConfig& config);

struct InverseWishartParams {
  double df;
  Matrix scale;
};

struct GaussianParams {
  Vector mean;
  Matrix cov;
};

/// Gaussian conditional held as (mean, Cholesky factor of the precision).
struct GaussianPrecisionForm {
  Vector mean;
  CholeskyFactor precision;
};

/// Sigma | A, gamma ~ W^{-1}(n + a0, E^T E + B0) with E = R - M Theta - A B.
InverseWishartParams sigma_conditional(const ChainState& state, const GeneralDensity& g);

/// gamma | A, Sigma in precision form: precision Sigma^{-1} (x) G^T G + C0^{-1},
/// linear term vec(G^T R Sigma^{-1}) + C0^{-1} c0, G = [M A].
GaussianPrecisionForm coef_precision_form(const Matrix& A, const Matrix& Sigma, const GeneralDensity& g);

/// (c_n, C_n) for gamma | A, Sigma.
GaussianParams coef_conditional(const Matrix& A, const Matrix& Sigma, const GeneralDensity& g);

/// Quantities shared by all latent updates of one sweep.
struct LatentContext {
  Matrix B_sigma_inv;  // B Sigma^{-1}, p x m
  Matrix gain;         // B Sigma^{-1} B^T, p x p
  Matrix shifted;      // R - M Theta, n x m
};

LatentContext make_latent_context(const Matrix& coef_B, const Matrix& coef_Theta, const Matrix& Sigma,
                                  const GeneralDensity& g);

GaussianPrecisionForm latent_precision_form(Eigen::Index i, const LatentContext& ctx, const GeneralDensity& g);

/// (d_{n,i}, D_{n,i}) for A_i | gamma, Sigma; i is 0-based.
GaussianParams latent_conditional(Eigen::Index i, const Vector& gamma, const Matrix& Sigma,
                                  const GeneralDensity& g);

/// Log of the general density up to an additive constant.
double log_unnormalized_density(const ChainState& state, const GeneralDensity& g);

/// V(A, gamma) = 1/2 sum_i (A_i - d_i)^T D_i^{-1} (A_i - d_i) + 1/2 gamma^T C0^{-1} gamma.
double drift_value(const Matrix& A, const Vector& gamma, const GeneralDensity& g);
inline double drift_value(const ChainState& state, const GeneralDensity& g) {
  return drift_value(state.A, state.gamma, g);
}

/// Pieces of the one-sweep drift bound E[V(next) | current] <= L.
struct DriftBound {
  double L = 0.0;
  double design_norm = 0.0;           // s = ||(I_m (x) [M X~]) C0^{1/2}||_2
  double inverse_mean_bound = 0.0;    // bound on E||Sigma^{-1}||_2
  double inverse_second_bound = 0.0;  // bound on E||Sigma^{-1}||_2^2
  double prior_quadratic = 0.0;       // c0^T C0^{-1} c0
  double response_norm_sq = 0.0;      // ||R||_F^2
};

DriftBound drift_bound_terms(const GeneralDensity& g);
inline double drift_bound(const GeneralDensity& g) { return drift_bound_terms(g).L; }

/// nu tr(B0^{-1}) >= E||Sigma^{-1}||_2 for Sigma ~ W^{-1}(nu, E^T E + B0).
double inverse_wishart_mean_bound(double nu, const Matrix& B0);
/// nu (nu + 2) tr(B0^{-1})^2 >= tr E[Sigma^{-2}] >= E||Sigma^{-1}||_2^2.
double inverse_wishart_second_moment_bound(double nu, const Matrix& B0);
/// tr E[W^2] = nu (nu + 1) tr(S^2) + nu tr(S)^2 for W ~ Wishart(nu, S).
double wishart_second_moment_trace(double nu, const Matrix& S);

}  // namespace eiv
