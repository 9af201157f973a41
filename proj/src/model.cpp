#include "eiv/model.hpp"

#include <algorithm>
#include <string>

namespace eiv {

namespace {

std::string indexed(std::string_view name, Eigen::Index i) {
  return std::string(name) + "_" + std::to_string(i + 1);
}

void config_require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorKind::config, message);
}

std::vector<Eigen::Index> layout_rows(const std::vector<std::pair<std::string, Eigen::Index>>& theta_blocks,
                                      Eigen::Index q, Eigen::Index p) {
  std::vector<Eigen::Index> rows;
  if (theta_blocks.empty()) {
    rows.push_back(q);
  } else {
    for (const auto& [name, r] : theta_blocks) rows.push_back(r);
  }
  rows.push_back(p);
  return rows;
}

std::vector<std::string> layout_names(const std::vector<std::pair<std::string, Eigen::Index>>& theta_blocks) {
  std::vector<std::string> names;
  if (theta_blocks.empty()) {
    names.emplace_back("theta");
  } else {
    for (const auto& [name, r] : theta_blocks) names.push_back(name);
  }
  names.emplace_back("beta");
  return names;
}

Matrix sigma_inverse(const Matrix& Sigma) { return CholeskyFactor(Sigma, "Sigma").inverse(); }

}  // namespace

GeneralDensity::GeneralDensity(GeneralDensityParams params,
                               std::vector<std::pair<std::string, Eigen::Index>> theta_blocks)
    : params_(std::move(params)),
      layout_(layout_rows(theta_blocks, std::max<Eigen::Index>(params_.M.cols(), 1),
                          std::max<Eigen::Index>(params_.d.cols(), 1)),
              std::max<Eigen::Index>(params_.R.cols(), 1)),
      block_names_(layout_names(theta_blocks)) {
  const auto& P = params_;
  const Eigen::Index n = P.R.rows(), m = P.R.cols(), p = P.d.cols(), q = P.M.cols();
  config_require(n >= 1, "general density: n must be at least 1");
  config_require(m >= 1 && p >= 1 && q >= 1, "general density: m, p and q must be positive");
  config_require(P.M.rows() == n, "general density: M must have n rows");
  config_require(P.d.rows() == n, "general density: d must have n rows");
  config_require(static_cast<Eigen::Index>(P.D.size()) == n, "general density: need one D_i per row");
  config_require(P.a0 > 0.0, "general density: a0 must be positive");
  config_require(static_cast<double>(n) + P.a0 >= static_cast<double>(m),
                 "general density: n + a0 must be at least m");
  config_require(P.B0.rows() == m && P.B0.cols() == m, "general density: B0 must be m x m");
  const Eigen::Index dim = m * (p + q);
  config_require(P.c0.size() == dim, "general density: c0 must have length m(p + q)");
  config_require(P.C0.rows() == dim && P.C0.cols() == dim, "general density: C0 must be m(p + q) square");
  config_require(layout_.rows() == p + q, "general density: theta blocks must cover q rows");

  check_spd(P.B0, "B0");
  C0_chol_ = CholeskyFactor(P.C0, "C0");
  C0_inv_ = C0_chol_.inverse();
  C0_inv_c0_ = C0_chol_.solve(P.c0);
  D_inv_.reserve(static_cast<std::size_t>(n));
  D_inv_d_.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& Di = P.D[static_cast<std::size_t>(i)];
    config_require(Di.rows() == p && Di.cols() == p, indexed("general density: D", i) + " must be p x p");
    const CholeskyFactor chol(Di, indexed("D", i));
    D_inv_.push_back(chol.inverse());
    D_inv_d_.push_back(chol.solve(Vector(P.d.row(i).transpose())));
  }
}

void check_state(const ChainState& s, const GeneralDensity& g) {
  require(s.A.rows() == g.n() && s.A.cols() == g.p(), "chain state: A must be n x p");
  require(s.gamma.size() == g.coef_dim(), "chain state: gamma must have length m(q + p)");
  require(s.Sigma.rows() == g.m() && s.Sigma.cols() == g.m(), "chain state: Sigma must be m x m");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::berkson_x: return "berkson-x";
    case Variant::classical_x: return "classical-x";
    case Variant::berkson_xy: return "berkson-xy";
    case Variant::classical_xy: return "classical-xy";
    case Variant::general: return "general";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::berkson_x, Variant::classical_x, Variant::berkson_xy, Variant::classical_xy,
                    Variant::general}) {
    if (to_string(v) == name) return v;
  }
  fail(ErrorKind::config, "unknown model variant '" + std::string(name) + "'");
}

Eigen::Index ModelConfig::n() const { return general ? general->R.rows() : Y.rows(); }
Eigen::Index ModelConfig::m() const { return general ? general->R.cols() : Y.cols(); }
Eigen::Index ModelConfig::p() const { return general ? general->d.cols() : X.cols(); }
Eigen::Index ModelConfig::q() const { return general ? general->M.cols() : Z.cols(); }

void validate(const ModelConfig& c) {
  if (c.variant == Variant::general) {
    config_require(c.general.has_value(), "model: variant 'general' needs general-density parameters");
    return;
  }
  const Eigen::Index n = c.Y.rows(), m = c.Y.cols(), p = c.X.cols(), q = c.Z.cols();
  config_require(n >= 1, "model: at least one observation is required");
  config_require(m >= 1 && p >= 1 && q >= 1, "model: Y, X and Z need at least one column each");
  config_require(c.X.rows() == n && c.Z.rows() == n, "model: Y, X and Z must have the same number of rows");
  config_require(static_cast<Eigen::Index>(c.V.size()) == n, "model: need one V_i per observation");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& Vi = c.V[static_cast<std::size_t>(i)];
    config_require(Vi.rows() == p && Vi.cols() == p, indexed("model: V", i) + " must be p x p");
    check_spd(Vi, indexed("V", i));
  }
  if (has_response_error(c.variant)) {
    config_require(static_cast<Eigen::Index>(c.U.size()) == n, "model: need one U_i per observation");
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix& Ui = c.U[static_cast<std::size_t>(i)];
      config_require(Ui.rows() == m && Ui.cols() == m, indexed("model: U", i) + " must be m x m");
      check_spd(Ui, indexed("U", i));
    }
  }
  if (is_classical(c.variant)) {
    config_require(c.k.rows() == n && c.k.cols() == p, "model: k must be n x p");
    config_require(static_cast<Eigen::Index>(c.K.size()) == n, "model: need one K_i per observation");
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix& Ki = c.K[static_cast<std::size_t>(i)];
      config_require(Ki.rows() == p && Ki.cols() == p, indexed("model: K", i) + " must be p x p");
      check_spd(Ki, indexed("K", i));
    }
  }
  config_require(c.a0 > 0.0, "model: a0 must be positive");
  config_require(static_cast<double>(n) + c.a0 >= static_cast<double>(m), "model: n + a0 must be at least m");
  config_require(c.B0.rows() == m && c.B0.cols() == m, "model: B0 must be m x m");
  check_spd(c.B0, "B0");
  const Eigen::Index dim = m * (q + p);
  config_require(c.j0.size() == dim, "model: j0 must have length m(q + p)");
  config_require(c.J0.rows() == dim && c.J0.cols() == dim, "model: J0 must be m(q + p) square");
  check_spd(c.J0, "J0");
}

std::pair<Vector, Matrix> classical_latent_prior(const Vector& x, const Matrix& V, const Vector& k,
                                                 const Matrix& K) {
  const CholeskyFactor v_chol(V, "V");
  const CholeskyFactor k_chol(K, "K");
  const Matrix precision = symmetrize(v_chol.inverse() + k_chol.inverse());
  const CholeskyFactor p_chol(precision, "V^{-1} + K^{-1}");
  const Vector d = p_chol.solve(Vector(v_chol.solve(x) + k_chol.solve(k)));
  return {d, p_chol.inverse()};
}

GeneralDensity build_general(const ModelConfig& c) {
  validate(c);
  if (c.variant == Variant::general) return GeneralDensity(*c.general);

  const Eigen::Index n = c.n(), m = c.m(), p = c.p(), q = c.q();
  GeneralDensityParams P;
  P.a0 = c.a0;
  P.B0 = c.B0;
  if (is_classical(c.variant)) {
    P.d.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [di, Di] = classical_latent_prior(c.X.row(i).transpose(), c.V[static_cast<std::size_t>(i)],
                                             c.k.row(i).transpose(), c.K[static_cast<std::size_t>(i)]);
      P.d.row(i) = di.transpose();
      P.D.push_back(std::move(Di));
    }
  } else {
    P.d = c.X;
    P.D = c.V;
  }

  if (!has_response_error(c.variant)) {
    const CoefficientLayout layout({q, p}, m);
    P.M = c.Z;
    P.R = c.Y;
    P.c0 = layout.to_canonical(c.j0);
    P.C0 = layout.to_canonical(c.J0);
    return GeneralDensity(std::move(P));
  }

  // Latent responses join the coefficient block: Theta~ = [V; Theta],
  // M = [-I Z], R = 0, prior N((vec Y, j0), blockdiag(U0, J0)).
  const CoefficientLayout layout({n, q, p}, m);
  P.M.resize(n, n + q);
  P.M << -Matrix::Identity(n, n), c.Z;
  P.R = Matrix::Zero(n, m);

  const Eigen::Index nm = n * m;
  Vector grouped_mean(nm + c.j0.size());
  grouped_mean << vec(c.Y), c.j0;
  Matrix grouped_cov = Matrix::Zero(grouped_mean.size(), grouped_mean.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& Ui = c.U[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < m; ++k) {
      for (Eigen::Index l = 0; l < m; ++l) grouped_cov(k * n + i, l * n + i) = Ui(k, l);
    }
  }
  grouped_cov.bottomRightCorner(c.J0.rows(), c.J0.cols()) = c.J0;
  P.c0 = layout.to_canonical(grouped_mean);
  P.C0 = layout.to_canonical(grouped_cov);
  return GeneralDensity(std::move(P), {{"nu", n}, {"theta", q}});
}

InverseWishartParams sigma_conditional(const ChainState& s, const GeneralDensity& g) {
  check_state(s, g);
  const auto W = coefficient_matrix(s.gamma, g);
  const Matrix E = g.R() - g.M() * W.topRows(g.q()) - s.A * W.bottomRows(g.p());
  return {g.df(), symmetrize(Matrix(E.transpose() * E + g.B0()))};
}

GaussianPrecisionForm coef_precision_form(const Matrix& A, const Matrix& Sigma, const GeneralDensity& g) {
  require(A.rows() == g.n() && A.cols() == g.p(), "coef_conditional: A must be n x p");
  require(Sigma.rows() == g.m() && Sigma.cols() == g.m(), "coef_conditional: Sigma must be m x m");
  Matrix G(g.n(), g.q() + g.p());
  G << g.M(), A;
  const Matrix Sinv = sigma_inverse(Sigma);
  const Matrix GtG = G.transpose() * G;
  Matrix precision = kron(Sinv, GtG) + g.C0_inv();
  precision = symmetrize(precision);
  const Matrix GtRS = G.transpose() * g.R() * Sinv;
  const Vector linear = vec(GtRS) + g.C0_inv_c0();
  CholeskyFactor chol(precision, "coefficient precision");
  Vector mean = chol.solve(linear);
  return {std::move(mean), std::move(chol)};
}

GaussianParams coef_conditional(const Matrix& A, const Matrix& Sigma, const GeneralDensity& g) {
  auto form = coef_precision_form(A, Sigma, g);
  return {std::move(form.mean), form.precision.inverse()};
}

LatentContext make_latent_context(const Matrix& coef_B, const Matrix& coef_Theta, const Matrix& Sigma,
                                  const GeneralDensity& g) {
  require(coef_B.rows() == g.p() && coef_B.cols() == g.m(), "latent update: B must be p x m");
  require(coef_Theta.rows() == g.q() && coef_Theta.cols() == g.m(), "latent update: Theta must be q x m");
  LatentContext ctx;
  ctx.B_sigma_inv = coef_B * sigma_inverse(Sigma);
  ctx.gain = symmetrize(Matrix(ctx.B_sigma_inv * coef_B.transpose()));
  ctx.shifted = g.R() - g.M() * coef_Theta;
  return ctx;
}

GaussianPrecisionForm latent_precision_form(Eigen::Index i, const LatentContext& ctx, const GeneralDensity& g) {
  if (i < 0 || i >= g.n()) {
    fail(ErrorKind::index_out_of_range, "latent index " + std::to_string(i) + " outside [0, n)");
  }
  CholeskyFactor chol(symmetrize(Matrix(ctx.gain + g.D_inv(i))), indexed("latent precision", i));
  const Vector linear = g.D_inv_d(i) + ctx.B_sigma_inv * ctx.shifted.row(i).transpose();
  Vector mean = chol.solve(linear);
  return {std::move(mean), std::move(chol)};
}

GaussianParams latent_conditional(Eigen::Index i, const Vector& gamma, const Matrix& Sigma,
                                  const GeneralDensity& g) {
  if (i < 0 || i >= g.n()) {
    fail(ErrorKind::index_out_of_range, "latent index " + std::to_string(i) + " outside [0, n)");
  }
  require(gamma.size() == g.coef_dim(), "latent_conditional: gamma has the wrong length");
  const auto W = coefficient_matrix(gamma, g);
  const auto ctx = make_latent_context(W.bottomRows(g.p()), W.topRows(g.q()), Sigma, g);
  auto form = latent_precision_form(i, ctx, g);
  return {std::move(form.mean), form.precision.inverse()};
}

double log_unnormalized_density(const ChainState& s, const GeneralDensity& g) {
  check_state(s, g);
  const CholeskyFactor sigma_chol(s.Sigma, "Sigma");
  const auto W = coefficient_matrix(s.gamma, g);
  const Matrix E = g.R() - g.M() * W.topRows(g.q()) - s.A * W.bottomRows(g.p());
  const double m = static_cast<double>(g.m());
  double out = -0.5 * (g.df() + 1.0 + m) * sigma_chol.log_det();
  out -= 0.5 * sigma_chol.solve(g.B0()).trace();
  out -= 0.5 * (E * sigma_chol.solve(Matrix(E.transpose()))).trace();
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const Vector r = s.A.row(i).transpose() - g.d().row(i).transpose();
    out -= 0.5 * r.dot(g.D_inv(i) * r);
  }
  const Vector dg = s.gamma - g.c0();
  out -= 0.5 * dg.dot(g.C0_inv() * dg);
  return out;
}

double drift_value(const Matrix& A, const Vector& gamma, const GeneralDensity& g) {
  require(A.rows() == g.n() && A.cols() == g.p(), "drift_value: A must be n x p");
  require(gamma.size() == g.coef_dim(), "drift_value: gamma has the wrong length");
  double v = 0.0;
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const Vector r = A.row(i).transpose() - g.d().row(i).transpose();
    v += r.dot(g.D_inv(i) * r);
  }
  v += gamma.dot(g.C0_inv() * gamma);
  return 0.5 * v;
}

double inverse_wishart_mean_bound(double nu, const Matrix& B0) { return nu * spd_inverse(B0, "B0").trace(); }

double inverse_wishart_second_moment_bound(double nu, const Matrix& B0) {
  const double t = spd_inverse(B0, "B0").trace();
  return nu * (nu + 2.0) * t * t;
}

double wishart_second_moment_trace(double nu, const Matrix& S) {
  const double t = S.trace();
  return nu * (nu + 1.0) * (S * S).trace() + nu * t * t;
}

DriftBound drift_bound_terms(const GeneralDensity& g) {
  const double n = static_cast<double>(g.n());
  const double p = static_cast<double>(g.p());
  const double dim = static_cast<double>(g.coef_dim());

  Matrix design(g.n(), g.q() + g.p());
  design << g.M(), g.d();
  const Matrix lifted = kron(Matrix(Matrix::Identity(g.m(), g.m())), design);

  DriftBound b;
  b.design_norm = spectral_norm(Matrix(lifted * symmetric_sqrt(g.C0(), "C0")));
  b.inverse_mean_bound = inverse_wishart_mean_bound(g.df(), g.B0());
  b.inverse_second_bound = inverse_wishart_second_moment_bound(g.df(), g.B0());
  b.prior_quadratic = g.c0().dot(g.C0_inv_c0());
  b.response_norm_sq = g.R().squaredNorm();

  const double s2 = b.design_norm * b.design_norm;
  b.L = b.inverse_mean_bound * (b.response_norm_sq / 2.0 + s2 * dim / 4.0 + s2 * b.prior_quadratic / 2.0) +
        b.inverse_second_bound * s2 * b.response_norm_sq / 8.0 + p * n / 2.0 + b.prior_quadratic + dim / 2.0;
  return b;
}

}  // namespace eiv
