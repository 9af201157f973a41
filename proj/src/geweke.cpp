#include "eiv/geweke.hpp"

#include <algorithm>
#include <cmath>

#include "eiv/diagnostics.hpp"
#include "eiv/distributions.hpp"
#include "eiv/identities.hpp"

namespace eiv {

namespace {

struct Coefficients {
  Matrix Theta;  // q x m
  Matrix B;      // p x m
  Matrix V;      // n x m latent responses (response-error models only)
};

Eigen::Index coefficient_rows(const ModelConfig& c) {
  return (has_response_error(c.variant) ? c.n() : 0) + c.q() + c.p();
}

Coefficients unpack(const ModelConfig& c, const Vector& gamma) {
  const Eigen::Map<const Matrix> W(gamma.data(), coefficient_rows(c), c.m());
  const Eigen::Index lead = has_response_error(c.variant) ? c.n() : 0;
  Coefficients out;
  out.V = W.topRows(lead);
  out.Theta = W.middleRows(lead, c.q());
  out.B = W.bottomRows(c.p());
  return out;
}

Vector linear_mean(const ModelConfig& c, const Coefficients& w, const Matrix& A, Eigen::Index i) {
  return w.Theta.transpose() * c.Z.row(i).transpose() + w.B.transpose() * A.row(i).transpose();
}

/// Draws the data given parameters and latents, writing into c.
void regenerate_data(ModelConfig& c, const ChainState& s, RngStream& rng) {
  const Coefficients w = unpack(c, s.gamma);
  const CholeskyFactor sigma_chol(s.Sigma, "Sigma");
  for (Eigen::Index i = 0; i < c.n(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (has_response_error(c.variant)) {
      c.Y.row(i) = sample_mvn(w.V.row(i).transpose(), CholeskyFactor(c.U[ui], "U"), rng).transpose();
    } else {
      c.Y.row(i) = sample_mvn(linear_mean(c, w, s.A, i), sigma_chol, rng).transpose();
    }
    if (is_classical(c.variant)) {
      c.X.row(i) = sample_mvn(s.A.row(i).transpose(), CholeskyFactor(c.V[ui], "V"), rng).transpose();
    }
  }
}

/// One marginal-conditional draw of (parameters, latents, data).
ChainState draw_joint(ModelConfig& c, RngStream& rng) {
  const Eigen::Index n = c.n(), m = c.m(), p = c.p(), q = c.q();
  ChainState s;
  s.Sigma = sample_inverse_wishart(c.a0, c.B0, rng);
  const Vector grouped = sample_mvn(c.j0, CholeskyFactor(c.J0, "J0"), rng);
  const Eigen::Map<const Matrix> Theta(grouped.data(), q, m);
  const Eigen::Map<const Matrix> B(grouped.data() + q * m, p, m);

  s.A.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vector a = is_classical(c.variant)
                         ? sample_mvn(c.k.row(i).transpose(), CholeskyFactor(c.K[ui], "K"), rng)
                         : sample_mvn(c.X.row(i).transpose(), CholeskyFactor(c.V[ui], "V"), rng);
    s.A.row(i) = a.transpose();
  }

  Matrix W(coefficient_rows(c), m);
  if (has_response_error(c.variant)) {
    const CholeskyFactor sigma_chol(s.Sigma, "Sigma");
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector mean = Theta.transpose() * c.Z.row(i).transpose() + B.transpose() * s.A.row(i).transpose();
      W.row(i) = sample_mvn(mean, sigma_chol, rng).transpose();
    }
    W.middleRows(n, q) = Theta;
  } else {
    W.topRows(q) = Theta;
  }
  W.bottomRows(p) = B;
  s.gamma = vec(W);
  regenerate_data(c, s, rng);
  return s;
}

std::vector<std::string> test_function_names(const GeneralDensity& g) {
  auto names = chain_labels(g, StoreSelection{true, true});
  names.emplace_back("drift");
  return names;
}

Vector test_functions(const ChainState& s, const GeneralDensity& g) {
  const Vector row = chain_row(s, g, StoreSelection{true, true});
  Vector out(row.size() + 1);
  out << row, drift_value(s, g);
  return out;
}

void check_geweke_config(const ModelConfig& c) {
  if (c.variant == Variant::general) {
    fail(ErrorKind::config,
         "geweke: the general variant has no generative model for its data; use one of the four regression variants");
  }
  validate(c);
  if (c.a0 < static_cast<double>(c.m())) {
    fail(ErrorKind::config, "geweke: the prior W^{-1}(a0, B0) needs a0 >= m to be drawn from; got a0 = " +
                                std::to_string(c.a0) + ", m = " + std::to_string(c.m()));
  }
}

}  // namespace

double GewekeReport::fraction_within(double bound) const {
  if (stats.empty()) return 0.0;
  const auto inside = std::count_if(stats.begin(), stats.end(), [&](const auto& s) { return std::abs(s.z) <= bound; });
  return static_cast<double>(inside) / static_cast<double>(stats.size());
}

double GewekeReport::max_abs_z() const {
  double out = 0.0;
  for (const auto& s : stats) out = std::max(out, std::abs(s.z));
  return out;
}

GewekeReport geweke_validate(const ModelConfig& config, const GewekeOptions& opt, RngStream& rng) {
  check_geweke_config(config);
  require(opt.iterations >= 16, "geweke: need at least 16 iterations");
  const auto N = static_cast<Eigen::Index>(opt.iterations);

  RngStream marginal_rng = rng.substream(1);
  RngStream successive_rng = rng.substream(2);

  ModelConfig work = config;
  ChainState state = draw_joint(work, marginal_rng);
  const auto names = test_function_names(build_general(work));
  const auto d = static_cast<Eigen::Index>(names.size());

  Matrix marginal(N, d), successive(N, d);
  for (Eigen::Index t = 0; t < N; ++t) {
    ModelConfig c = config;
    const ChainState s = draw_joint(c, marginal_rng);
    marginal.row(t) = test_functions(s, build_general(c)).transpose();
  }

  GewekeReport report;
  report.variant = config.variant;
  report.iterations = opt.iterations;

  // A defective kernel can drive the chain to overflow. The sweep that fails
  // is recorded and the statistics use the iterations completed before it.
  SweepRng sweep(successive_rng.engine()(), 0, config.n());
  Eigen::Index completed = 0;
  for (Eigen::Index t = 0; t < N; ++t) {
    try {
      if (opt.mode == GewekeMode::prior_vs_prior) {
        work = config;
        state = draw_joint(work, successive_rng);
      } else {
        state = gibbs_step(state, build_general(work), sweep, opt.faults);
        regenerate_data(work, state, successive_rng);
      }
      const Vector f = test_functions(state, build_general(work));
      if (!f.allFinite()) fail(ErrorKind::not_spd, "non-finite test function");
      successive.row(t) = f.transpose();
      completed = t + 1;
    } catch (const Error& e) {
      report.diverged_at = static_cast<long>(t) + 1;
      report.divergence = e.what();
      break;
    }
  }
  require(completed >= 16, "geweke: the successive-conditional chain diverged at iteration " +
                               std::to_string(completed + 1) + ": " + report.divergence);
  successive.conservativeResize(completed, Eigen::NoChange);

  const Vector marginal_var = sample_covariance(marginal).diagonal();
  const Vector successive_lrv = batch_means_cov(successive).diagonal();
  for (Eigen::Index k = 0; k < d; ++k) {
    GewekeStatistic st;
    st.name = names[static_cast<std::size_t>(k)];
    st.marginal_mean = marginal.col(k).mean();
    st.successive_mean = successive.col(k).mean();
    st.marginal_se = std::sqrt(marginal_var(k) / static_cast<double>(N));
    st.successive_se = std::sqrt(successive_lrv(k) / static_cast<double>(completed));
    const double se = std::hypot(st.marginal_se, st.successive_se);
    st.z = se > 0.0 ? (st.marginal_mean - st.successive_mean) / se : 0.0;
    report.stats.push_back(std::move(st));
  }
  return report;
}

ModelConfig geweke_test_config(Variant variant, Eigen::Index n, Eigen::Index m, Eigen::Index p, Eigen::Index q,
                               RngStream& rng) {
  require(variant != Variant::general, "geweke_test_config: pick one of the regression variants");
  ModelConfig c;
  c.variant = variant;
  c.Y = Matrix::Zero(n, m);
  c.Z = random_matrix(n, q, rng);
  c.Z.col(0).setOnes();
  c.X = random_matrix(n, p, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.V.push_back(0.5 * random_spd(p, rng));
    if (has_response_error(variant)) c.U.push_back(0.5 * random_spd(m, rng));
    if (is_classical(variant)) c.K.push_back(random_spd(p, rng));
  }
  if (is_classical(variant)) c.k = random_matrix(n, p, rng);
  c.a0 = static_cast<double>(m) + 4.0;
  c.B0 = 3.0 * Matrix::Identity(m, m);
  c.j0 = 0.5 * random_matrix(m * (q + p), 1, rng);
  c.J0 = Matrix::Identity(m * (q + p), m * (q + p));
  return c;
}

}  // namespace eiv
