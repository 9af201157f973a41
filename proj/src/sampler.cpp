#include "eiv/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "eiv/distributions.hpp"

namespace eiv {

namespace {

constexpr std::uint64_t init_stream_tag = 0x696e6974ULL;

}  // namespace

SweepRng::SweepRng(std::uint64_t seed, std::uint64_t replicate, Eigen::Index n)
    : global_(seed, stream_id(replicate, 0)) {
  latent_.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    latent_.emplace_back(seed, stream_id(replicate, static_cast<std::uint64_t>(i) + 1));
  }
}

ChainState gibbs_step(const ChainState& state, const GeneralDensity& g, SweepRng& rng, const KernelFaults& faults) {
  check_state(state, g);
  require(rng.latent_count() == g.n(), "gibbs_step: need one latent stream per observation");

  ChainState next;
  const auto sigma_params = sigma_conditional(state, g);
  next.Sigma = sample_inverse_wishart(sigma_params.df, sigma_params.scale, rng.global());

  const auto coef = coef_precision_form(state.A, next.Sigma, g);
  next.gamma = sample_mvn_precision(coef.mean, coef.precision, rng.global());

  const auto W = coefficient_matrix(next.gamma, g);
  Matrix coef_B = W.bottomRows(g.p());
  if (faults.transpose_latent_coefficients) {
    require(g.p() == g.m(), "transpose fault needs p == m");
    coef_B.transposeInPlace();
  }
  const auto ctx = make_latent_context(coef_B, W.topRows(g.q()), next.Sigma, g);
  next.A.resize(g.n(), g.p());
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const auto form = latent_precision_form(i, ctx, g);
    next.A.row(i) = sample_mvn_precision(form.mean, form.precision, rng.latent(i)).transpose();
  }
  return next;
}

StoreSelection StoreSelection::parse(std::string_view text) {
  StoreSelection s;
  if (text == "all") return {true, true};
  std::stringstream ss{std::string(text)};
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    any = true;
    if (item == "gamma") continue;
    if (item == "sigma") {
      s.sigma = true;
    } else if (item == "latent") {
      s.latent = true;
    } else {
      fail(ErrorKind::config, "store: unknown selection '" + item + "' (expected gamma, sigma, latent or all)");
    }
  }
  if (!any) fail(ErrorKind::config, "store: empty selection");
  return s;
}

std::string StoreSelection::to_string() const {
  if (sigma && latent) return "all";
  std::string out = "gamma";
  if (sigma) out += ",sigma";
  if (latent) out += ",latent";
  return out;
}

void RunSpec::validate() const {
  if (iterations < 1) fail(ErrorKind::config, "run.T must be positive");
  if (burn_in < 0 || burn_in >= iterations) fail(ErrorKind::config, "run.burn_in must be in [0, T)");
  if (thin < 1) fail(ErrorKind::config, "run.thin must be at least 1");
  if (replicates < 1) fail(ErrorKind::config, "run.replicates must be at least 1");
}

Eigen::Index ChainOutput::column(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  require(it != labels.end(), "chain has no coordinate '" + std::string(label) + "'");
  return static_cast<Eigen::Index>(it - labels.begin());
}

Matrix ChainOutput::columns_with_prefix(std::string_view prefix) const {
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (std::string_view(labels[k]).substr(0, prefix.size()) == prefix) cols.push_back(static_cast<Eigen::Index>(k));
  }
  Matrix out(draws.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = draws.col(cols[k]);
  return out;
}

std::vector<std::string> chain_labels(const GeneralDensity& g, const StoreSelection& store) {
  auto labels = g.layout().labels(g.block_names());
  labels.emplace_back("logdetSigma");
  if (store.sigma) {
    for (Eigen::Index l = 0; l < g.m(); ++l) {
      for (Eigen::Index k = 0; k <= l; ++k) {
        labels.push_back("Sigma." + std::to_string(k + 1) + "." + std::to_string(l + 1));
      }
    }
  }
  if (store.latent) {
    for (Eigen::Index i = 0; i < g.n(); ++i) {
      for (Eigen::Index j = 0; j < g.p(); ++j) {
        labels.push_back("A." + std::to_string(i + 1) + "." + std::to_string(j + 1));
      }
    }
  }
  return labels;
}

Vector chain_row(const ChainState& state, const GeneralDensity& g, const StoreSelection& store) {
  const Eigen::Index m = g.m();
  const Eigen::Index size = g.coef_dim() + 1 + (store.sigma ? m * (m + 1) / 2 : 0) +
                            (store.latent ? g.n() * g.p() : 0);
  Vector row(size);
  Eigen::Index at = 0;
  row.head(g.coef_dim()) = state.gamma;
  at += g.coef_dim();
  row(at++) = CholeskyFactor(state.Sigma, "Sigma").log_det();
  if (store.sigma) {
    for (Eigen::Index l = 0; l < m; ++l) {
      for (Eigen::Index k = 0; k <= l; ++k) row(at++) = state.Sigma(k, l);
    }
  }
  if (store.latent) {
    for (Eigen::Index i = 0; i < g.n(); ++i) {
      for (Eigen::Index j = 0; j < g.p(); ++j) row(at++) = state.A(i, j);
    }
  }
  return row;
}

ChainState init_default(const GeneralDensity& g) {
  const double m = static_cast<double>(g.m());
  return {g.d(), g.c0(), g.B0() / std::max(g.a0() + m + 1.0, m + 2.0)};
}

ChainState init_overdispersed(const GeneralDensity& g, RngStream& rng) {
  ChainState s = init_default(g);
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const Matrix root = symmetric_sqrt(g.D(i), "D_i");
    Vector z(g.p());
    for (Eigen::Index j = 0; j < g.p(); ++j) z(j) = rng.normal();
    s.A.row(i) += (10.0 * root * z).transpose();
  }
  return s;
}

std::uint64_t replicate_seed(const RunSpec& spec, int replicate) {
  return spec.seed + static_cast<std::uint64_t>(replicate);
}

ChainOutput run_chain(const GeneralDensity& g, const RunSpec& spec, const ChainState& init, int replicate,
                      std::string_view variant) {
  spec.validate();
  check_state(init, g);
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = replicate_seed(spec, replicate);
  SweepRng rng(seed, static_cast<std::uint64_t>(replicate), g.n());

  ChainOutput out;
  out.labels = chain_labels(g, spec.store);
  out.draws.resize(spec.stored_rows(), static_cast<Eigen::Index>(out.labels.size()));
  ChainState state = init;
  Eigen::Index row = 0;
  for (long t = 1; t <= spec.iterations; ++t) {
    state = gibbs_step(state, g, rng);
    if (t > spec.burn_in && (t - spec.burn_in) % spec.thin == 0 && row < out.draws.rows()) {
      out.draws.row(row++) = chain_row(state, g, spec.store).transpose();
    }
  }

  out.meta.seed = seed;
  out.meta.replicate = replicate;
  out.meta.variant = std::string(variant);
  out.meta.n = g.n();
  out.meta.m = g.m();
  out.meta.p = g.p();
  out.meta.q = g.q();
  out.meta.iterations = spec.iterations;
  out.meta.burn_in = spec.burn_in;
  out.meta.thin = spec.thin;
  out.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ChainOutput run_chain(const GeneralDensity& g, const RunSpec& spec, InitStrategy init, int replicate,
                      std::string_view variant) {
  if (init == InitStrategy::prior_mode) return run_chain(g, spec, init_default(g), replicate, variant);
  RngStream init_rng(replicate_seed(spec, replicate), stream_id(static_cast<std::uint64_t>(replicate), init_stream_tag));
  return run_chain(g, spec, init_overdispersed(g, init_rng), replicate, variant);
}

}  // namespace eiv
