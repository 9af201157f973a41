#include "eiv/simulate.hpp"

#include <charconv>
#include <cmath>

#include "eiv/distributions.hpp"

namespace eiv {

namespace {

constexpr double sigma_scale = 1e-3;
constexpr double coef_variance = 1e3;
constexpr double covariate_error = 0.2;

Eigen::Index parse_index(std::string_view s, std::string_view what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) {
    fail(ErrorKind::config, "scenario: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return static_cast<Eigen::Index>(value);
}

Vector standard_normal(Eigen::Index d, RngStream& rng) {
  Vector z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
  return z;
}

}  // namespace

Scenario Scenario::scaling(Eigen::Index m, Eigen::Index p) {
  if (m < 1 || p < 1) fail(ErrorKind::config, "scenario: m and p must be positive");
  Scenario s;
  s.kind = Kind::scaling;
  s.m = m;
  s.p = p;
  return s;
}

Scenario Scenario::misspec(double df) {
  if (!(df > 0.0) || !std::isfinite(df)) fail(ErrorKind::config, "scenario: df must be positive");
  Scenario s;
  s.kind = Kind::misspec;
  s.m = 3;
  s.p = 3;
  s.df = df;
  return s;
}

Scenario Scenario::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorKind::config, "scenario: expected 'scaling:M,P' or 'misspec:DF', got '" + std::string(text) + "'");
  }
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  if (kind == "scaling") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) fail(ErrorKind::config, "scenario: scaling needs 'M,P'");
    return scaling(parse_index(args.substr(0, comma), "m"), parse_index(args.substr(comma + 1), "p"));
  }
  if (kind == "misspec") {
    double df = 0.0;
    const auto [ptr, ec] = std::from_chars(args.data(), args.data() + args.size(), df);
    if (ec != std::errc{} || ptr != args.data() + args.size()) {
      fail(ErrorKind::config, "scenario: bad df '" + std::string(args) + "'");
    }
    return misspec(df);
  }
  fail(ErrorKind::config, "scenario: unknown kind '" + std::string(kind) + "'");
}

std::string Scenario::name() const {
  if (kind == Kind::scaling) return "scaling:" + std::to_string(m) + "," + std::to_string(p);
  std::string df_text = std::to_string(df);
  df_text.erase(df_text.find_last_not_of('0') + 1);
  if (df_text.back() == '.') df_text.pop_back();
  return "misspec:" + df_text;
}

SimulatedDataset simulate_dataset(const Scenario& s, RngStream& rng) {
  const Eigen::Index n = s.n, m = s.m, p = s.p, q = 1;
  if (n < 1) fail(ErrorKind::config, "scenario: n must be positive");

  GroundTruth truth;
  truth.Sigma = sample_inverse_wishart(static_cast<double>(m), sigma_scale * Matrix::Identity(m, m), rng);
  const Vector coef = std::sqrt(coef_variance) * standard_normal(m * (q + p), rng);
  // (theta, beta) is drawn in grouped order: vec(Theta) then vec(B).
  truth.Theta = Eigen::Map<const Matrix>(coef.data(), q, m);
  truth.B = Eigen::Map<const Matrix>(coef.data() + m * q, p, m);

  truth.A.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) truth.A.row(i) = standard_normal(p, rng).transpose();

  const Matrix V = covariate_error * Matrix::Identity(p, p);
  const CholeskyFactor v_chol(V, "V");
  const CholeskyFactor sigma_chol(truth.Sigma, "Sigma");

  ModelConfig c;
  c.variant = Variant::berkson_x;
  c.Z = Matrix::Ones(n, q);
  c.X.resize(n, p);
  c.Y.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector a = truth.A.row(i).transpose();
    const Vector x = s.kind == Scenario::Kind::misspec ? sample_mvt(s.df, a, v_chol, rng) : sample_mvn(a, v_chol, rng);
    c.X.row(i) = x.transpose();
    const Vector mean = truth.Theta.transpose() * c.Z.row(i).transpose() + truth.B.transpose() * a;
    c.Y.row(i) = sample_mvn(mean, sigma_chol, rng).transpose();
  }
  c.V.assign(static_cast<std::size_t>(n), V);
  c.a0 = static_cast<double>(m);
  c.B0 = sigma_scale * Matrix::Identity(m, m);
  c.j0 = Vector::Zero(m * (q + p));
  c.J0 = coef_variance * Matrix::Identity(m * (q + p), m * (q + p));
  return {std::move(c), std::move(truth)};
}

}  // namespace eiv
