#include "helpers.hpp"

#include "eiv/distributions.hpp"
#include "eiv/error.hpp"
#include "eiv/geweke.hpp"
#include "eiv/sampler.hpp"

using namespace eiv;

namespace {

constexpr Variant all_variants[] = {Variant::berkson_x, Variant::classical_x, Variant::berkson_xy,
                                    Variant::classical_xy};

}  // namespace

TEST_CASE("a sweep never reads the incoming Sigma") {
  RngStream rng(1);
  for (Variant v : all_variants) {
    const GeneralDensity g = build_general(geweke_test_config(v, 5, 2, 2, 1, rng));
    ChainState a = init_default(g);
    a.A = test::gaussian(g.n(), g.p(), rng);
    a.gamma = test::gaussian(g.coef_dim(), 1, rng);
    ChainState b = a;
    b.Sigma = 50.0 * test::spd(2, rng);
    SweepRng ra(9, 0, g.n()), rb(9, 0, g.n());
    const ChainState na = gibbs_step(a, g, ra), nb = gibbs_step(b, g, rb);
    CHECK((na.Sigma - nb.Sigma).norm() == 0.0);
    CHECK((na.gamma - nb.gamma).norm() == 0.0);
    CHECK((na.A - nb.A).norm() == 0.0);
  }
}

TEST_CASE("with B held at zero the latent draws follow the latent prior") {
  RngStream rng(2);
  ModelConfig c = geweke_test_config(Variant::berkson_x, 3, 1, 1, 1, rng);
  // Prior variance 1e-12 on beta pins B at zero.
  c.J0 = Eigen::Vector2d(1.0, 1e-12).asDiagonal();
  c.j0.setZero();
  const GeneralDensity g = build_general(c);
  RunSpec spec;
  spec.iterations = 20000;
  spec.store = StoreSelection::parse("latent");
  const ChainOutput chain = run_chain(g, spec);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Vector a = chain.draws.col(chain.column("A." + std::to_string(i + 1) + ".1"));
    const double mean = a.mean();
    const double se = std::sqrt(g.D(i)(0, 0) / static_cast<double>(a.size()));
    CHECK(std::abs(mean - g.d()(i, 0)) < 5.0 * se);
  }
}

TEST_CASE("latent draws at fixed parameters match the latent conditional") {
  RngStream rng(3);
  const GeneralDensity g = build_general(geweke_test_config(Variant::classical_x, 4, 2, 2, 1, rng));
  const Vector gamma = test::gaussian(g.coef_dim(), 1, rng);
  const Matrix Sigma = test::spd(2, rng);
  const auto W = coefficient_matrix(gamma, g);
  const auto ctx = make_latent_context(W.bottomRows(g.p()), W.topRows(g.q()), Sigma, g);
  const auto form = latent_precision_form(1, ctx, g);
  const auto exact = latent_conditional(1, gamma, Sigma, g);
  const int draws = 50000;
  Vector sum = Vector::Zero(2);
  for (int t = 0; t < draws; ++t) sum += sample_mvn_precision(form.mean, form.precision, rng);
  const Vector mean = sum / draws;
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(std::abs(mean(j) - exact.mean(j)) < 5.0 * std::sqrt(exact.cov(j, j) / draws));
  }
}

TEST_CASE("T = 100 with burn-in 10 stores 90 rows; thinning divides") {
  RngStream rng(4);
  const GeneralDensity g = build_general(geweke_test_config(Variant::berkson_x, 5, 1, 1, 1, rng));
  RunSpec spec;
  spec.iterations = 100;
  spec.burn_in = 10;
  CHECK(run_chain(g, spec).draws.rows() == 90);
  spec.thin = 3;
  CHECK(run_chain(g, spec).draws.rows() == 30);
  spec.burn_in = 100;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("runs with the same seed are identical and replicates use seed + r") {
  RngStream rng(5);
  const GeneralDensity g = build_general(geweke_test_config(Variant::classical_xy, 4, 2, 1, 1, rng));
  RunSpec spec;
  spec.iterations = 200;
  spec.seed = 7;
  spec.store = StoreSelection::parse("all");
  const ChainOutput a = run_chain(g, spec), b = run_chain(g, spec);
  CHECK((a.draws - b.draws).norm() == 0.0);
  const ChainOutput r1 = run_chain(g, spec, InitStrategy::prior_mode, 1);
  CHECK(r1.meta.seed == 8);
  CHECK((a.draws - r1.draws).norm() > 0.0);
}

TEST_CASE("default start sits at the prior mode and overdispersed starts differ by seed") {
  RngStream rng(6);
  ModelConfig c = geweke_test_config(Variant::berkson_x, 5, 2, 2, 1, rng);
  c.j0.setZero();
  const GeneralDensity g = build_general(c);
  const ChainState s = init_default(g);
  CHECK(drift_value(s, g) == 0.0);
  CHECK_NOTHROW(check_spd(s.Sigma, "Sigma"));
  RngStream r1(1), r2(2);
  const ChainState o1 = init_overdispersed(g, r1), o2 = init_overdispersed(g, r2);
  CHECK((o1.A - o2.A).norm() > 0.0);
  CHECK(drift_value(o1, g) > 0.0);
}

TEST_CASE("stored coordinates are labelled and ordered consistently") {
  RngStream rng(7);
  const GeneralDensity g = build_general(geweke_test_config(Variant::berkson_x, 3, 2, 1, 1, rng));
  const auto store = StoreSelection::parse("gamma,sigma,latent");
  CHECK(store.to_string() == "all");
  const auto labels = chain_labels(g, store);
  ChainState s = init_default(g);
  s.Sigma << 2.0, 0.5, 0.5, 3.0;
  s.A(2, 0) = 4.25;
  const Vector row = chain_row(s, g, store);
  REQUIRE(static_cast<Eigen::Index>(labels.size()) == row.size());
  auto at = [&](const std::string& name) {
    return row(std::find(labels.begin(), labels.end(), name) - labels.begin());
  };
  CHECK(at("logdetSigma") == doctest::Approx(std::log(5.75)));
  CHECK(at("Sigma.1.2") == 0.5);
  CHECK(at("Sigma.2.2") == 3.0);
  CHECK(at("A.3.1") == 4.25);
  CHECK(labels.front() == "gamma.theta.1.1");
  CHECK(StoreSelection::parse("gamma").to_string() == "gamma");
  CHECK_THROWS_AS(StoreSelection::parse("gamma,foo"), Error);
}

TEST_CASE("latent streams do not depend on the number of observations before them") {
  SweepRng a(3, 0, 4), b(3, 0, 9);
  CHECK(a.latent(2).normal() == b.latent(2).normal());
  CHECK(a.global().normal() == b.global().normal());
}
