#include "helpers.hpp"

#include "eiv/error.hpp"
#include "eiv/simulate.hpp"

using namespace eiv;

TEST_CASE("scaling scenarios have the documented shapes") {
  RngStream rng(1);
  const auto small = simulate_dataset(Scenario::scaling(1, 1), rng);
  CHECK(small.config.Y.rows() == 50);
  CHECK(small.config.Y.cols() == 1);
  CHECK(small.config.X.cols() == 1);
  CHECK((small.config.Z.array() == 1.0).all());
  CHECK(build_general(small.config).coef_dim() == 2);

  const auto large = simulate_dataset(Scenario::scaling(3, 7), rng);
  CHECK(large.config.Y.cols() == 3);
  CHECK(large.config.X.cols() == 7);
  CHECK(build_general(large.config).coef_dim() == 24);
  CHECK(large.truth.B.rows() == 7);
  CHECK(large.truth.B.cols() == 3);
  CHECK(large.config.a0 == 3.0);
  CHECK(large.config.V[0](0, 0) == doctest::Approx(0.2));
}

TEST_CASE("the same stream gives the same data set") {
  RngStream a(5), b(5);
  const auto da = simulate_dataset(Scenario::scaling(2, 7), a);
  const auto db = simulate_dataset(Scenario::scaling(2, 7), b);
  CHECK((da.config.Y - db.config.Y).norm() == 0.0);
  CHECK((da.config.X - db.config.X).norm() == 0.0);
}

TEST_CASE("Gaussian covariate errors have variance 0.2") {
  RngStream rng(2);
  double sum_sq = 0.0;
  long count = 0;
  for (int r = 0; r < 200; ++r) {
    const auto d = simulate_dataset(Scenario::scaling(1, 3), rng);
    const Matrix err = d.config.X - d.truth.A;
    sum_sq += err.squaredNorm();
    count += err.size();
  }
  CHECK(std::abs(sum_sq / count / 0.2 - 1.0) < 0.05);
}

TEST_CASE("t errors with df = 2 are heavier tailed than with df = 10") {
  RngStream rng(3);
  auto kurtosis = [&](double df) {
    Vector e(0);
    std::vector<double> values;
    for (int r = 0; r < 100; ++r) {
      const auto d = simulate_dataset(Scenario::misspec(df), rng);
      const Matrix err = d.config.X - d.truth.A;
      values.insert(values.end(), err.data(), err.data() + err.size());
    }
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
      m2 += v * v;
      m4 += v * v * v * v;
    }
    m2 /= static_cast<double>(values.size());
    m4 /= static_cast<double>(values.size());
    return m4 / (m2 * m2);
  };
  const double k10 = kurtosis(10.0);
  const double k2 = kurtosis(2.0);
  CHECK(k10 > 3.0);
  CHECK(k2 > 2.0 * k10);
}

TEST_CASE("scenario names parse back") {
  for (const auto& s : {Scenario::scaling(2, 7), Scenario::misspec(2.0), Scenario::misspec(2.5)}) {
    const auto t = Scenario::parse(s.name());
    CHECK(t.name() == s.name());
    CHECK(t.m == s.m);
    CHECK(t.p == s.p);
  }
  CHECK(Scenario::misspec(10.0).name() == "misspec:10");
  CHECK(Scenario::misspec(10.0).m == 3);
  CHECK_THROWS_AS(Scenario::parse("scaling"), Error);
  CHECK_THROWS_AS(Scenario::parse("other:1"), Error);
}
