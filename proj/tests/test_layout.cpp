#include "helpers.hpp"

#include "eiv/layout.hpp"

using namespace eiv;

TEST_CASE("grouped and canonical orderings coincide for m = 1") {
  const CoefficientLayout layout({2, 3}, 1);
  const auto perm = layout.grouped_to_canonical();
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(perm[k] == static_cast<Eigen::Index>(k));
}

TEST_CASE("canonical order stacks columns of [Theta; B]") {
  // q = 1, p = 2, m = 2: W = [t11 t12; b11 b12; b21 b22].
  const CoefficientLayout layout({1, 2}, 2);
  Vector grouped(6);
  grouped << 1, 2,        // vec(Theta) = (t11, t12)
      3, 4, 5, 6;         // vec(B) = (b11, b21, b12, b22)
  Vector expected(6);
  expected << 1, 3, 4,    // column 1: t11, b11, b21
      2, 5, 6;            // column 2: t12, b12, b22
  CHECK((layout.to_canonical(grouped) - expected).norm() == 0.0);
  CHECK((layout.to_grouped(expected) - grouped).norm() == 0.0);
}

TEST_CASE("permutation round-trips vectors and covariance matrices") {
  RngStream rng(3);
  const CoefficientLayout layout({4, 2, 3}, 3);
  const Vector g = test::gaussian(layout.size(), 1, rng);
  CHECK((layout.to_grouped(layout.to_canonical(g)) - g).norm() == 0.0);
  const Matrix C = test::spd(layout.size(), rng);
  const Matrix Cc = layout.to_canonical(C);
  CHECK((layout.to_grouped(Cc) - C).norm() == 0.0);
  // Covariance conversion agrees with permuting samples.
  const Vector x = test::gaussian(layout.size(), 1, rng);
  CHECK(std::abs(x.dot(C * x) - layout.to_canonical(x).dot(Cc * layout.to_canonical(x))) < 1e-10);
}

TEST_CASE("labels follow canonical positions") {
  const CoefficientLayout layout({1, 2}, 2);
  const auto labels = layout.labels({"theta", "beta"});
  REQUIRE(labels.size() == 6);
  CHECK(labels[0] == "gamma.theta.1.1");
  CHECK(labels[1] == "gamma.beta.1.1");
  CHECK(labels[2] == "gamma.beta.2.1");
  CHECK(labels[3] == "gamma.theta.1.2");
  CHECK(labels[5] == "gamma.beta.2.2");
  CHECK(layout.canonical_index(1, 1, 1) == 5);
  CHECK(layout.grouped_index(1, 1, 1) == 5);
  CHECK(layout.grouped_index(1, 0, 1) == 4);
}
