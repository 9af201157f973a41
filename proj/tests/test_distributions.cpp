#include "helpers.hpp"

#include <cmath>

#include "eiv/distributions.hpp"
#include "eiv/error.hpp"

using namespace eiv;

namespace {

constexpr int draws = 100000;

double inverse_gamma_logpdf(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

/// Entrywise mean and standard error of a stream of matrices.
struct MatrixMoments {
  Matrix sum, sum_sq;
  int count = 0;
  explicit MatrixMoments(Eigen::Index d) : sum(Matrix::Zero(d, d)), sum_sq(Matrix::Zero(d, d)) {}
  void add(const Matrix& X) {
    sum += X;
    sum_sq += X.cwiseProduct(X);
    ++count;
  }
  Matrix mean() const { return sum / count; }
  Matrix se() const {
    const Matrix m = mean();
    return ((sum_sq / count - m.cwiseProduct(m)) * count / (count - 1.0) / count).cwiseSqrt();
  }
};

}  // namespace

TEST_CASE("sample_mvn with zero mean and identity covariance has mean near zero") {
  RngStream rng(1);
  const CholeskyFactor chol(Matrix::Identity(2, 2));
  Vector sum = Vector::Zero(2);
  for (int t = 0; t < draws; ++t) sum += sample_mvn(Vector::Zero(2), chol, rng);
  sum /= draws;
  CHECK(std::abs(sum(0)) < 0.02);
  CHECK(std::abs(sum(1)) < 0.02);
}

TEST_CASE("sample_mvn reproduces diag(4, 9) and the spectrum of [[2,1],[1,2]]") {
  RngStream rng(2);
  Vector mean(2);
  mean << 1, 2;
  Matrix cov = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  Matrix X(draws, 2);
  const CholeskyFactor chol(cov);
  for (int t = 0; t < draws; ++t) X.row(t) = sample_mvn(mean, chol, rng).transpose();
  Matrix C = X.rowwise() - X.colwise().mean();
  C = C.transpose() * C / (draws - 1.0);
  CHECK(std::abs(C(0, 0) / 4.0 - 1.0) < 0.05);
  CHECK(std::abs(C(1, 1) / 9.0 - 1.0) < 0.05);
  CHECK(std::abs(C(0, 1)) < 0.05 * 6.0);

  Matrix S(2, 2);
  S << 2, 1, 1, 2;
  const CholeskyFactor schol(S);
  for (int t = 0; t < draws; ++t) X.row(t) = sample_mvn(Vector::Zero(2), schol, rng).transpose();
  C = X.rowwise() - X.colwise().mean();
  C = C.transpose() * C / (draws - 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
  CHECK(std::abs(eig.eigenvalues()(0) / 1.0 - 1.0) < 0.05);
  CHECK(std::abs(eig.eigenvalues()(1) / 3.0 - 1.0) < 0.05);
}

TEST_CASE("sample_mvn rejects mismatched dimensions") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_mvn(Vector::Zero(3), CholeskyFactor(Matrix::Identity(2, 2)), rng), Error);
}

TEST_CASE("sample_mvn_precision draws have covariance equal to the inverse precision") {
  RngStream rng(4);
  Matrix P(2, 2);
  P << 2, 0.5, 0.5, 1;
  const CholeskyFactor chol(P);
  MatrixMoments mom(2);
  for (int t = 0; t < draws; ++t) {
    const Vector x = sample_mvn_precision(Vector::Zero(2), chol, rng);
    mom.add(x * x.transpose());
  }
  const Matrix target = P.inverse();
  const Matrix z = (mom.mean() - target).cwiseQuotient(mom.se());
  CHECK(z.cwiseAbs().maxCoeff() < 5.0);
}

TEST_CASE("Wishart(5, I2) has mean 5 I2") {
  RngStream rng(5);
  const CholeskyFactor chol(Matrix::Identity(2, 2));
  MatrixMoments mom(2);
  for (int t = 0; t < draws; ++t) mom.add(sample_wishart(5.0, chol, rng));
  const Matrix target = 5.0 * Matrix::Identity(2, 2);
  CHECK((mom.mean() - target).norm() / target.norm() < 0.02);
}

TEST_CASE("Wishart(6, diag(2,4)) second moment trace matches 1056") {
  RngStream rng(6);
  Matrix S = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  const CholeskyFactor chol(S);
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Matrix W = sample_wishart(6.0, chol, rng);
    sum += (W * W).trace();
  }
  const double expected = 6.0 * 7.0 * 20.0 + 6.0 * 36.0;
  CHECK(expected == doctest::Approx(1056.0));
  CHECK(std::abs(sum / draws / expected - 1.0) < 0.05);
}

TEST_CASE("scalar Wishart is chi-squared, including real degrees of freedom") {
  RngStream rng(7);
  const CholeskyFactor one(Matrix::Identity(1, 1));
  for (double nu : {1.0, 3.0, 7.5}) {
    double sum = 0.0;
    for (int t = 0; t < draws; ++t) sum += sample_wishart(nu, one, rng)(0, 0);
    const double se = std::sqrt(2.0 * nu / draws);
    CHECK(std::abs(sum / draws - nu) < 5.0 * se);
  }
}

TEST_CASE("Wishart rejects df below the dimension") {
  RngStream rng(1);
  try {
    sample_wishart(1.5, CholeskyFactor(Matrix::Identity(2, 2)), rng);
    FAIL("expected invalid_dof");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_dof);
  }
  CHECK_THROWS_AS(sample_inverse_wishart(2.0, Matrix::Identity(3, 3), rng), Error);
}

TEST_CASE("inverse-Wishart(6, 1) has mean 1 / (df - 2)") {
  RngStream rng(8);
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) sum += sample_inverse_wishart(6.0, Matrix::Identity(1, 1), rng)(0, 0);
  CHECK(std::abs(sum / draws / 0.25 - 1.0) < 0.05);
}

TEST_CASE("inverse-Wishart(5, diag(2,4)) has E[Sigma^{-1}] = diag(2.5, 1.25)") {
  RngStream rng(9);
  Matrix S = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  MatrixMoments mom(2);
  for (int t = 0; t < draws; ++t) mom.add(sample_inverse_wishart(5.0, S, rng).inverse());
  Matrix target = Eigen::Vector2d(2.5, 1.25).asDiagonal();
  CHECK(std::abs(mom.mean()(0, 0) / 2.5 - 1.0) < 0.05);
  CHECK(std::abs(mom.mean()(1, 1) / 1.25 - 1.0) < 0.05);
  CHECK(std::abs(mom.mean()(0, 1)) < 0.05 * 1.25);
}

TEST_CASE("inverse-Wishart draws invert to mean df S^{-1} within 5 standard errors, d <= 3") {
  RngStream rng(10);
  for (Eigen::Index d = 1; d <= 3; ++d) {
    const Matrix S = test::spd(d, rng);
    const double df = static_cast<double>(d) + 2.5;
    MatrixMoments mom(d);
    for (int t = 0; t < draws; ++t) mom.add(sample_inverse_wishart(df, S, rng).inverse());
    const Matrix z = (mom.mean() - df * S.inverse()).cwiseQuotient(mom.se());
    CHECK(z.cwiseAbs().maxCoeff() < 5.0);
  }
}

TEST_CASE("Bartlett and outer-product Wishart samplers agree in first and second moments") {
  RngStream rng(12);
  Matrix S(2, 2);
  S << 1.5, 0.4, 0.4, 0.8;
  const CholeskyFactor chol(S);
  MatrixMoments bartlett(2), naive(2), bartlett_sq(2), naive_sq(2);
  for (int t = 0; t < draws; ++t) {
    const Matrix W = sample_wishart(5.0, chol, rng);
    Matrix N = Matrix::Zero(2, 2);
    for (int k = 0; k < 5; ++k) {
      const Vector x = sample_mvn(Vector::Zero(2), chol, rng);
      N += x * x.transpose();
    }
    bartlett.add(W);
    naive.add(N);
    bartlett_sq.add(W.cwiseProduct(W));
    naive_sq.add(N.cwiseProduct(N));
  }
  auto z = [](const MatrixMoments& a, const MatrixMoments& b) {
    const Matrix se = (a.se().cwiseProduct(a.se()) + b.se().cwiseProduct(b.se())).cwiseSqrt();
    return (a.mean() - b.mean()).cwiseQuotient(se).cwiseAbs().maxCoeff();
  };
  CHECK(z(bartlett, naive) < 5.0);
  CHECK(z(bartlett_sq, naive_sq) < 5.0);
}

TEST_CASE("a scalar inverse-Wishart with df = 2a and scale = 2b is inverse-gamma(a, b)") {
  const double a = 2.5, b = 1.7;
  double first = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double x = 0.1 + 0.4 * k;
    const double iw = logpdf_inv_wishart(Matrix::Constant(1, 1, x), 2.0 * a, Matrix::Constant(1, 1, 2.0 * b));
    const double ig = inverse_gamma_logpdf(x, a, b);
    if (k == 0) first = iw - ig;
    CHECK(iw == doctest::Approx(ig).epsilon(1e-10));
  }
  CHECK(std::abs(first) < 1e-10);
}

TEST_CASE("the inverse-gamma(1e-3, 1e-3) variance prior is W^{-1}(2e-3, 2e-3)") {
  for (double x : {0.01, 0.1, 1.0, 10.0}) {
    const double iw = logpdf_inv_wishart(Matrix::Constant(1, 1, x), 2e-3, Matrix::Constant(1, 1, 2e-3));
    CHECK(iw == doctest::Approx(inverse_gamma_logpdf(x, 1e-3, 1e-3)).epsilon(1e-10));
  }
}

TEST_CASE("logpdf_mvn at the mode and under translation") {
  CHECK(logpdf_mvn(Vector::Zero(1), Vector::Zero(1), Matrix::Identity(1, 1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)));
  CHECK(logpdf_mvn(Vector::Zero(1), Vector::Zero(1), Matrix::Identity(1, 1)) == doctest::Approx(-0.9189).epsilon(1e-4));
  RngStream rng(13);
  const Matrix C = test::spd(3, rng);
  const Vector x = test::gaussian(3, 1, rng), m = test::gaussian(3, 1, rng), delta = test::gaussian(3, 1, rng);
  CHECK(logpdf_mvn(x, m, C) == doctest::Approx(logpdf_mvn(x + delta, m + delta, C)).epsilon(1e-12));
  const Matrix C2 = 2.0 * C;
  CHECK(logpdf_mvn(m, m, C2) == doctest::Approx(-0.5 * std::log((2.0 * M_PI * C2).determinant())));
}

TEST_CASE("streams are reproducible and distinct stream ids differ") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  const Matrix S = Matrix::Identity(3, 3);
  const Matrix wa = sample_inverse_wishart(5.0, S, a);
  const Matrix wb = sample_inverse_wishart(5.0, S, b);
  const Matrix wc = sample_inverse_wishart(5.0, S, c);
  CHECK((wa - wb).norm() == 0.0);
  CHECK((wa - wc).norm() > 0.0);
  CHECK(stream_id(1, 2) != stream_id(2, 1));
}

TEST_CASE("multivariate t draws have covariance df / (df - 2) times the scale") {
  RngStream rng(14);
  const double df = 10.0;
  const CholeskyFactor chol(0.2 * Matrix::Identity(2, 2));
  MatrixMoments mom(2);
  for (int t = 0; t < draws; ++t) {
    const Vector x = sample_mvt(df, Vector::Zero(2), chol, rng);
    mom.add(x * x.transpose());
  }
  const Matrix target = df / (df - 2.0) * 0.2 * Matrix::Identity(2, 2);
  CHECK(std::abs(mom.mean()(0, 0) - target(0, 0)) < 5.0 * mom.se()(0, 0));
  CHECK(std::abs(mom.mean()(1, 1) - target(1, 1)) < 5.0 * mom.se()(1, 1));
}
