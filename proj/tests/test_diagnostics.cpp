#include "helpers.hpp"

#include "eiv/diagnostics.hpp"
#include "eiv/error.hpp"

using namespace eiv;

namespace {

Matrix iid_chain(Eigen::Index T, Eigen::Index d, RngStream& rng) { return test::gaussian(T, d, rng); }

/// Independent AR(1) coordinates x_t = phi x_{t-1} + e_t with unit innovations,
/// started from stationarity.
Matrix ar1_chain(Eigen::Index T, Eigen::Index d, double phi, RngStream& rng) {
  Matrix out(T, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double x = rng.normal() / std::sqrt(1.0 - phi * phi);
    for (Eigen::Index t = 0; t < T; ++t) {
      x = phi * x + rng.normal();
      out(t, j) = x;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("a constant chain has zero batch-means covariance") {
  const Matrix c = Matrix::Constant(400, 2, 3.5);
  const auto bm = batch_means(c);
  CHECK(bm.batch_size == 20);
  CHECK(bm.batches == 20);
  CHECK(bm.cov.norm() == 0.0);
}

TEST_CASE("batch means of an iid chain estimate the identity") {
  RngStream rng(1);
  const Matrix bm = batch_means_cov(iid_chain(100000, 2, rng));
  CHECK(std::abs(bm(0, 0) - 1.0) < 0.1);
  CHECK(std::abs(bm(1, 1) - 1.0) < 0.1);
  CHECK(std::abs(bm(0, 1)) < 0.1);
}

TEST_CASE("batch means match the AR(1) long-run variance 1 / (1 - phi)^2") {
  RngStream rng(2);
  const double phi = 0.9;
  const double long_run = 1.0 / ((1.0 - phi) * (1.0 - phi));
  const double marginal = 1.0 / (1.0 - phi * phi);
  CHECK(long_run / marginal == doctest::Approx(19.0));
  const Matrix chain = ar1_chain(1000000, 1, phi, rng);
  CHECK(std::abs(batch_means_cov(chain)(0, 0) / long_run - 1.0) < 0.15);
  CHECK(std::abs(mess(chain) / (1e6 / 19.0) - 1.0) < 0.15);
}

TEST_CASE("mESS of an iid chain is close to T") {
  RngStream rng(3);
  const Matrix chain = iid_chain(100000, 3, rng);
  const double ratio = mess(chain) / 1e5;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("mESS reduces to T Lambda / sigma_bm for one coordinate") {
  RngStream rng(4);
  const Matrix chain = ar1_chain(10000, 1, 0.5, rng);
  const double expected = 10000.0 * sample_covariance(chain)(0, 0) / batch_means_cov(chain)(0, 0);
  CHECK(mess(chain) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("mESS and autocorrelations are invariant under affine maps") {
  RngStream rng(5);
  const Matrix chain = ar1_chain(20000, 3, 0.6, rng);
  Matrix A = test::gaussian(3, 3, rng) + 3.0 * Matrix::Identity(3, 3);
  const Vector b = test::gaussian(3, 1, rng);
  const Matrix mapped = (chain * A.transpose()).rowwise() + b.transpose();
  CHECK(mess(mapped) == doctest::Approx(mess(chain)).epsilon(1e-8));
  // The batch-means estimator is affine equivariant.
  const Matrix expected = A * batch_means_cov(chain) * A.transpose();
  CHECK(test::rel_frobenius(batch_means_cov(mapped), expected) < 1e-10);

  const Matrix scaled = (3.0 * chain).array() + 7.0;
  CHECK(test::rel_frobenius(autocorrelation(scaled, 10), autocorrelation(chain, 10)) < 1e-10);
}

TEST_CASE("autocorrelation of white noise and of AR(1) with phi = 0.5") {
  RngStream rng(6);
  const Matrix noise = iid_chain(100000, 1, rng);
  const Matrix acf = autocorrelation(noise, 20);
  CHECK(acf.cols() == 21);
  CHECK(acf(0, 0) == doctest::Approx(1.0));
  for (Eigen::Index l = 1; l <= 20; ++l) CHECK(std::abs(acf(0, l)) < 4.0 / std::sqrt(1e5));

  const Matrix ar = autocorrelation(ar1_chain(100000, 1, 0.5, rng), 3);
  CHECK(std::abs(ar(0, 1) - 0.5) < 0.02);
  CHECK(std::abs(ar(0, 2) - 0.25) < 0.02);
}

TEST_CASE("SE eigenvalues are the square roots of the covariance eigenvalues") {
  const Matrix S = Eigen::Vector2d(4.0, 0.25).asDiagonal();
  const auto [lo, hi] = se_eigen_extremes(S);
  CHECK(lo == doctest::Approx(0.5));
  CHECK(hi == doctest::Approx(2.0));
}

TEST_CASE("estimators are symmetric positive semidefinite") {
  RngStream rng(7);
  for (int t = 0; t < 10; ++t) {
    const Matrix chain = ar1_chain(2000, 4, 0.3, rng);
    for (const Matrix& S : {batch_means_cov(chain), sample_covariance(chain)}) {
      CHECK(S.isApprox(S.transpose()));
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues().minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("a duplicated coordinate makes mESS rank deficient with the coordinates named") {
  RngStream rng(8);
  Matrix chain = iid_chain(5000, 3, rng);
  chain.col(2) = chain.col(0);
  try {
    mess(chain);
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rank_deficient);
  }
  const auto report = diagnose(chain, {"a", "b", "c"});
  CHECK(std::isnan(report.mess));
  CHECK(!report.mess_error.empty());
}

TEST_CASE("diagnose reports per-coordinate MCSE, ESS and zero-variance coordinates") {
  RngStream rng(9);
  Matrix chain = iid_chain(10000, 2, rng);
  chain.col(1).setConstant(2.0);
  const auto report = diagnose(chain, {"x", "flat"}, 5);
  CHECK(report.T == 10000);
  CHECK(report.acf.cols() == 6);
  CHECK(std::isnan(report.acf(1, 1)));
  REQUIRE(report.zero_variance.size() == 1);
  CHECK(report.zero_variance[0] == "flat");
  CHECK(report.mcse(0) == doctest::Approx(std::sqrt(report.bm_cov(0, 0) / 1e4)));
  CHECK(report.ess(0) == doctest::Approx(1e4 * report.sample_cov(0, 0) / report.bm_cov(0, 0)));
  CHECK(std::isnan(report.mess));
}
