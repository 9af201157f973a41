#pragma once

#include <string>
#include <string_view>

#include "eiv/model.hpp"
#include "eiv/rng.hpp"

namespace eiv {

/// Synthetic Berkson-x data sets with n = 50 and an intercept-only Z:
///
///   Sigma ~ W^{-1}(m, 1e-3 I),  (theta, beta) ~ N(0, 1e3 I),  A_i ~ N(0, I),
///   X_i | A_i ~ N(A_i, 0.2 I)        (scaling)
///   X_i | A_i ~ t(df, A_i, 0.2 I)    (misspec, m = p = 3)
///   Y_i ~ N(Theta^T 1 + B^T A_i, Sigma).
///
/// The returned config carries the same priors (a0 = m, B0 = 1e-3 I,
/// j0 = 0, J0 = 1e3 I) and the Gaussian error model V_i = 0.2 I.
struct Scenario {
  enum class Kind { scaling, misspec };

  Kind kind = Kind::scaling;
  Eigen::Index m = 1;
  Eigen::Index p = 1;
  double df = 0.0;
  Eigen::Index n = 50;

  static Scenario scaling(Eigen::Index m, Eigen::Index p);
  static Scenario misspec(double df);
  /// "scaling:M,P" or "misspec:DF".
  static Scenario parse(std::string_view text);
  std::string name() const;
};

struct GroundTruth {
  Matrix Theta;  // q x m
  Matrix B;      // p x m
  Matrix Sigma;  // m x m
  Matrix A;      // n x p
};

struct SimulatedDataset {
  ModelConfig config;
  GroundTruth truth;
};

SimulatedDataset simulate_dataset(const Scenario& scenario, RngStream& rng);

}  // namespace eiv
