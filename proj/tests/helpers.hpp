#pragma once

#include <doctest.h>

#include <cmath>

#include "eiv/linalg.hpp"
#include "eiv/rng.hpp"

namespace eiv::test {

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline Matrix spd(Eigen::Index d, RngStream& rng) {
  Matrix G(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) G(i, j) = rng.normal();
  }
  return G * G.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
}

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  }
  return out;
}

}  // namespace eiv::test
