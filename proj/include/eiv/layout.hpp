#pragma once

#include <string>
#include <vector>

#include "eiv/linalg.hpp"

namespace eiv {

/// Position bookkeeping for the regression coefficients.
///
/// The coefficient matrix W stacks row blocks (Theta over B, or V over Theta
/// over B for response-error models) into a (rows x m) matrix. The sampler
/// stores gamma = vec(W), column-stacked, which is the ordering the
/// Kronecker-form update Sigma^{-1} (x) G^T G acts on. Priors are usually
/// written in grouped order instead: (vec(block 0), vec(block 1), ...). For
/// m > 1 the two orderings differ, so conversions go through this type.
class CoefficientLayout {
 public:
  CoefficientLayout(std::vector<Eigen::Index> block_rows, Eigen::Index m);

  Eigen::Index m() const noexcept { return m_; }
  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index size() const noexcept { return rows_ * m_; }
  const std::vector<Eigen::Index>& block_rows() const noexcept { return block_rows_; }

  Eigen::Index canonical_index(std::size_t block, Eigen::Index row, Eigen::Index col) const;
  Eigen::Index grouped_index(std::size_t block, Eigen::Index row, Eigen::Index col) const;

  /// perm[g] = canonical position of grouped coordinate g.
  std::vector<Eigen::Index> grouped_to_canonical() const;

  Vector to_canonical(const Vector& grouped) const;
  Matrix to_canonical(const Matrix& grouped_cov) const;
  Vector to_grouped(const Vector& canonical) const;
  Matrix to_grouped(const Matrix& canonical_cov) const;

  /// Labels "<prefix>.<block name>.<row>.<col>" (1-based) in canonical order.
  std::vector<std::string> labels(const std::vector<std::string>& block_names,
                                  const std::string& prefix = "gamma") const;

 private:
  std::vector<Eigen::Index> block_rows_;
  std::vector<Eigen::Index> block_offset_;
  Eigen::Index m_;
  Eigen::Index rows_;
};

}  // namespace eiv
