#include "eiv/layout.hpp"

namespace eiv {

CoefficientLayout::CoefficientLayout(std::vector<Eigen::Index> block_rows, Eigen::Index m)
    : block_rows_(std::move(block_rows)), m_(m), rows_(0) {
  require(m_ >= 1, "CoefficientLayout: m must be positive");
  for (auto r : block_rows_) {
    require(r >= 1, "CoefficientLayout: every block needs at least one row");
    block_offset_.push_back(rows_);
    rows_ += r;
  }
}

Eigen::Index CoefficientLayout::canonical_index(std::size_t block, Eigen::Index row, Eigen::Index col) const {
  require(block < block_rows_.size() && row < block_rows_[block] && col < m_,
          "CoefficientLayout: index out of range");
  return col * rows_ + block_offset_[block] + row;
}

Eigen::Index CoefficientLayout::grouped_index(std::size_t block, Eigen::Index row, Eigen::Index col) const {
  require(block < block_rows_.size() && row < block_rows_[block] && col < m_,
          "CoefficientLayout: index out of range");
  return block_offset_[block] * m_ + col * block_rows_[block] + row;
}

std::vector<Eigen::Index> CoefficientLayout::grouped_to_canonical() const {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(size()));
  for (std::size_t b = 0; b < block_rows_.size(); ++b) {
    for (Eigen::Index k = 0; k < m_; ++k) {
      for (Eigen::Index r = 0; r < block_rows_[b]; ++r) {
        perm[static_cast<std::size_t>(grouped_index(b, r, k))] = canonical_index(b, r, k);
      }
    }
  }
  return perm;
}

Vector CoefficientLayout::to_canonical(const Vector& grouped) const {
  require(grouped.size() == size(), "CoefficientLayout::to_canonical: wrong length");
  const auto perm = grouped_to_canonical();
  Vector out(size());
  for (Eigen::Index g = 0; g < size(); ++g) out(perm[static_cast<std::size_t>(g)]) = grouped(g);
  return out;
}

Matrix CoefficientLayout::to_canonical(const Matrix& grouped_cov) const {
  require(grouped_cov.rows() == size() && grouped_cov.cols() == size(),
          "CoefficientLayout::to_canonical: wrong matrix size");
  const auto perm = grouped_to_canonical();
  Matrix out(size(), size());
  for (Eigen::Index j = 0; j < size(); ++j) {
    for (Eigen::Index i = 0; i < size(); ++i) {
      out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = grouped_cov(i, j);
    }
  }
  return out;
}

Vector CoefficientLayout::to_grouped(const Vector& canonical) const {
  require(canonical.size() == size(), "CoefficientLayout::to_grouped: wrong length");
  const auto perm = grouped_to_canonical();
  Vector out(size());
  for (Eigen::Index g = 0; g < size(); ++g) out(g) = canonical(perm[static_cast<std::size_t>(g)]);
  return out;
}

Matrix CoefficientLayout::to_grouped(const Matrix& canonical_cov) const {
  require(canonical_cov.rows() == size() && canonical_cov.cols() == size(),
          "CoefficientLayout::to_grouped: wrong matrix size");
  const auto perm = grouped_to_canonical();
  Matrix out(size(), size());
  for (Eigen::Index j = 0; j < size(); ++j) {
    for (Eigen::Index i = 0; i < size(); ++i) {
      out(i, j) = canonical_cov(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<std::string> CoefficientLayout::labels(const std::vector<std::string>& block_names,
                                                   const std::string& prefix) const {
  require(block_names.size() == block_rows_.size(), "CoefficientLayout::labels: one name per block");
  std::vector<std::string> out(static_cast<std::size_t>(size()));
  for (std::size_t b = 0; b < block_rows_.size(); ++b) {
    for (Eigen::Index k = 0; k < m_; ++k) {
      for (Eigen::Index r = 0; r < block_rows_[b]; ++r) {
        out[static_cast<std::size_t>(canonical_index(b, r, k))] =
            prefix + "." + block_names[b] + "." + std::to_string(r + 1) + "." + std::to_string(k + 1);
      }
    }
  }
  return out;
}

}  // namespace eiv
