#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "covreg/symmat.hpp"

namespace covreg {

/// N labeled covariance matrices sharing dimension P, each of numerical rank
/// at most nominal_rank.
struct CovarianceBundle {
  std::vector<SymMatd> matrices;
  Eigen::VectorXd labels;
  int nominal_rank = 0;
  std::string provenance;

  [[nodiscard]] std::size_t size() const noexcept { return matrices.size(); }
  [[nodiscard]] Eigen::Index dim() const { return matrices.empty() ? 0 : matrices.front().dim(); }
  [[nodiscard]] std::span<const SymMatd> view() const noexcept { return matrices; }

  /// Shape checks: consistent dims, one finite label per matrix, rank in [1, P].
  void validate() const;

  /// Samples at the given positions, in the given order.
  [[nodiscard]] CovarianceBundle subset(std::span<const int> indices) const;

  [[nodiscard]] SymMatd arithmetic_mean() const;
};

}  // namespace covreg
