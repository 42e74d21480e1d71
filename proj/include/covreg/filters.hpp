#pragma once

// Spatial filters W in R^{P x R}: covariances are reduced as W^T C W.

#include <Eigen/Dense>

#include <string>

#include "covreg/bundle.hpp"

namespace covreg {

enum class FilterKind { Identity, Unsupervised, Supervised, MNE };

[[nodiscard]] const char* to_string(FilterKind kind) noexcept;
[[nodiscard]] FilterKind parse_filter_kind(const std::string& name);

struct SpatialFilter {
  Eigen::MatrixXd w;
  FilterKind kind = FilterKind::Identity;
  /// Eigenvalues behind the column selection (PCA / generalized eigenvalues),
  /// empty for Identity and MNE.
  Eigen::VectorXd eigenvalues;
  /// Tikhonov parameter, MNE only.
  double mne_lambda = 0.0;

  [[nodiscard]] Eigen::Index rank_out() const noexcept { return w.cols(); }
  [[nodiscard]] Eigen::Index dim_in() const noexcept { return w.rows(); }
};

/// Sensors x candidate sources forward matrix.
struct Leadfield {
  Eigen::MatrixXd g;

  void validate() const;
};

[[nodiscard]] SpatialFilter identity_filter(Eigen::Index p);

/// PCA of the average covariance: top-r eigenvectors of (1/N) sum_i C_i.
/// Blind to the labels.
[[nodiscard]] SpatialFilter fit_unsupervised(const CovarianceBundle& bundle, int r);

/// SPoC: generalized eigenvectors of (C_y, C_bar), C_y = (1/N) sum_i y_i C_i
/// with y standardized to zero mean and unit population variance. Columns are
/// sorted by decreasing generalized eigenvalue and scaled so w^T C_bar w = 1.
/// C_bar must be full rank; reduce with fit_unsupervised first otherwise.
[[nodiscard]] SpatialFilter fit_supervised(const CovarianceBundle& bundle, int r);

/// Minimum-norm (Tikhonov) inverse operator G^T (G G^T + lambda I)^{-1}, stored
/// transposed as a P x Q filter.
[[nodiscard]] SpatialFilter fit_mne(const Leadfield& lead, double lambda);

/// C_i -> W^T C_i W; labels and nominal rank (capped at R) carried over.
[[nodiscard]] CovarianceBundle apply(const SpatialFilter& filter, const CovarianceBundle& bundle);

}  // namespace covreg
