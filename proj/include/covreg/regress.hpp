#pragma once

// Tangent-space ridge regression: feature standardization, ridge with the
// regularization picked by generalized cross-validation, and K-fold
// evaluation of complete filter -> embedding -> ridge pipelines.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covreg/bundle.hpp"
#include "covreg/filters.hpp"
#include "covreg/manifold.hpp"

namespace covreg {

/// 100 log-spaced values in [1e-5, 1e3].
[[nodiscard]] std::vector<double> default_ridge_grid();

/// `count` log-spaced values in [lo, hi].
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, int count);

struct RidgeModel {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  double lambda_star = 0.0;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  /// GCV criterion at every grid point, same order as the grid.
  Eigen::VectorXd gcv;
};

/// Column means and population standard deviations; columns whose deviation is
/// zero (at most 1e-10 of the largest column deviation) get scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  [[nodiscard]] static Standardizer fit(const Eigen::MatrixXd& x);
  [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

/// GCV(lambda) = N ||(I - H) y||^2 / Tr(I - H)^2 for every lambda in the grid,
/// with H = X (X^T X + lambda I)^{-1} X^T evaluated through one thin SVD of X.
/// X and y are used as given (already standardized / centered).
[[nodiscard]] Eigen::VectorXd gcv_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         std::span<const double> grid);

[[nodiscard]] RidgeModel fit_ridge_gcv(const Eigen::MatrixXd& features, const Eigen::VectorXd& y,
                                       std::span<const double> grid);

[[nodiscard]] Eigen::VectorXd predict(const RidgeModel& model, const Eigen::MatrixXd& features);

struct PipelineSpec {
  FilterKind filter_kind = FilterKind::Identity;
  /// Output rank of Unsupervised/Supervised filters; 0 means the bundle's
  /// nominal rank.
  int filter_rank = 0;
  EmbeddingKind embedding = EmbeddingKind::GeometricTangent;
  std::vector<double> ridge_grid = default_ridge_grid();
  std::optional<Leadfield> leadfield;
  double mne_lambda = 1.0;

  /// "<filter>+<embedding>".
  [[nodiscard]] std::string name() const;
  void validate() const;
};

/// A pipeline fitted on one training set.
struct FittedPipeline {
  SpatialFilter filter;
  TangentEmbedding<double> embedding;
  RidgeModel ridge;

  [[nodiscard]] Eigen::MatrixXd features(const CovarianceBundle& bundle) const;
  [[nodiscard]] Eigen::VectorXd predict(const CovarianceBundle& bundle) const;
  /// FNV-1a over every fitted parameter; identical iff the fitted state is.
  [[nodiscard]] std::uint64_t digest() const;
};

/// Filter fit, mean/reference computation and ridge, all on `train` only.
[[nodiscard]] FittedPipeline fit_pipeline(const CovarianceBundle& train, const PipelineSpec& spec);

/// Held-out indices for each fold: a seeded shuffle cut into contiguous
/// blocks, the first N % folds blocks one sample larger.
[[nodiscard]] std::vector<std::vector<int>> fold_indices(std::size_t n, int folds, std::uint64_t seed);

struct CVReport {
  std::vector<double> per_fold_mae;
  std::vector<double> per_fold_lambda;
  std::vector<std::uint64_t> per_fold_digest;
  double mean_mae = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> ridge_grid;
};

[[nodiscard]] CVReport run_pipeline_cv(const CovarianceBundle& bundle, const PipelineSpec& spec, int folds,
                                       std::uint64_t seed);

}  // namespace covreg
