#include "covreg/regress.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "covreg/errors.hpp"
#include "covreg/rng.hpp"

namespace covreg {

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorKind::InvalidArgument, "log_grid needs count >= 1 and 0 < lo <= hi");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) grid[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (count - 1));
  return grid;
}

std::vector<double> default_ridge_grid() { return log_grid(1e-5, 1e3, 100); }

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale = ((x.rowwise() - s.mean.transpose()).colwise().squaredNorm() / n).cwiseSqrt().transpose();
  const double top = s.scale.size() > 0 ? s.scale.maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale(j) > 1e-10 * top)) s.scale(j) = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(mean.size()) + " features, got " +
                                                  std::to_string(x.cols()));
  }
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "ridge grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k])) {
      throw Error(ErrorKind::InvalidArgument, "ridge grid values must be positive and finite");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "ridge grid must be strictly increasing");
    }
  }
}

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

ThinSvd thin_svd(const Eigen::MatrixXd& x) {
  const SvdResult<double> svd = svd_rect(x);
  return {svd.u, svd.sigma, svd.v};
}

Eigen::VectorXd gcv_from_svd(const ThinSvd& svd, const Eigen::VectorXd& y, std::span<const double> grid) {
  const auto n = static_cast<double>(y.size());
  const Eigen::VectorXd uty = svd.u.transpose() * y;
  const Eigen::ArrayXd s2 = svd.s.array().square();
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Eigen::ArrayXd shrink = s2 / (s2 + grid[k]);
    const Eigen::VectorXd residual = y - svd.u * (shrink * uty.array()).matrix();
    const double trace = n - shrink.sum();
    out(static_cast<Eigen::Index>(k)) = n * residual.squaredNorm() / (trace * trace);
  }
  return out;
}

}  // namespace

Eigen::VectorXd gcv_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> grid) {
  check_grid(grid);
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "gcv_scores: rows of X != length of y");
  return gcv_from_svd(thin_svd(x), y, grid);
}

RidgeModel fit_ridge_gcv(const Eigen::MatrixXd& features, const Eigen::VectorXd& y, std::span<const double> grid) {
  check_grid(grid);
  if (features.rows() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "fit_ridge_gcv: " + std::to_string(features.rows()) +
                                                  " feature rows but " + std::to_string(y.size()) + " targets");
  }
  if (features.rows() < 3) throw Error(ErrorKind::InvalidArgument, "fit_ridge_gcv needs at least 3 samples");
  if (features.cols() < 1) throw Error(ErrorKind::InvalidArgument, "fit_ridge_gcv needs at least 1 feature");
  if (!features.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "fit_ridge_gcv: non-finite features or targets");
  }

  RidgeModel model;
  const Standardizer standardizer = Standardizer::fit(features);
  if ((features.rowwise() - standardizer.mean.transpose()).cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::DegenerateDesign, "every feature is constant");
  }
  model.feature_mean = standardizer.mean;
  model.feature_scale = standardizer.scale;
  model.intercept = y.mean();

  const Eigen::MatrixXd x = standardizer.transform(features);
  const Eigen::VectorXd centered = y.array() - model.intercept;
  const ThinSvd svd = thin_svd(x);
  model.gcv = gcv_from_svd(svd, centered, grid);

  // ties go to the larger lambda
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < model.gcv.size(); ++k) {
    if (model.gcv(k) <= model.gcv(best)) best = k;
  }
  model.lambda_star = grid[static_cast<std::size_t>(best)];
  const Eigen::ArrayXd s = svd.s.array();
  const Eigen::VectorXd coef = (s / (s.square() + model.lambda_star)) * (svd.u.transpose() * centered).array();
  model.beta = svd.v * coef;
  return model;
}

Eigen::VectorXd predict(const RidgeModel& model, const Eigen::MatrixXd& features) {
  const Standardizer standardizer{model.feature_mean, model.feature_scale};
  return (standardizer.transform(features) * model.beta).array() + model.intercept;
}

// ---------------------------------------------------------------------------

std::string PipelineSpec::name() const {
  std::string out = to_string(filter_kind);
  if ((filter_kind == FilterKind::Unsupervised || filter_kind == FilterKind::Supervised) && filter_rank > 0) {
    out += "(" + std::to_string(filter_rank) + ")";
  }
  return out + "+" + to_string(embedding);
}

void PipelineSpec::validate() const {
  check_grid(ridge_grid);
  if (filter_rank < 0) throw Error(ErrorKind::InvalidArgument, "filter rank must be >= 0");
  if (filter_kind == FilterKind::MNE) {
    if (!leadfield) throw Error(ErrorKind::InvalidArgument, "the mne filter needs a leadfield");
    leadfield->validate();
    if (!(mne_lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "mne lambda must be positive");
  }
}

namespace {

SpatialFilter compose(const SpatialFilter& outer, const SpatialFilter& inner) {
  SpatialFilter f = inner;
  f.w = outer.w * inner.w;
  return f;
}

SpatialFilter fit_filter(const CovarianceBundle& train, const PipelineSpec& spec) {
  const auto p = static_cast<int>(train.dim());
  const int rank = spec.filter_rank > 0 ? spec.filter_rank : train.nominal_rank;
  switch (spec.filter_kind) {
    case FilterKind::Identity: return identity_filter(p);
    case FilterKind::Unsupervised: return fit_unsupervised(train, rank);
    case FilterKind::Supervised: {
      const int mean_rank = numerical_rank(train.arithmetic_mean());
      if (mean_rank == p) return fit_supervised(train, rank);
      // Reduce to the span of the average covariance, then fit SPoC there.
      const SpatialFilter pca = fit_unsupervised(train, mean_rank);
      const SpatialFilter spoc = fit_supervised(apply(pca, train), std::min(rank, mean_rank));
      return compose(pca, spoc);
    }
    case FilterKind::MNE: return fit_mne(*spec.leadfield, spec.mne_lambda);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown filter kind");
}

int embedding_rank(const CovarianceBundle& filtered) {
  return std::min(static_cast<int>(filtered.dim()), filtered.nominal_rank);
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

template <typename Derived>
void hash_matrix(std::uint64_t& h, const Eigen::DenseBase<Derived>& m) {
  const Eigen::Index dims[2] = {m.rows(), m.cols()};
  hash_bytes(h, dims, sizeof(dims));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      hash_bytes(h, &v, sizeof(v));
    }
}

}  // namespace

Eigen::MatrixXd FittedPipeline::features(const CovarianceBundle& bundle) const {
  return embedding.transform(apply(filter, bundle).view());
}

Eigen::VectorXd FittedPipeline::predict(const CovarianceBundle& bundle) const {
  return covreg::predict(ridge, features(bundle));
}

std::uint64_t FittedPipeline::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_matrix(h, filter.w);
  const int tags[3] = {static_cast<int>(filter.kind), static_cast<int>(embedding.kind()), embedding.rank()};
  hash_bytes(h, tags, sizeof(tags));
  if (embedding.reference()) hash_matrix(h, embedding.reference()->matrix());
  hash_matrix(h, ridge.beta);
  hash_matrix(h, ridge.feature_mean);
  hash_matrix(h, ridge.feature_scale);
  const double scalars[2] = {ridge.intercept, ridge.lambda_star};
  hash_bytes(h, scalars, sizeof(scalars));
  return h;
}

FittedPipeline fit_pipeline(const CovarianceBundle& train, const PipelineSpec& spec) {
  spec.validate();
  train.validate();
  SpatialFilter filter = fit_filter(train, spec);
  const CovarianceBundle filtered = apply(filter, train);
  auto embedding = TangentEmbedding<double>::fit(spec.embedding, filtered.view(), embedding_rank(filtered));
  const Eigen::MatrixXd x = embedding.transform(filtered.view());
  RidgeModel ridge = fit_ridge_gcv(x, train.labels, spec.ridge_grid);
  return {std::move(filter), std::move(embedding), std::move(ridge)};
}

std::vector<std::vector<int>> fold_indices(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 folds");
  if (n < static_cast<std::size_t>(folds)) {
    throw Error(ErrorKind::InvalidArgument,
                "cannot split " + std::to_string(n) + " samples into " + std::to_string(folds) + " folds");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t base = n / static_cast<std::size_t>(folds);
  const std::size_t extra = n % static_cast<std::size_t>(folds);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  std::size_t pos = 0;
  for (std::size_t f = 0; f < out.size(); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return out;
}

CVReport run_pipeline_cv(const CovarianceBundle& bundle, const PipelineSpec& spec, int folds, std::uint64_t seed) {
  bundle.validate();
  spec.validate();
  const auto split = fold_indices(bundle.size(), folds, seed);

  CVReport report;
  report.seed = seed;
  report.ridge_grid = spec.ridge_grid;
  std::vector<char> held_out(bundle.size());
  for (std::size_t f = 0; f < split.size(); ++f) {
    std::fill(held_out.begin(), held_out.end(), 0);
    for (int i : split[f]) held_out[static_cast<std::size_t>(i)] = 1;
    std::vector<int> train_idx;
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      if (!held_out[i]) train_idx.push_back(static_cast<int>(i));
    }
    try {
      const FittedPipeline fitted = fit_pipeline(bundle.subset(train_idx), spec);
      const CovarianceBundle test = bundle.subset(split[f]);
      const Eigen::VectorXd predicted = fitted.predict(test);
      report.per_fold_mae.push_back((predicted - test.labels).cwiseAbs().mean());
      report.per_fold_lambda.push_back(fitted.ridge.lambda_star);
      report.per_fold_digest.push_back(fitted.digest());
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.detail());
    }
  }
  double total = 0.0;
  for (double m : report.per_fold_mae) total += m;
  report.mean_mae = total / static_cast<double>(report.per_fold_mae.size());
  return report;
}

}  // namespace covreg
