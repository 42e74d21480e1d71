#include "covreg/filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covreg/errors.hpp"
#include "covreg/symmat.hpp"

namespace covreg {

const char* to_string(FilterKind kind) noexcept {
  switch (kind) {
    case FilterKind::Identity: return "identity";
    case FilterKind::Unsupervised: return "unsupervised";
    case FilterKind::Supervised: return "supervised";
    case FilterKind::MNE: return "mne";
  }
  return "unknown";
}

FilterKind parse_filter_kind(const std::string& name) {
  for (auto kind : {FilterKind::Identity, FilterKind::Unsupervised, FilterKind::Supervised, FilterKind::MNE}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument,
              "unknown filter '" + name + "' (expected identity|unsupervised|supervised|mne)");
}

void Leadfield::validate() const {
  if (g.rows() < 1 || g.cols() < 1) throw Error(ErrorKind::InvalidArgument, "leadfield must be at least 1x1");
  if (!g.allFinite()) throw Error(ErrorKind::InvalidArgument, "leadfield has non-finite entries");
}

SpatialFilter identity_filter(Eigen::Index p) {
  SpatialFilter f;
  f.w = Eigen::MatrixXd::Identity(p, p);
  f.kind = FilterKind::Identity;
  return f;
}

namespace {

void check_rank_arg(int r, Eigen::Index p, const char* where) {
  if (r < 1 || r > p) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(where) + ": rank " + std::to_string(r) + " outside [1, " + std::to_string(p) + "]");
  }
}

}  // namespace

SpatialFilter fit_unsupervised(const CovarianceBundle& bundle, int r) {
  bundle.validate();
  check_rank_arg(r, bundle.dim(), "fit_unsupervised");
  const SymMatd mean = bundle.arithmetic_mean();
  const EigenPairs<double> eig = eigh_psd(mean);
  const int rank = static_cast<int>((eig.values.array() > rank_tol_v<double> * eig.values(0)).count());
  if (r > rank) {
    throw Error(ErrorKind::RankTooLarge, "fit_unsupervised: requested " + std::to_string(r) +
                                             " components but the average covariance has rank " +
                                             std::to_string(rank));
  }
  SpatialFilter f;
  f.w = eig.vectors.leftCols(r);
  f.kind = FilterKind::Unsupervised;
  f.eigenvalues = eig.values.head(r);
  return f;
}

SpatialFilter fit_supervised(const CovarianceBundle& bundle, int r) {
  bundle.validate();
  check_rank_arg(r, bundle.dim(), "fit_supervised");
  const auto n = static_cast<double>(bundle.size());
  const SymMatd mean = bundle.arithmetic_mean();

  Eigen::VectorXd y = bundle.labels.array() - bundle.labels.mean();
  const double sd = std::sqrt(y.squaredNorm() / n);
  if (sd > 0.0) y /= sd;

  Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(bundle.dim(), bundle.dim());
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    weighted += y(static_cast<Eigen::Index>(i)) * bundle.matrices[i].matrix();
  }
  const SymMatd target_cov(weighted / n);

  EigenPairs<double> mean_eig = [&] {
    try {
      return eigh_pd(mean);
    } catch (const Error& e) {
      throw Error(ErrorKind::SingularMatrix,
                  std::string("fit_supervised needs a full-rank average covariance (reduce with "
                              "fit_unsupervised first): ") +
                      e.what());
    }
  }();
  const Eigen::MatrixXd whitener =
      mean_eig.vectors * mean_eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * mean_eig.vectors.transpose();
  const EigenPairs<double> eig = eigh(target_cov.congruence(whitener));

  SpatialFilter f;
  f.w = whitener * eig.vectors.leftCols(r);
  apply_sign_convention(f.w);
  f.kind = FilterKind::Supervised;
  f.eigenvalues = eig.values.head(r);
  return f;
}

SpatialFilter fit_mne(const Leadfield& lead, double lambda) {
  lead.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidArgument, "fit_mne: lambda must be positive and finite");
  }
  const Eigen::Index p = lead.g.rows();
  const Eigen::MatrixXd gram = lead.g * lead.g.transpose() + lambda * Eigen::MatrixXd::Identity(p, p);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "fit_mne: Cholesky of G G^T + lambda I failed");
  }
  SpatialFilter f;
  // (G^T (G G^T + lambda I)^{-1})^T = (G G^T + lambda I)^{-1} G
  f.w = llt.solve(lead.g);
  f.kind = FilterKind::MNE;
  f.mne_lambda = lambda;
  return f;
}

CovarianceBundle apply(const SpatialFilter& filter, const CovarianceBundle& bundle) {
  if (filter.dim_in() != bundle.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "filter expects dim " + std::to_string(filter.dim_in()) +
                                                  ", bundle has dim " + std::to_string(bundle.dim()));
  }
  CovarianceBundle out;
  out.matrices.reserve(bundle.size());
  for (const auto& c : bundle.matrices) out.matrices.push_back(c.congruence(filter.w));
  out.labels = bundle.labels;
  out.nominal_rank = static_cast<int>(std::min<Eigen::Index>(bundle.nominal_rank, filter.rank_out()));
  out.provenance = bundle.provenance;
  return out;
}

}  // namespace covreg
