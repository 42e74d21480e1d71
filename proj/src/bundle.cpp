#include "covreg/bundle.hpp"

#include <string>

#include "covreg/errors.hpp"

namespace covreg {

void CovarianceBundle::validate() const {
  if (matrices.empty()) throw Error(ErrorKind::InvalidArgument, "bundle is empty");
  if (labels.size() != static_cast<Eigen::Index>(matrices.size())) {
    throw Error(ErrorKind::DimensionMismatch, "bundle has " + std::to_string(matrices.size()) +
                                                  " matrices but " + std::to_string(labels.size()) + " labels");
  }
  const Eigen::Index p = dim();
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].dim() != p) {
      throw Error(ErrorKind::DimensionMismatch, "matrix " + std::to_string(i) + " has dim " +
                                                    std::to_string(matrices[i].dim()) + ", expected " +
                                                    std::to_string(p));
    }
    if (!matrices[i].matrix().allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "matrix " + std::to_string(i) + " has non-finite entries");
    }
  }
  if (!labels.allFinite()) throw Error(ErrorKind::InvalidArgument, "bundle labels must be finite");
  if (nominal_rank < 1 || nominal_rank > p) {
    throw Error(ErrorKind::InvalidArgument, "nominal rank " + std::to_string(nominal_rank) +
                                                " outside [1, " + std::to_string(p) + "]");
  }
}

CovarianceBundle CovarianceBundle::subset(std::span<const int> indices) const {
  CovarianceBundle out;
  out.matrices.reserve(indices.size());
  out.labels.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.matrices.push_back(matrices.at(static_cast<std::size_t>(indices[k])));
    out.labels(static_cast<Eigen::Index>(k)) = labels(indices[k]);
  }
  out.nominal_rank = nominal_rank;
  out.provenance = provenance;
  return out;
}

SymMatd CovarianceBundle::arithmetic_mean() const {
  if (matrices.empty()) throw Error(ErrorKind::InvalidArgument, "mean of an empty bundle");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim(), dim());
  for (const auto& m : matrices) acc += m.matrix();
  return SymMatd(acc / static_cast<double>(matrices.size()));
}

}  // namespace covreg
