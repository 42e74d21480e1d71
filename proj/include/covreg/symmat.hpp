#pragma once

// Dense symmetric-matrix kernels. Everything here is built on a single
// symmetric eigendecomposition (or a thin SVD for rectangular inputs) and is
// templated on the scalar type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "covreg/errors.hpp"

namespace covreg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Relative eigenvalue threshold (w.r.t. the largest eigenvalue) below which a
/// direction counts as null.
template <typename Scalar>
inline constexpr Scalar rank_tol_v = Scalar(1e-12);
template <>
inline constexpr float rank_tol_v<float> = 1e-5f;

/// A square matrix that is symmetric by construction: the input is replaced by
/// (M + M^T) / 2, so data(i, j) == data(j, i) holds bit-exactly.
template <typename Scalar = double>
class SymMat {
 public:
  using MatrixType = Matrix<Scalar>;

  template <typename Derived>
  explicit SymMat(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "SymMat needs a square matrix, got " +
                                                    std::to_string(m.rows()) + "x" +
                                                    std::to_string(m.cols()));
    }
    if (m.rows() < 1) throw Error(ErrorKind::DimensionMismatch, "SymMat needs dim >= 1");
    data_ = (m + m.transpose()) * Scalar(0.5);
  }

  [[nodiscard]] static SymMat identity(Eigen::Index n) { return SymMat(MatrixType::Identity(n, n)); }
  [[nodiscard]] static SymMat zero(Eigen::Index n) { return SymMat(MatrixType::Zero(n, n)); }

  template <typename Derived>
  [[nodiscard]] static SymMat diagonal(const Eigen::MatrixBase<Derived>& d) {
    return SymMat(MatrixType(d.asDiagonal()));
  }

  [[nodiscard]] Eigen::Index dim() const noexcept { return data_.rows(); }
  [[nodiscard]] const MatrixType& matrix() const noexcept { return data_; }
  [[nodiscard]] Scalar operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  [[nodiscard]] Scalar trace() const { return data_.trace(); }

  /// W^T S W, the congruence used everywhere for spatial filtering.
  template <typename Derived>
  [[nodiscard]] SymMat congruence(const Eigen::MatrixBase<Derived>& w) const {
    if (w.rows() != dim()) {
      throw Error(ErrorKind::DimensionMismatch, "congruence: filter has " +
                                                    std::to_string(w.rows()) + " rows, matrix dim " +
                                                    std::to_string(dim()));
    }
    return SymMat(w.transpose() * data_ * w);
  }

  friend bool operator==(const SymMat& a, const SymMat& b) {
    return a.dim() == b.dim() && a.data_ == b.data_;
  }

 private:
  MatrixType data_;
};

using SymMatd = SymMat<double>;

/// Eigenvalues sorted descending; eigenvector columns normalized so that the
/// entry of largest magnitude is nonnegative.
template <typename Scalar = double>
struct EigenPairs {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;
};

template <typename Scalar>
void apply_sign_convention(Matrix<Scalar>& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < Scalar(0)) vectors.col(j) = -vectors.col(j);
  }
}

template <typename Scalar>
[[nodiscard]] EigenPairs<Scalar> eigh(const SymMat<Scalar>& m) {
  const Eigen::Index n = m.dim();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure,
                "symmetric eigensolver did not converge within " +
                    std::to_string(Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>::m_maxIterations * n) +
                    " iterations");
  }
  // Descending order; equal eigenvalues keep the solver's column order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()(a) > solver.eigenvalues()(b);
  });
  EigenPairs<Scalar> out{Vector<Scalar>(n), Matrix<Scalar>(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  apply_sign_convention(out.vectors);
  return out;
}

/// Rebuild U diag(f(lambda)) U^T from eigenpairs.
template <typename Scalar, typename Fn>
[[nodiscard]] SymMat<Scalar> spectral_map(const EigenPairs<Scalar>& eig, Fn&& fn) {
  Vector<Scalar> mapped = eig.values.unaryExpr(fn);
  return SymMat<Scalar>(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

/// Eigendecomposition of a PSD matrix with round-off negatives clipped to 0.
/// Throws NotPSD if an eigenvalue is below -rank_tol * lambda_max.
template <typename Scalar>
[[nodiscard]] EigenPairs<Scalar> eigh_psd(const SymMat<Scalar>& m, Scalar rank_tol = rank_tol_v<Scalar>) {
  EigenPairs<Scalar> eig = eigh(m);
  const Scalar top = std::max(eig.values(0), Scalar(0));
  const Scalar floor = -rank_tol * top;
  const Scalar smallest = eig.values(eig.values.size() - 1);
  if (smallest < floor || (top == Scalar(0) && smallest < Scalar(0))) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << smallest << " below tolerance " << floor;
    throw Error(ErrorKind::NotPSD, msg.str());
  }
  eig.values = eig.values.cwiseMax(Scalar(0));
  return eig;
}

/// Eigendecomposition of a matrix required to be positive definite (all
/// eigenvalues above rank_tol * lambda_max).
template <typename Scalar>
[[nodiscard]] EigenPairs<Scalar> eigh_pd(const SymMat<Scalar>& m, Scalar rank_tol = rank_tol_v<Scalar>) {
  EigenPairs<Scalar> eig = eigh(m);
  const Scalar top = eig.values(0);
  const Scalar smallest = eig.values(eig.values.size() - 1);
  if (!(top > Scalar(0)) || !(smallest > rank_tol * top)) {
    std::ostringstream msg;
    msg << "matrix is not positive definite: smallest eigenvalue " << smallest
        << ", largest " << top;
    throw Error(ErrorKind::SingularMatrix, msg.str());
  }
  return eig;
}

enum class SymFunc { Log, Exp, Sqrt, InvSqrt, Inv };

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> sym_func(const SymMat<Scalar>& m, SymFunc fn) {
  using std::exp;
  using std::log;
  using std::sqrt;
  switch (fn) {
    case SymFunc::Exp:
      return spectral_map(eigh(m), [](Scalar x) { return exp(x); });
    case SymFunc::Sqrt:
      return spectral_map(eigh_psd(m), [](Scalar x) { return sqrt(x); });
    case SymFunc::Log:
      return spectral_map(eigh_pd(m), [](Scalar x) { return log(x); });
    case SymFunc::InvSqrt:
      return spectral_map(eigh_pd(m), [](Scalar x) { return Scalar(1) / sqrt(x); });
    case SymFunc::Inv:
      return spectral_map(eigh_pd(m), [](Scalar x) { return Scalar(1) / x; });
  }
  throw Error(ErrorKind::InvalidArgument, "unknown matrix function");
}

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> log(const SymMat<Scalar>& m) { return sym_func(m, SymFunc::Log); }
template <typename Scalar>
[[nodiscard]] SymMat<Scalar> exp(const SymMat<Scalar>& m) { return sym_func(m, SymFunc::Exp); }
template <typename Scalar>
[[nodiscard]] SymMat<Scalar> sqrt(const SymMat<Scalar>& m) { return sym_func(m, SymFunc::Sqrt); }
template <typename Scalar>
[[nodiscard]] SymMat<Scalar> inv_sqrt(const SymMat<Scalar>& m) { return sym_func(m, SymFunc::InvSqrt); }
template <typename Scalar>
[[nodiscard]] SymMat<Scalar> inv(const SymMat<Scalar>& m) { return sym_func(m, SymFunc::Inv); }

/// Thin SVD: m = U diag(sigma) V^T with k = min(rows, cols) columns, sigma
/// nonnegative and descending.
template <typename Scalar = double>
struct SvdResult {
  Matrix<Scalar> u;
  Vector<Scalar> sigma;
  Matrix<Scalar> v;
};

template <typename Derived>
[[nodiscard]] SvdResult<typename Derived::Scalar> svd_rect(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "svd_rect: non-finite entries");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "svd_rect: Jacobi SVD did not converge");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

/// Number of eigenvalues above rank_tol * lambda_max; 0 for the zero matrix.
template <typename Scalar>
[[nodiscard]] int numerical_rank(const SymMat<Scalar>& m, Scalar rank_tol = rank_tol_v<Scalar>) {
  const EigenPairs<Scalar> eig = eigh_psd(m, rank_tol);
  const Scalar threshold = rank_tol * eig.values(0);
  return static_cast<int>((eig.values.array() > threshold).count());
}

/// Column rank of a rectangular matrix under the same relative threshold,
/// applied to squared singular values.
template <typename Derived>
[[nodiscard]] int column_rank(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  const auto s = svd_rect(m).sigma;
  const Scalar top = s(0) * s(0);
  return static_cast<int>((s.array().square() > rank_tol_v<Scalar> * top).count());
}

}  // namespace covreg
