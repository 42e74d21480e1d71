#pragma once

// Distances, logarithms, means and vectorizations for covariance matrices
// under three geometries:
//   - Euclidean (Frobenius),
//   - geometric / affine-invariant on full-rank SPD matrices,
//   - Bures-Wasserstein on fixed-rank PSD matrices, handled through the
//     factor representation S = Y Y^T, Y in R^{P x R}, modulo O(R).

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "covreg/errors.hpp"
#include "covreg/symmat.hpp"

namespace covreg {

enum class EmbeddingKind { Euclidean, GeometricTangent, WassersteinTangent, LogDiag };

[[nodiscard]] inline const char* to_string(EmbeddingKind kind) noexcept {
  switch (kind) {
    case EmbeddingKind::Euclidean: return "euclidean";
    case EmbeddingKind::GeometricTangent: return "geometric";
    case EmbeddingKind::WassersteinTangent: return "wasserstein";
    case EmbeddingKind::LogDiag: return "logdiag";
  }
  return "unknown";
}

[[nodiscard]] inline EmbeddingKind parse_embedding_kind(const std::string& name) {
  for (auto kind : {EmbeddingKind::Euclidean, EmbeddingKind::GeometricTangent,
                    EmbeddingKind::WassersteinTangent, EmbeddingKind::LogDiag}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown embedding '" + name +
                                              "' (expected euclidean|geometric|wasserstein|logdiag)");
}

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": dimensions " +
                                                  std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vectorization helpers

/// Upper triangle (diagonal included) flattened row by row, with unit weight
/// on the diagonal and sqrt(2) off it, so that ||upper(M)||_2 == ||M||_F.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> upper(const SymMat<Scalar>& m) {
  const Eigen::Index p = m.dim();
  const Scalar off = std::sqrt(Scalar(2));
  Vector<Scalar> out(p * (p + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    out(k++) = m(i, i);
    for (Eigen::Index j = i + 1; j < p; ++j) out(k++) = off * m(i, j);
  }
  return out;
}

/// Inverse of upper().
template <typename Scalar>
[[nodiscard]] SymMat<Scalar> unupper(const Vector<Scalar>& v, Eigen::Index p) {
  if (v.size() != p * (p + 1) / 2) {
    throw Error(ErrorKind::DimensionMismatch, "unupper: vector length does not match dimension");
  }
  const Scalar off = Scalar(1) / std::sqrt(Scalar(2));
  Matrix<Scalar> m(p, p);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    m(i, i) = v(k++);
    for (Eigen::Index j = i + 1; j < p; ++j) m(i, j) = m(j, i) = off * v(k++);
  }
  return SymMat<Scalar>(m);
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> vec_euclidean(const SymMat<Scalar>& s) {
  return upper(s);
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> vec_logdiag(const SymMat<Scalar>& s) {
  const auto d = s.matrix().diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > Scalar(0))) {
      std::ostringstream msg;
      msg << "diagonal entry " << i << " is " << d(i);
      throw Error(ErrorKind::NonPositiveDiagonal, msg.str());
    }
  }
  return d.array().log().matrix();
}

// ---------------------------------------------------------------------------
// Geometric (affine-invariant) geometry

/// Precomputed square roots of a full-rank base point; every geometric log,
/// exp and vectorization at that base goes through this.
template <typename Scalar = double>
class GeometricBase {
 public:
  explicit GeometricBase(const SymMat<Scalar>& base) : base_(base), sqrt_(base), inv_sqrt_(base) {
    const EigenPairs<Scalar> eig = eigh_pd(base);
    sqrt_ = spectral_map(eig, [](Scalar x) { return std::sqrt(x); });
    inv_sqrt_ = spectral_map(eig, [](Scalar x) { return Scalar(1) / std::sqrt(x); });
  }

  [[nodiscard]] const SymMat<Scalar>& base() const noexcept { return base_; }
  [[nodiscard]] const SymMat<Scalar>& sqrt() const noexcept { return sqrt_; }
  [[nodiscard]] const SymMat<Scalar>& inv_sqrt() const noexcept { return inv_sqrt_; }

  /// B^{-1/2} S B^{-1/2}; S must be full rank.
  [[nodiscard]] SymMat<Scalar> whiten(const SymMat<Scalar>& s) const {
    detail::require_same_dim(base_.dim(), s.dim(), "geometric whitening");
    return s.congruence(inv_sqrt_.matrix());
  }

  /// log(B^{-1/2} S B^{-1/2}), the tangent vector in base-normalized coordinates.
  [[nodiscard]] SymMat<Scalar> normalized_log(const SymMat<Scalar>& s) const {
    detail::require_same_dim(base_.dim(), s.dim(), "geometric log");
    (void)eigh_pd(s);  // both arguments must be full rank
    return covreg::log(whiten(s));
  }

  [[nodiscard]] SymMat<Scalar> log(const SymMat<Scalar>& s) const {
    return normalized_log(s).congruence(sqrt_.matrix());
  }

  [[nodiscard]] SymMat<Scalar> exp(const SymMat<Scalar>& tangent) const {
    detail::require_same_dim(base_.dim(), tangent.dim(), "geometric exp");
    return covreg::exp(tangent.congruence(inv_sqrt_.matrix())).congruence(sqrt_.matrix());
  }

  /// Exp at the base of a tangent vector given in base-normalized coordinates.
  [[nodiscard]] SymMat<Scalar> exp_normalized(const SymMat<Scalar>& normalized) const {
    return covreg::exp(normalized).congruence(sqrt_.matrix());
  }

  [[nodiscard]] Vector<Scalar> vectorize(const SymMat<Scalar>& s) const { return upper(normalized_log(s)); }

 private:
  SymMat<Scalar> base_;
  SymMat<Scalar> sqrt_;
  SymMat<Scalar> inv_sqrt_;
};

template <typename Scalar>
[[nodiscard]] Scalar dist_geometric(const SymMat<Scalar>& s, const SymMat<Scalar>& t) {
  detail::require_same_dim(s.dim(), t.dim(), "dist_geometric");
  (void)eigh_pd(t);
  const GeometricBase<Scalar> base(s);
  const EigenPairs<Scalar> eig = eigh_pd(base.whiten(t));
  return std::sqrt(eig.values.array().log().square().sum());
}

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> log_geometric(const SymMat<Scalar>& base, const SymMat<Scalar>& s) {
  return GeometricBase<Scalar>(base).log(s);
}

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> exp_geometric(const SymMat<Scalar>& base, const SymMat<Scalar>& tangent) {
  return GeometricBase<Scalar>(base).exp(tangent);
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> vec_geometric(const SymMat<Scalar>& base, const SymMat<Scalar>& s) {
  return GeometricBase<Scalar>(base).vectorize(s);
}

// ---------------------------------------------------------------------------
// Bures-Wasserstein geometry

/// A full-column-rank factor Y of S = Y Y^T.
template <typename Scalar = double>
class FactorMat {
 public:
  template <typename Derived>
  explicit FactorMat(const Eigen::MatrixBase<Derived>& y) : y_(y) {
    if (y_.cols() < 1 || y_.rows() < y_.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "factor must be P x R with 1 <= R <= P");
    }
  }

  [[nodiscard]] const Matrix<Scalar>& matrix() const noexcept { return y_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return y_.rows(); }
  [[nodiscard]] Eigen::Index rank() const noexcept { return y_.cols(); }
  [[nodiscard]] SymMat<Scalar> gram() const { return SymMat<Scalar>(y_ * y_.transpose()); }

 private:
  Matrix<Scalar> y_;
};

namespace detail {

/// Y = U diag(sqrt(lambda)) over the eigenvalues above rank_tol * lambda_max;
/// an empty factor for the zero matrix.
template <typename Scalar>
Matrix<Scalar> thresholded_factor(const SymMat<Scalar>& s) {
  const EigenPairs<Scalar> eig = eigh_psd(s);
  const Scalar threshold = rank_tol_v<Scalar> * eig.values(0);
  const Eigen::Index rank = (eig.values.array() > threshold).count();
  return eig.vectors.leftCols(rank) * eig.values.head(rank).cwiseSqrt().asDiagonal();
}

}  // namespace detail

/// d_W^2 = tr s + tr t - 2 tr (s^{1/2} t s^{1/2})^{1/2}. The trace term equals
/// the nuclear norm of Y_s^T Y_t for any factors s = Y_s Y_s^T, t = Y_t Y_t^T,
/// which avoids square roots of round-off eigenvalues on rank-deficient input.
template <typename Scalar>
[[nodiscard]] Scalar dist_wasserstein(const SymMat<Scalar>& s, const SymMat<Scalar>& t) {
  detail::require_same_dim(s.dim(), t.dim(), "dist_wasserstein");
  const Matrix<Scalar> ys = detail::thresholded_factor(s);
  const Matrix<Scalar> yt = detail::thresholded_factor(t);
  Scalar cross = 0;
  if (ys.cols() > 0 && yt.cols() > 0) cross = svd_rect(Matrix<Scalar>(ys.transpose() * yt)).sigma.sum();
  const Scalar squared = s.trace() + t.trace() - Scalar(2) * cross;
  return std::sqrt(std::max(squared, Scalar(0)));
}

/// Top-r eigenpairs as a factor: Y = U_r diag(sqrt(lambda_r)).
template <typename Scalar>
[[nodiscard]] FactorMat<Scalar> factorize(const SymMat<Scalar>& s, int r) {
  const EigenPairs<Scalar> eig = eigh_psd(s);
  const Scalar threshold = rank_tol_v<Scalar> * eig.values(0);
  const int rank = static_cast<int>((eig.values.array() > threshold).count());
  if (rank != r) {
    throw Error(ErrorKind::RankMismatch,
                "factorize: numerical rank " + std::to_string(rank) + " != requested " + std::to_string(r));
  }
  return FactorMat<Scalar>(eig.vectors.leftCols(r) * eig.values.head(r).cwiseSqrt().asDiagonal());
}

/// Y' Q* - Y with Q* = V U^T from the SVD U S V^T = Y^T Y', i.e. Y' optimally
/// rotated onto Y minus Y.
template <typename Scalar>
[[nodiscard]] Matrix<Scalar> log_wasserstein(const FactorMat<Scalar>& base, const FactorMat<Scalar>& s) {
  detail::require_same_dim(base.dim(), s.dim(), "log_wasserstein (P)");
  detail::require_same_dim(base.rank(), s.rank(), "log_wasserstein (R)");
  const SvdResult<Scalar> svd = svd_rect(Matrix<Scalar>(base.matrix().transpose() * s.matrix()));
  const Matrix<Scalar> rotation = svd.v * svd.u.transpose();
  return s.matrix() * rotation - base.matrix();
}

/// Row-major flattening of a dense matrix.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> flatten_rows(const Matrix<Scalar>& m) {
  Vector<Scalar> out(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(k++) = m(i, j);
  return out;
}

template <typename Scalar>
[[nodiscard]] Vector<Scalar> vec_wasserstein(const FactorMat<Scalar>& base, const FactorMat<Scalar>& s) {
  return flatten_rows(log_wasserstein(base, s));
}

// ---------------------------------------------------------------------------
// Frechet means

struct MeanOptions {
  int max_iter = 100;
  /// Stop once the gradient norm falls below tol_scale * (problem size factor).
  double tol_scale = 1e-9;
};

template <typename Scalar = double>
struct MeanResult {
  SymMat<Scalar> mean;
  int iterations = 0;
  Scalar gradient_norm = 0;
};

namespace detail {

template <typename Scalar>
void require_nonempty_same_dim(std::span<const SymMat<Scalar>> set, const char* where) {
  if (set.empty()) throw Error(ErrorKind::InvalidArgument, std::string(where) + ": empty set");
  for (const auto& m : set) require_same_dim(set.front().dim(), m.dim(), where);
}

template <typename Scalar>
SymMat<Scalar> arithmetic_mean(std::span<const SymMat<Scalar>> set) {
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(set.front().dim(), set.front().dim());
  for (const auto& m : set) acc += m.matrix();
  return SymMat<Scalar>(acc / Scalar(set.size()));
}

}  // namespace detail

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> mean_euclidean(std::span<const SymMat<Scalar>> set) {
  detail::require_nonempty_same_dim(set, "mean_euclidean");
  return detail::arithmetic_mean(set);
}

/// Karcher mean under the affine-invariant metric. Fixed-point iteration
///   M <- M^{1/2} exp(step * mean_i log(M^{-1/2} C_i M^{-1/2})) M^{1/2}
/// from the arithmetic mean. Each iteration starts from step 1 and halves it
/// while the step would increase both the objective sum_i d_G^2(M, C_i) and
/// the gradient norm. Convergence: gradient Frobenius norm <= tol_scale * P.
template <typename Scalar>
[[nodiscard]] MeanResult<Scalar> karcher_mean(std::span<const SymMat<Scalar>> set, const MeanOptions& opts = {}) {
  detail::require_nonempty_same_dim(set, "mean_geometric");
  for (const auto& m : set) (void)eigh_pd(m);
  const Eigen::Index p = set.front().dim();
  const Scalar tol = Scalar(opts.tol_scale) * Scalar(p);

  struct State {
    GeometricBase<Scalar> at;
    SymMat<Scalar> gradient;
    Scalar objective;
  };
  const auto evaluate = [&](const SymMat<Scalar>& m) {
    GeometricBase<Scalar> at(m);
    Matrix<Scalar> grad = Matrix<Scalar>::Zero(p, p);
    Scalar obj = 0;
    for (const auto& c : set) {
      const SymMat<Scalar> l = covreg::log(at.whiten(c));
      grad += l.matrix();
      obj += l.matrix().squaredNorm();
    }
    const Scalar n = Scalar(set.size());
    return State{std::move(at), SymMat<Scalar>(grad / n), obj / n};
  };

  State state = evaluate(detail::arithmetic_mean(set));
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Scalar gnorm = state.gradient.matrix().norm();
    if (gnorm <= tol) return {state.at.base(), iter, gnorm};
    if (iter == opts.max_iter) break;
    Scalar step = 1;
    bool accepted = false;
    while (!accepted && step > Scalar(1e-10)) {
      const SymMat<Scalar> scaled(state.gradient.matrix() * step);
      State next = evaluate(state.at.exp_normalized(scaled));
      // Near the minimum the objective changes by less than its round-off, so
      // a shrinking gradient also counts as progress.
      if (next.objective <= state.objective || next.gradient.matrix().norm() < gnorm) {
        state = std::move(next);
        accepted = true;
      } else {
        step *= Scalar(0.5);
      }
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "mean_geometric: gradient norm " << state.gradient.matrix().norm() << " > " << tol << " after "
      << opts.max_iter << " iterations";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> mean_geometric(std::span<const SymMat<Scalar>> set, const MeanOptions& opts = {}) {
  return karcher_mean(set, opts).mean;
}

struct WassersteinMeanOptions {
  int max_iter = 300;
  /// Stop once the gradient norm falls below tol_scale * sqrt(P * R).
  double tol_scale = 1e-7;
  double armijo_c = 1e-4;
};

/// Wasserstein barycenter of rank-r PSD matrices by gradient descent on the
/// factor Y. The objective is f(Y) = (1/N) sum_i min_Q ||Y_i Q - Y||_F^2,
/// whose negative half-gradient is the mean of the log maps at Y; steps
/// along it use Armijo backtracking from a unit step.
template <typename Scalar>
[[nodiscard]] MeanResult<Scalar> wasserstein_mean(std::span<const SymMat<Scalar>> set, int r,
                                                  const WassersteinMeanOptions& opts = {}) {
  detail::require_nonempty_same_dim(set, "mean_wasserstein");
  const Eigen::Index p = set.front().dim();
  std::vector<FactorMat<Scalar>> factors;
  factors.reserve(set.size());
  for (const auto& m : set) factors.push_back(factorize(m, r));
  const Scalar tol = Scalar(opts.tol_scale) * std::sqrt(Scalar(p * r));
  const Scalar n = Scalar(set.size());

  const auto evaluate = [&](const Matrix<Scalar>& y) {
    const FactorMat<Scalar> at(y);
    Matrix<Scalar> direction = Matrix<Scalar>::Zero(p, r);
    Scalar obj = 0;
    for (const auto& f : factors) {
      const Matrix<Scalar> l = log_wasserstein(at, f);
      direction += l;
      obj += l.squaredNorm();
    }
    return std::pair{Matrix<Scalar>(direction / n), obj / n};
  };

  const EigenPairs<Scalar> init = eigh_psd(detail::arithmetic_mean(set));
  Matrix<Scalar> y = init.vectors.leftCols(r) * init.values.head(r).cwiseSqrt().asDiagonal();
  auto [direction, objective] = evaluate(y);
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Scalar gnorm = direction.norm();
    if (gnorm <= tol) return {SymMat<Scalar>(y * y.transpose()), iter, gnorm};
    if (iter == opts.max_iter) break;
    // grad f = -2 * direction
    const Scalar decrease = Scalar(2) * direction.squaredNorm();
    Scalar step = 1;
    bool accepted = false;
    while (!accepted && step > Scalar(1e-12)) {
      Matrix<Scalar> candidate = y + step * direction;
      auto [cand_dir, cand_obj] = evaluate(candidate);
      if (cand_obj <= objective - Scalar(opts.armijo_c) * step * decrease) {
        y = std::move(candidate);
        direction = std::move(cand_dir);
        objective = cand_obj;
        accepted = true;
      } else {
        step *= Scalar(0.5);
      }
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "mean_wasserstein: gradient norm " << direction.norm() << " > " << tol << " after " << opts.max_iter
      << " iterations";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

template <typename Scalar>
[[nodiscard]] SymMat<Scalar> mean_wasserstein(std::span<const SymMat<Scalar>> set, int r,
                                              const WassersteinMeanOptions& opts = {}) {
  return wasserstein_mean(set, r, opts).mean;
}

// ---------------------------------------------------------------------------
// Tangent-space embedding at a fitted reference point

/// Which embedding, at which reference, with which factor width. Produced by
/// fitting on a training set; applied unchanged to any later sample.
template <typename Scalar = double>
class TangentEmbedding {
 public:
  /// Reference = training mean under the metric matching `kind`.
  [[nodiscard]] static TangentEmbedding fit(EmbeddingKind kind, std::span<const SymMat<Scalar>> train, int rank) {
    switch (kind) {
      case EmbeddingKind::Euclidean:
        return TangentEmbedding(kind, mean_euclidean(train), rank);
      case EmbeddingKind::GeometricTangent:
        return TangentEmbedding(kind, mean_geometric(train), rank);
      case EmbeddingKind::WassersteinTangent:
        return TangentEmbedding(kind, mean_wasserstein(train, rank), rank);
      case EmbeddingKind::LogDiag:
        return TangentEmbedding(kind, std::nullopt, rank);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown embedding kind");
  }

  TangentEmbedding(EmbeddingKind kind, std::optional<SymMat<Scalar>> reference, int rank)
      : kind_(kind), reference_(std::move(reference)), rank_(rank) {
    if (kind_ != EmbeddingKind::LogDiag && !reference_) {
      throw Error(ErrorKind::InvalidArgument, std::string(to_string(kind_)) + " embedding needs a reference");
    }
    if (kind_ == EmbeddingKind::GeometricTangent) geometric_.emplace(*reference_);
    if (kind_ == EmbeddingKind::WassersteinTangent) factor_.emplace(factorize(*reference_, rank_));
  }

  [[nodiscard]] EmbeddingKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::optional<SymMat<Scalar>>& reference() const noexcept { return reference_; }
  [[nodiscard]] int rank() const noexcept { return rank_; }

  [[nodiscard]] Eigen::Index feature_dim(Eigen::Index p) const {
    switch (kind_) {
      case EmbeddingKind::Euclidean:
      case EmbeddingKind::GeometricTangent: return p * (p + 1) / 2;
      case EmbeddingKind::WassersteinTangent: return p * rank_;
      case EmbeddingKind::LogDiag: return p;
    }
    return 0;
  }

  [[nodiscard]] Vector<Scalar> vectorize(const SymMat<Scalar>& s) const {
    switch (kind_) {
      case EmbeddingKind::Euclidean:
        detail::require_same_dim(reference_->dim(), s.dim(), "euclidean embedding");
        return upper(SymMat<Scalar>(s.matrix() - reference_->matrix()));
      case EmbeddingKind::GeometricTangent: return geometric_->vectorize(s);
      case EmbeddingKind::WassersteinTangent: return vec_wasserstein(*factor_, factorize(s, rank_));
      case EmbeddingKind::LogDiag: return vec_logdiag(s);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown embedding kind");
  }

  /// One row per sample.
  [[nodiscard]] Matrix<Scalar> transform(std::span<const SymMat<Scalar>> set) const {
    if (set.empty()) return Matrix<Scalar>(0, 0);
    Matrix<Scalar> rows(static_cast<Eigen::Index>(set.size()), feature_dim(set.front().dim()));
    for (std::size_t i = 0; i < set.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = vectorize(set[i]).transpose();
    }
    return rows;
  }

 private:
  EmbeddingKind kind_;
  std::optional<SymMat<Scalar>> reference_;
  int rank_;
  std::optional<GeometricBase<Scalar>> geometric_;
  std::optional<FactorMat<Scalar>> factor_;
};

// ---------------------------------------------------------------------------

/// Numerical counterexample to affine invariance on rank-deficient matrices:
/// A = diag(1, 0), B = ones(2, 2), and d_W(W A W^T, W B W^T) for
/// W = diag(1, eps). W A W^T == A while W B W^T -> A, so the distances go to
/// zero although A != B.
template <typename Scalar = double>
struct InvarianceWitness {
  SymMat<Scalar> a;
  SymMat<Scalar> b;
  Scalar base_distance;
  std::vector<Scalar> epsilons;
  std::vector<Scalar> distances;
};

template <typename Scalar = double>
[[nodiscard]] InvarianceWitness<Scalar> no_affine_invariance_witness() {
  Matrix<Scalar> a(2, 2);
  a << 1, 0, 0, 0;
  const SymMat<Scalar> sa(a);
  const SymMat<Scalar> sb(Matrix<Scalar>::Ones(2, 2));
  InvarianceWitness<Scalar> out{sa, sb, dist_wasserstein(sa, sb), {}, {}};
  for (const Scalar eps : {Scalar(1), Scalar(0.1), Scalar(0.01), Scalar(0.001)}) {
    Matrix<Scalar> w = Matrix<Scalar>::Identity(2, 2);
    w(1, 1) = eps;
    // W M W^T == congruence by W^T
    const Matrix<Scalar> wt = w.transpose();
    out.epsilons.push_back(eps);
    out.distances.push_back(dist_wasserstein(sa.congruence(wt), sb.congruence(wt)));
  }
  return out;
}

}  // namespace covreg
