#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "covreg/manifold.hpp"
#include "oracles.hpp"

using covreg::FactorMat;
using covreg::SymMatd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SymMatd diag(std::initializer_list<double> values) {
  VectorXd d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d(i++) = v;
  return SymMatd::diagonal(d);
}

std::vector<SymMatd> spd_set(oracle::Draws& draws, Eigen::Index p, int n) {
  std::vector<SymMatd> set;
  for (int i = 0; i < n; ++i) set.push_back(draws.spd(p));
  return set;
}

}  // namespace

TEST_CASE("geometric distance") {
  oracle::Draws draws(5);
  const SymMatd s = draws.spd(4);
  CHECK(covreg::dist_geometric(s, s) < 1e-12);
  CHECK(covreg::dist_geometric(SymMatd::identity(2), diag({std::exp(2.0), std::exp(2.0)})) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  const SymMatd t = draws.spd(4);
  CHECK(oracle::rel_err(covreg::dist_geometric(s, t), oracle::dist_geometric(s, t)) < 1e-10);
  const MatrixXd w = draws.invertible(4);
  CHECK(std::abs(covreg::dist_geometric(s.congruence(w), t.congruence(w)) - covreg::dist_geometric(s, t)) < 1e-8);
}

TEST_CASE("Wasserstein distance") {
  oracle::Draws draws(6);
  const SymMatd s = draws.spd(3);
  CHECK(covreg::dist_wasserstein(s, s) < 1e-7);
  CHECK(covreg::dist_wasserstein(diag({4}), diag({1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(covreg::dist_wasserstein(diag({4, 0}), diag({1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = draws.integer(2, 6);
    const SymMatd a = draws.psd_rank(p, draws.integer(1, static_cast<int>(p)));
    const SymMatd b = draws.psd_rank(p, draws.integer(1, static_cast<int>(p)));
    CHECK(oracle::rel_err(covreg::dist_wasserstein(a, b), oracle::dist_wasserstein(a, b)) < 1e-7);
  }
}

TEST_CASE("invariance of both distances over random draws") {
  oracle::Draws draws(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index p = 2 + trial % 5;
    const SymMatd s = draws.spd(p);
    const SymMatd t = draws.spd(p);
    const MatrixXd w = draws.invertible(p);
    const double dg = covreg::dist_geometric(s, t);
    CHECK(std::abs(covreg::dist_geometric(s.congruence(w), t.congruence(w)) - dg) <= 1e-8 * (1.0 + dg));

    const Eigen::Index r = draws.integer(1, static_cast<int>(p));
    const SymMatd a = r == p ? s : draws.psd_rank(p, r);
    const SymMatd b = r == p ? t : draws.psd_rank(p, r);
    const MatrixXd q = draws.orthogonal(p);
    const double dw = covreg::dist_wasserstein(a, b);
    CHECK(std::abs(covreg::dist_wasserstein(a.congruence(q), b.congruence(q)) - dw) <= 1e-8 * (1.0 + dw));
  }
}

TEST_CASE("metric axioms on random triples") {
  oracle::Draws draws(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index p = draws.integer(2, 5);
    const SymMatd a = draws.spd(p), b = draws.spd(p), c = draws.spd(p);
    CHECK(std::abs(covreg::dist_geometric(a, b) - covreg::dist_geometric(b, a)) < 1e-8);
    CHECK(covreg::dist_geometric(a, c) <= covreg::dist_geometric(a, b) + covreg::dist_geometric(b, c) + 1e-8);
    CHECK(std::abs(covreg::dist_wasserstein(a, b) - covreg::dist_wasserstein(b, a)) < 1e-8);
    CHECK(covreg::dist_wasserstein(a, c) <=
          covreg::dist_wasserstein(a, b) + covreg::dist_wasserstein(b, c) + 1e-8);
  }
}

TEST_CASE("geometric log, exp and vectorization") {
  CHECK(covreg::log_geometric(SymMatd::identity(3), SymMatd::identity(3)).matrix().norm() < 1e-14);
  const SymMatd l = covreg::log_geometric(SymMatd::identity(2), diag({std::exp(1.0), std::exp(2.0)}));
  CHECK((l.matrix() - diag({1, 2}).matrix()).norm() < 1e-12);

  oracle::Draws draws(8);
  const SymMatd base = draws.spd(5);
  const SymMatd s = draws.spd(5);
  CHECK(oracle::frob_rel(covreg::exp_geometric(base, covreg::log_geometric(base, s)).matrix(), s.matrix()) < 1e-8);

  CHECK(covreg::vec_geometric(SymMatd::identity(2), SymMatd::identity(2)).norm() < 1e-14);
  const VectorXd v = covreg::vec_geometric(SymMatd::identity(2), diag({std::exp(1.0), 1.0}));
  CHECK(v.size() == 3);
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(std::abs(v(1)) < 1e-14);
  CHECK(std::abs(v(2)) < 1e-14);

  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = draws.integer(2, 6);
    const SymMatd m = draws.spd(p), x = draws.spd(p);
    CHECK(std::abs(covreg::vec_geometric(m, x).norm() - covreg::dist_geometric(m, x)) < 1e-8);
  }
}

TEST_CASE("Upper ordering and Euclidean isometry") {
  MatrixXd m(3, 3);
  m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  const VectorXd u = covreg::upper(SymMatd(m));
  VectorXd want(6);
  const double r2 = std::sqrt(2.0);
  want << 1, 2 * r2, 3 * r2, 4, 5 * r2, 6;
  CHECK((u - want).norm() < 1e-14);
  CHECK((covreg::unupper(u, 3).matrix() - m).norm() < 1e-14);

  CHECK(covreg::vec_euclidean(SymMatd::zero(3)).norm() == 0.0);
  VectorXd d12(3);
  d12 << 1, 0, 2;
  CHECK((covreg::vec_euclidean(diag({1, 2})) - d12).norm() == 0.0);

  oracle::Draws draws(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = draws.integer(1, 6);
    const SymMatd a(draws.symmetric(p)), b(draws.symmetric(p));
    const double lhs = (covreg::vec_euclidean(a) - covreg::vec_euclidean(b)).norm();
    CHECK(std::abs(lhs - (a.matrix() - b.matrix()).norm()) < 1e-10);
  }
}

TEST_CASE("log-diag features") {
  CHECK(covreg::vec_logdiag(SymMatd::identity(4)).norm() == 0.0);
  const VectorXd v = covreg::vec_logdiag(diag({std::exp(1.0), std::exp(2.0)}));
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(v(1) == doctest::Approx(2.0));
  oracle::Draws draws(13);
  const SymMatd s = draws.spd(5);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(covreg::vec_logdiag(s)(i) == doctest::Approx(std::log(s(i, i))));
  CHECK_THROWS_AS((void)covreg::vec_logdiag(diag({1, 0})), covreg::Error);
}

TEST_CASE("factorization and Wasserstein log map") {
  const FactorMat<double> y = covreg::factorize(diag({4, 0}), 1);
  CHECK(y.rank() == 1);
  CHECK(y.matrix()(0, 0) == doctest::Approx(2.0));
  CHECK(std::abs(y.matrix()(1, 0)) < 1e-14);
  CHECK((covreg::factorize(SymMatd::identity(3), 3).matrix().cwiseAbs() - MatrixXd::Identity(3, 3)).norm() < 1e-14);

  oracle::Draws draws(9);
  const SymMatd r2 = draws.psd_rank(5, 2);
  CHECK(oracle::frob_rel(covreg::factorize(r2, 2).gram().matrix(), r2.matrix()) < 1e-8);
  CHECK_THROWS_AS((void)covreg::factorize(r2, 3), covreg::Error);

  CHECK(covreg::log_wasserstein(y, y).norm() < 1e-14);
  MatrixXd y1(2, 1), y2(2, 1);
  y1 << 1, 0;
  y2 << 2, 0;
  const MatrixXd l = covreg::log_wasserstein(FactorMat<double>(y1), FactorMat<double>(y2));
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(l(1, 0)) < 1e-14);
  const VectorXd v = covreg::vec_wasserstein(FactorMat<double>(y1), FactorMat<double>(y2));
  CHECK(v.size() == 2);
  CHECK(v(0) == doctest::Approx(1.0));

  const SymMatd a = draws.spd(3), b = draws.spd(3);
  const FactorMat<double> fa = covreg::factorize(a, 3), fb = covreg::factorize(b, 3);
  CHECK(std::abs(covreg::log_wasserstein(fa, fb).norm() - oracle::dist_wasserstein(a, b)) < 1e-6);

  CHECK(covreg::vec_wasserstein(covreg::factorize(draws.psd_rank(5, 3), 3),
                                covreg::factorize(draws.psd_rank(5, 3), 3))
            .size() == 15);
}

TEST_CASE("geometric mean") {
  const std::vector<SymMatd> ids(3, SymMatd::identity(3));
  CHECK((covreg::mean_geometric<double>(ids).matrix() - MatrixXd::Identity(3, 3)).norm() < 1e-12);

  const std::vector<SymMatd> scalars{diag({4}), diag({1})};
  CHECK(std::abs(covreg::mean_geometric<double>(scalars)(0, 0) - 2.0) < 1e-10);

  oracle::Draws draws(14);
  const std::vector<SymMatd> single{draws.spd(4)};
  CHECK(oracle::frob_rel(covreg::mean_geometric<double>(single).matrix(), single[0].matrix()) < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index p = draws.integer(2, 6);
    std::vector<SymMatd> set = spd_set(draws, p, 8);
    const auto res = covreg::karcher_mean<double>(set);
    CHECK(res.gradient_norm <= 1e-9 * double(p));
    const SymMatd m = res.mean;

    // Stationarity checked independently: sum of logs of M^-1/2 C M^-1/2.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.matrix());
    const MatrixXd isq = es.operatorInverseSqrt();
    MatrixXd grad = MatrixXd::Zero(p, p);
    for (const auto& c : set) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> ec(isq * c.matrix() * isq);
      grad += ec.eigenvectors() * ec.eigenvalues().array().log().matrix().asDiagonal() * ec.eigenvectors().transpose();
    }
    CHECK(grad.norm() / set.size() < 1e-8);

    const MatrixXd w = draws.invertible(p);
    std::vector<SymMatd> moved;
    for (const auto& c : set) moved.push_back(c.congruence(w));
    CHECK(oracle::frob_rel(covreg::mean_geometric<double>(moved).matrix(), m.congruence(w).matrix()) < 1e-6);

    std::reverse(set.begin(), set.end());
    CHECK(oracle::frob_rel(covreg::mean_geometric<double>(set).matrix(), m.matrix()) < 1e-8);
  }
}

TEST_CASE("Wasserstein mean") {
  oracle::Draws draws(15);
  const SymMatd s = draws.spd(3);
  const std::vector<SymMatd> same(3, s);
  CHECK(oracle::frob_rel(covreg::mean_wasserstein<double>(same, 3).matrix(), s.matrix()) < 1e-8);

  const std::vector<SymMatd> scalars{diag({4}), diag({16})};
  CHECK(std::abs(covreg::mean_wasserstein<double>(scalars, 1)(0, 0) - 9.0) < 1e-10);

  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Index p = draws.integer(3, 6);
    const int r = trial % 2 == 0 ? static_cast<int>(p) : 2;
    std::vector<SymMatd> set;
    for (int i = 0; i < 8; ++i) set.push_back(r == p ? draws.spd(p) : draws.psd_rank(p, r));
    const SymMatd m = covreg::mean_wasserstein<double>(set, r);
    CHECK(covreg::numerical_rank(m) == r);

    const MatrixXd q = draws.orthogonal(p);
    std::vector<SymMatd> moved;
    for (const auto& c : set) moved.push_back(c.congruence(q));
    CHECK(oracle::frob_rel(covreg::mean_wasserstein<double>(moved, r).matrix(), m.congruence(q).matrix()) < 1e-6);

    std::reverse(set.begin(), set.end());
    CHECK(oracle::frob_rel(covreg::mean_wasserstein<double>(set, r).matrix(), m.matrix()) < 1e-8);

    // The barycenter does not beat itself: nearby factors have larger cost.
    auto cost = [&](const SymMatd& x) {
      double acc = 0.0;
      for (const auto& c : set) acc += std::pow(oracle::dist_wasserstein(x, c), 2);
      return acc;
    };
    const MatrixXd y = covreg::factorize(m, r).matrix();
    for (int k = 0; k < 5; ++k) {
      const MatrixXd yp = y + 1e-3 * draws.gaussian(p, r);
      CHECK(cost(SymMatd(yp * yp.transpose())) >= cost(m) - 1e-10);
    }
  }
}

TEST_CASE("the affine-invariance witness on rank-deficient matrices") {
  const auto w = covreg::no_affine_invariance_witness<double>();
  CHECK(w.base_distance > 0.1);
  REQUIRE(w.distances.size() == 4);
  for (std::size_t i = 0; i + 1 < w.distances.size(); ++i) CHECK(w.distances[i + 1] < w.distances[i]);
  CHECK(w.distances.back() < 1e-2);
  // Independent evaluation of the same table.
  for (std::size_t i = 0; i < w.epsilons.size(); ++i) {
    MatrixXd wm = MatrixXd::Identity(2, 2);
    wm(1, 1) = w.epsilons[i];
    const SymMatd a(wm * w.a.matrix() * wm.transpose()), b(wm * w.b.matrix() * wm.transpose());
    CHECK(std::abs(w.distances[i] - oracle::dist_wasserstein(a, b)) < 1e-8);
  }
}

TEST_CASE("tangent embedding") {
  oracle::Draws draws(16);
  std::vector<SymMatd> set;
  for (int i = 0; i < 6; ++i) set.push_back(draws.spd(4));
  using covreg::EmbeddingKind;
  using covreg::TangentEmbedding;
  CHECK(TangentEmbedding<double>::fit(EmbeddingKind::Euclidean, set, 4).transform(set).cols() == 10);
  CHECK(TangentEmbedding<double>::fit(EmbeddingKind::GeometricTangent, set, 4).transform(set).cols() == 10);
  std::vector<SymMatd> low;
  for (int i = 0; i < 6; ++i) low.push_back(draws.psd_rank(4, 2));
  CHECK(TangentEmbedding<double>::fit(EmbeddingKind::WassersteinTangent, low, 2).transform(low).cols() == 8);
  CHECK_THROWS_AS((void)TangentEmbedding<double>::fit(EmbeddingKind::WassersteinTangent, set, 2), covreg::Error);
  CHECK(TangentEmbedding<double>::fit(EmbeddingKind::LogDiag, set, 4).transform(set).cols() == 4);

  const auto geo = TangentEmbedding<double>::fit(EmbeddingKind::GeometricTangent, set, 4);
  CHECK(oracle::frob_rel(geo.reference()->matrix(), covreg::mean_geometric<double>(set).matrix()) == 0.0);

  for (auto kind : {EmbeddingKind::Euclidean, EmbeddingKind::GeometricTangent, EmbeddingKind::WassersteinTangent,
                    EmbeddingKind::LogDiag}) {
    CHECK(covreg::parse_embedding_kind(covreg::to_string(kind)) == kind);
  }
  CHECK_THROWS_AS((void)covreg::parse_embedding_kind("riemann"), covreg::Error);
}
