#include <doctest.h>

#include <cmath>

#include "covreg/symmat.hpp"
#include "oracles.hpp"

using covreg::SymMatd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("construction symmetrizes and rejects bad shapes") {
  MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  const SymMatd s(m);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(SymMatd(MatrixXd::Zero(2, 3)), covreg::Error);
  CHECK_THROWS_AS(SymMatd(MatrixXd(0, 0)), covreg::Error);
}

TEST_CASE("eigh on identity and diagonal inputs") {
  const auto id = covreg::eigh(SymMatd::identity(3));
  CHECK(id.values.isApprox(VectorXd::Ones(3)));
  CHECK((id.vectors.cwiseAbs() - MatrixXd::Identity(3, 3)).norm() < 1e-14);

  VectorXd d(2);
  d << 2, 5;
  const auto diag = covreg::eigh(SymMatd::diagonal(d));
  CHECK(diag.values(0) == doctest::Approx(5.0));
  CHECK(diag.values(1) == doctest::Approx(2.0));
  MatrixXd perm(2, 2);
  perm << 0, 1, 1, 0;
  CHECK((diag.vectors - perm).norm() < 1e-14);
}

TEST_CASE("eigh reconstruction, orthonormality, ordering and sign convention") {
  oracle::Draws draws(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index p = trial == 0 ? 6 : draws.integer(1, 8);
    const SymMatd m(draws.symmetric(p) * draws.uniform(0.1, 10.0));
    const auto eig = covreg::eigh(m);
    const MatrixXd rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((rebuilt - m.matrix()).norm() <= 1e-10 * std::max(1.0, m.matrix().norm()));
    CHECK((eig.vectors.transpose() * eig.vectors - MatrixXd::Identity(p, p)).norm() < 1e-10);
    for (Eigen::Index j = 0; j + 1 < p; ++j) CHECK(eig.values(j) >= eig.values(j + 1));
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::Index arg = 0;
      eig.vectors.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(eig.vectors(arg, j) >= 0.0);
    }
  }
}

TEST_CASE("matrix functions: closed forms and round trips") {
  CHECK(covreg::log(SymMatd::identity(4)).matrix().norm() < 1e-15);

  VectorXd d(2);
  d << 4, 9;
  VectorXd r(2);
  r << 2, 3;
  CHECK((covreg::sqrt(SymMatd::diagonal(d)).matrix() - MatrixXd(r.asDiagonal())).norm() < 1e-14);

  oracle::Draws draws(11);
  const SymMatd s = draws.spd(5);
  CHECK(oracle::frob_rel(covreg::exp(covreg::log(s)).matrix(), s.matrix()) < 1e-8);

  // Independent exponential: Eigen's Pade/scaling-and-squaring on the log.
  const SymMatd l = covreg::log(s);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.matrix());
  const MatrixXd ref_log = es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
                           es.eigenvectors().transpose();
  CHECK(oracle::frob_rel(l.matrix(), ref_log) < 1e-10);

  for (int trial = 0; trial < 30; ++trial) {
    const SymMatd m = draws.spd(draws.integer(1, 7));
    const MatrixXd root = covreg::sqrt(m).matrix();
    CHECK(oracle::frob_rel(root * root, m.matrix()) < 1e-8);
    const MatrixXd isq = covreg::inv_sqrt(m).matrix();
    CHECK((isq * m.matrix() * isq - MatrixXd::Identity(m.dim(), m.dim())).norm() < 1e-8);
    CHECK((covreg::inv(m).matrix() * m.matrix() - MatrixXd::Identity(m.dim(), m.dim())).norm() < 1e-8);
  }
}

TEST_CASE("matrix function preconditions") {
  VectorXd d(2);
  d << 1, -1;
  CHECK_THROWS_AS((void)covreg::sqrt(SymMatd::diagonal(d)), covreg::Error);
  d << 1, 0;
  try {
    (void)covreg::log(SymMatd::diagonal(d));
    FAIL("log of a singular matrix should throw");
  } catch (const covreg::Error& e) {
    CHECK(e.kind() == covreg::ErrorKind::SingularMatrix);
  }
  // Round-off negatives are clipped, not rejected.
  d << 1, -1e-15;
  CHECK(covreg::sqrt(SymMatd::diagonal(d))(1, 1) == 0.0);
}

TEST_CASE("svd_rect") {
  const auto id = covreg::svd_rect(MatrixXd::Identity(3, 3));
  CHECK(id.sigma.isApprox(VectorXd::Ones(3)));

  oracle::Draws draws(3);
  VectorXd u = draws.gaussian(4);
  VectorXd v = draws.gaussian(3);
  u *= 2.0 / u.norm();
  v *= 3.0 / v.norm();
  const auto rank1 = covreg::svd_rect(MatrixXd(u * v.transpose()));
  CHECK(rank1.sigma(0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(rank1.sigma.tail(2).norm() < 1e-12);

  const MatrixXd m = draws.gaussian(4, 2);
  const auto f = covreg::svd_rect(m);
  CHECK(f.u.cols() == 2);
  CHECK((f.u * f.sigma.asDiagonal() * f.v.transpose() - m).norm() < 1e-10);
}

TEST_CASE("numerical_rank") {
  CHECK(covreg::numerical_rank(SymMatd::zero(4)) == 0);
  VectorXd d(3);
  d << 1, 1, 1e-16;
  CHECK(covreg::numerical_rank(SymMatd::diagonal(d)) == 2);

  oracle::Draws draws(5);
  CHECK(covreg::numerical_rank(draws.spd(5)) == 5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index p = draws.integer(2, 7);
    const Eigen::Index r = draws.integer(1, static_cast<int>(p));
    const SymMatd m = draws.psd_rank(p, r);
    const MatrixXd q = draws.orthogonal(p);
    CHECK(covreg::numerical_rank(m) == r);
    CHECK(covreg::numerical_rank(m.congruence(q)) == r);
  }
}
