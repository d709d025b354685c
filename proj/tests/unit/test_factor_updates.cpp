#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lrqmc;
using lrqmc::testkit::random_q;
using lrqmc::testkit::rel_diff;

namespace {

QuaternionMatrix scalar(Quaternion q) {
  QuaternionMatrix m(1, 1);
  m.set(0, 0, q);
  return m;
}

QuaternionMatrix take_cols(const QuaternionMatrix& q, Eigen::Index k) {
  return {q.plane(0).leftCols(k), q.plane(1).leftCols(k), q.plane(2).leftCols(k), q.plane(3).leftCols(k)};
}

QuaternionMatrix take_rows(const QuaternionMatrix& q, Eigen::Index k) {
  return {q.plane(0).topRows(k), q.plane(1).topRows(k), q.plane(2).topRows(k), q.plane(3).topRows(k)};
}

FactorPair random_pair(Eigen::Index m, Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  return {adjoint(random_q(m, k, rng)), adjoint(random_q(k, n, rng))};
}

double nuclear_norm(const CMatrix& c) { return Eigen::JacobiSVD<CMatrix>(c).singularValues().sum(); }

}  // namespace

TEST(Objective, ZeroAndExactCases) {
  const FactorPair zero{AdjointMatrix::zero(3, 2), AdjointMatrix::zero(2, 4)};
  EXPECT_EQ(objective(zero, QuaternionMatrix::zero(3, 4), 0.7), 0.0);

  std::mt19937_64 rng(2);
  const FactorPair p = random_pair(5, 4, 2, rng);
  const QuaternionMatrix x = adjoint_inverse(p.product());
  EXPECT_NEAR(objective(p, x, 0.0), 0.0, 1e-20);
}

TEST(Objective, UnitScalars) {
  // f(1) = I_2: fit term 0, regularizer (lambda/2)(2 + 2)
  const FactorPair one{adjoint(scalar(Quaternion::real(1))), adjoint(scalar(Quaternion::real(1)))};
  EXPECT_DOUBLE_EQ(objective(one, scalar(Quaternion::real(1)), 1.0), 2.0);
  // fit residual f(1) - f(0) = I_2 contributes 1
  EXPECT_DOUBLE_EQ(objective(one, scalar({}), 0.0), 1.0);
}

TEST(FactorUpdate, ScalarExamples) {
  const QuaternionMatrix x = scalar({1, 1, 0, 0});
  const FactorPair unit{adjoint(scalar(Quaternion::real(1))), adjoint(scalar(Quaternion::real(1)))};
  const QuaternionMatrix u = adjoint_inverse(update_factor_u(unit, x, 1.0));
  const QuaternionMatrix v = adjoint_inverse(update_factor_v(unit, x, 1.0));
  EXPECT_NEAR(rel_diff(u, scalar({0.5, 0.5, 0, 0})), 0.0, 1e-15);
  EXPECT_NEAR(rel_diff(v, scalar({0.5, 0.5, 0, 0})), 0.0, 1e-15);
}

TEST(FactorUpdate, LargeLambdaShrinksToZero) {
  std::mt19937_64 rng(3);
  const FactorPair p = random_pair(6, 5, 2, rng);
  const QuaternionMatrix x = random_q(6, 5, rng);
  const double fx = std::sqrt(adjoint(x).squared_norm());
  EXPECT_LE(std::sqrt(update_factor_u(p, x, 1e12).squared_norm()), 1e-9 * fx);
  EXPECT_LE(std::sqrt(update_factor_v(p, x, 1e12).squared_norm()), 1e-9 * fx);
}

TEST(FactorUpdate, IdentityEmbeddedFactorWithoutRegularizer) {
  std::mt19937_64 rng(4);
  const QuaternionMatrix x = random_q(7, 5, rng);
  const Eigen::Index k = 3;
  const QuaternionMatrix v = take_rows(QuaternionMatrix::identity(5), k);
  const FactorPair p{adjoint(random_q(7, k, rng)), adjoint(v)};
  const CMatrix u = update_factor_u(p, x, 0.0).materialize();
  EXPECT_LE(rel_diff(u, adjoint(take_cols(x, k)).materialize()), 1e-13);

  const QuaternionMatrix ue = take_cols(QuaternionMatrix::identity(7), k);
  const FactorPair q{adjoint(ue), adjoint(random_q(k, 5, rng))};
  const CMatrix vv = update_factor_v(q, x, 0.0).materialize();
  EXPECT_LE(rel_diff(vv, adjoint(take_rows(x, k)).materialize()), 1e-13);
}

TEST(FactorUpdate, RawUpdatesKeepAdjointStructure) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const FactorPair p = random_pair(8, 6, 3, rng);
    const QuaternionMatrix x = random_q(8, 6, rng);
    for (double lambda : {0.0, 1e-3, 0.5, 10.0}) {
      EXPECT_LE(structure_defect(detail::update_factor_u_raw(p, x, lambda)), 1e-12);
      EXPECT_LE(structure_defect(detail::update_factor_v_raw(p, x, lambda)), 1e-12);
    }
  }
}

TEST(FactorUpdate, UpdatesSatisfyStationarity) {
  std::mt19937_64 rng(6);
  for (double lambda : {1e-3, 0.5, 3.0}) {
    FactorPair p = random_pair(9, 7, 3, rng);
    const QuaternionMatrix x = random_q(9, 7, rng);
    const double fx = std::sqrt(adjoint(x).squared_norm());

    p.u = update_factor_u(p, x, lambda);
    const double scale_u = fx * std::sqrt(p.v.squared_norm());
    EXPECT_LE(kkt_residuals(p, x, lambda).u_stationarity, 1e-10 * scale_u);

    p.v = update_factor_v(p, x, lambda);
    const double scale_v = fx * std::sqrt(p.u.squared_norm());
    EXPECT_LE(kkt_residuals(p, x, lambda).v_stationarity, 1e-10 * scale_v);
  }
}

TEST(FactorUpdate, EachUpdateLowersObjective) {
  std::mt19937_64 rng(7);
  FactorPair p = random_pair(10, 8, 4, rng);
  const QuaternionMatrix x = random_q(10, 8, rng);
  double g = objective(p, x, 0.5);
  for (int i = 0; i < 10; ++i) {
    p.u = update_factor_u(p, x, 0.5);
    const double gu = objective(p, x, 0.5);
    EXPECT_LE(gu, g * (1 + 1e-12));
    p.v = update_factor_v(p, x, 0.5);
    const double gv = objective(p, x, 0.5);
    EXPECT_LE(gv, gu * (1 + 1e-12));
    g = gv;
  }
}

TEST(FactorUpdate, RejectsNegativeLambdaAndBadShapes) {
  std::mt19937_64 rng(8);
  const FactorPair p = random_pair(4, 3, 2, rng);
  EXPECT_THROW(update_factor_u(p, random_q(4, 3, rng), -1.0), ConfigError);
  EXPECT_THROW(update_factor_u(p, random_q(3, 3, rng), 0.5), DimensionError);
  EXPECT_THROW(update_factor_v(p, random_q(4, 5, rng), 0.5), DimensionError);
}

TEST(Completion, ObservedEntriesAreCopied) {
  std::mt19937_64 rng(9);
  const FactorPair p = random_pair(6, 6, 2, rng);
  const QuaternionMatrix t = random_q(6, 6, rng);
  const QuaternionMatrix uv = adjoint_inverse(p.product());

  EXPECT_EQ(update_completion(p, t, ObservationMask::full(6, 6)), t);
  EXPECT_LE(rel_diff(update_completion(p, t, ObservationMask(6, 6, {})), uv), 1e-15);

  const ObservationMask om = sample_mask(6, 6, 0.5, 3);
  const QuaternionMatrix x = update_completion(p, t, om);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) {
      if (om.contains(i, j))
        EXPECT_EQ(x(i, j), t(i, j));
      else
        EXPECT_NEAR(quat_modulus(x(i, j) - uv(i, j)), 0.0, 1e-13);
    }
}

TEST(Completion, TwoByTwoExample) {
  // UV = [[1, 2], [3, 4]] as reals; T observed only at (0, 0) with value 9
  QuaternionMatrix uvq(2, 2);
  uvq.plane(0) << 1, 2, 3, 4;
  const FactorPair p{adjoint(uvq), adjoint(QuaternionMatrix::identity(2))};
  QuaternionMatrix t(2, 2);
  t.set(0, 0, {9, 0, 0, 0});
  const QuaternionMatrix x = update_completion(p, t, ObservationMask(2, 2, {{0, 0}}));
  Eigen::MatrixXd expect(2, 2);
  expect << 9, 2, 3, 4;
  EXPECT_LE((x.plane(0) - expect).norm(), 1e-14);
  EXPECT_EQ(x.plane(1).norm() + x.plane(2).norm() + x.plane(3).norm(), 0.0);
}

TEST(Factorization, BalancedFactorsAttainNuclearNorm) {
  std::mt19937_64 rng(10);
  const QuaternionMatrix x = random_q(6, 5, rng);
  const double nuc = nuclear_norm(adjoint(x).materialize());

  const QSVDResult s = qsvd(x);
  ASSERT_EQ(s.rank, 5);
  QuaternionMatrix u = take_cols(s.a, 5);
  QuaternionMatrix v = take_rows(s.b, 5);
  for (Eigen::Index t = 0; t < 5; ++t) {
    const double r = std::sqrt(s.sigma[static_cast<std::size_t>(t)]);
    for (std::size_t c = 0; c < 4; ++c) {
      u.plane(c).col(t) *= r;
      v.plane(c).row(t) *= r;
    }
  }
  const AdjointMatrix fu = adjoint(u), fv = adjoint(v);
  EXPECT_LE(rel_diff((fu * fv).materialize(), adjoint(x).materialize()), 1e-10);
  const double balanced = 0.5 * (fu.squared_norm() + fv.squared_norm());
  EXPECT_NEAR(balanced, nuc, 1e-10 * nuc);

  // any other factorization of the same X costs at least as much
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix g = adjoint(random_q(5, 5, rng)).materialize();
    const CMatrix gu = fu.materialize() * g;
    const CMatrix gv = g.inverse() * fv.materialize();
    EXPECT_LE(rel_diff(gu * gv, adjoint(x).materialize()), 1e-8);
    EXPECT_GE(0.5 * (gu.squaredNorm() + gv.squaredNorm()), nuc - 1e-8);
  }
}
