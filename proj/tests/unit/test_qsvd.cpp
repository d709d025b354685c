#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lrqmc;
using lrqmc::testkit::random_low_rank;
using lrqmc::testkit::random_q;
using lrqmc::testkit::rel_diff;
using lrqmc::testkit::unitarity_residual;

TEST(Qsvd, DiagonalInput) {
  QuaternionMatrix d(2, 2);
  d.set(0, 0, Quaternion::real(3));
  d.set(1, 1, Quaternion::real(2));
  const QSVDResult r = qsvd(d);
  ASSERT_EQ(r.rank, 2);
  EXPECT_NEAR(r.sigma[0], 3.0, 1e-14);
  EXPECT_NEAR(r.sigma[1], 2.0, 1e-14);
  EXPECT_LE(rel_diff(r.reconstruct(), d), 1e-14);
}

TEST(Qsvd, ZeroMatrix) {
  const QSVDResult r = qsvd(QuaternionMatrix::zero(3, 3));
  EXPECT_EQ(r.rank, 0);
  EXPECT_TRUE(r.sigma.empty());
  EXPECT_LE(unitarity_residual(r.a), 1e-14);
  EXPECT_LE(unitarity_residual(r.b), 1e-14);
}

TEST(Qsvd, RandomReconstructionAndUnitarity) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const QuaternionMatrix q = random_q(6, 5, rng);
    const QSVDResult r = qsvd(q);
    EXPECT_EQ(r.rank, 5);
    EXPECT_LE(frobenius_norm(r.reconstruct() - q) / frobenius_norm(q), 1e-10);
    EXPECT_LE(unitarity_residual(r.a), 1e-10);
    EXPECT_LE(unitarity_residual(r.b), 1e-10);
    EXPECT_TRUE(std::is_sorted(r.sigma.rbegin(), r.sigma.rend()));
  }
}

TEST(Qsvd, WideAndRankDeficient) {
  std::mt19937_64 rng(22);
  const QuaternionMatrix q = random_low_rank(4, 9, 2, rng);
  const QSVDResult r = qsvd(q);
  EXPECT_EQ(r.rank, 2);
  EXPECT_EQ(r.a.rows(), 4);
  EXPECT_EQ(r.b.rows(), 9);
  EXPECT_LE(rel_diff(r.reconstruct(), q), 1e-10);
  EXPECT_LE(unitarity_residual(r.a), 1e-10);
  EXPECT_LE(unitarity_residual(r.b), 1e-10);
}

TEST(Qsvd, RepeatedSingularValues) {
  // Identity has one singular value of multiplicity 3 (6 in the adjoint);
  // the paired vectors must still come out quaternion-orthonormal.
  const QSVDResult r = qsvd(QuaternionMatrix::identity(3));
  EXPECT_EQ(r.rank, 3);
  for (double s : r.sigma) EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_LE(unitarity_residual(r.a), 1e-12);
  EXPECT_LE(rel_diff(r.reconstruct(), QuaternionMatrix::identity(3)), 1e-12);

  // A random unitary times 2 * I_2 (+) I_2 keeps two clusters.
  std::mt19937_64 rng(23);
  const QSVDResult u = qsvd(random_q(4, 4, rng));
  QuaternionMatrix d(4, 4);
  for (int i = 0; i < 4; ++i) d.set(i, i, Quaternion::real(i < 2 ? 2.0 : 1.0));
  const QuaternionMatrix q = u.a * d * u.b;
  const QSVDResult r2 = qsvd(q);
  EXPECT_EQ(r2.rank, 4);
  EXPECT_LE(rel_diff(r2.reconstruct(), q), 1e-12);
  EXPECT_LE(unitarity_residual(r2.a), 1e-12);
  EXPECT_LE(unitarity_residual(r2.b), 1e-12);
}

TEST(Qrank, Examples) {
  EXPECT_EQ(qrank(QuaternionMatrix::identity(3)), 3);
  EXPECT_EQ(qrank(QuaternionMatrix::zero(2, 5)), 0);

  std::mt19937_64 rng(24);
  const QuaternionMatrix col = random_q(6, 1, rng), row = random_q(1, 4, rng);
  const QuaternionMatrix outer = col * row;
  EXPECT_EQ(qrank(outer), 1);
  EXPECT_LE(qrank(outer), std::min(qrank(col), qrank(row)));

  const QuaternionMatrix a = random_q(8, 3, rng), b = random_q(3, 8, rng);
  const QuaternionMatrix ab = a * b;
  EXPECT_EQ(qrank(ab), 3);
  EXPECT_EQ(qsvd(ab).rank, 3);
}

TEST(Qrank, DoublingAndPairing) {
  std::mt19937_64 rng(25);
  for (Eigen::Index k = 1; k <= 4; ++k) {
    const QuaternionMatrix q = random_low_rank(10, 7, k, rng);
    const Eigen::VectorXd sv = adjoint_singular_values(q);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > kDefaultRankTol * sv(0)) ++count;
    EXPECT_EQ(count, 2 * k);
    EXPECT_EQ(qrank(q), k);
    for (Eigen::Index t = 0; 2 * t + 1 < sv.size(); ++t)
      EXPECT_LE(std::abs(sv(2 * t) - sv(2 * t + 1)), 1e-10 * sv(0));
  }
}

TEST(Qsvd, ConstructiveFactorization) {
  // U = A_1 (first K columns), V = Sigma_K B_1 (first K rows) reproduces X.
  std::mt19937_64 rng(26);
  const Eigen::Index k = 3;
  const QuaternionMatrix x = random_low_rank(7, 6, k, rng);
  const QSVDResult r = qsvd(x);
  ASSERT_EQ(r.rank, k);
  QuaternionMatrix u(7, k), v(k, 6);
  for (std::size_t c = 0; c < 4; ++c) {
    u.plane(c) = r.a.plane(c).leftCols(k);
    v.plane(c) = r.b.plane(c).topRows(k);
  }
  for (Eigen::Index t = 0; t < k; ++t)
    for (std::size_t c = 0; c < 4; ++c) v.plane(c).row(t) *= r.sigma[static_cast<std::size_t>(t)];
  EXPECT_LE(rel_diff(u * v, x), 1e-10);
  EXPECT_EQ(qrank(u), k);
  EXPECT_EQ(qrank(v), k);
}
