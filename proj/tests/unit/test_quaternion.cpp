#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lrqmc;

namespace {

void expect_quat_eq(const Quaternion& a, const Quaternion& b, double tol = 0.0) {
  EXPECT_NEAR(a.q0, b.q0, tol);
  EXPECT_NEAR(a.q1, b.q1, tol);
  EXPECT_NEAR(a.q2, b.q2, tol);
  EXPECT_NEAR(a.q3, b.q3, tol);
}

const Quaternion kI{0, 1, 0, 0};
const Quaternion kJ{0, 0, 1, 0};
const Quaternion kK{0, 0, 0, 1};

}  // namespace

TEST(QuatMul, UnitRules) {
  expect_quat_eq(quat_mul(kI, kJ), kK);
  expect_quat_eq(quat_mul(kJ, kI), -kK);
  expect_quat_eq(quat_mul(kJ, kK), kI);
  expect_quat_eq(quat_mul(kK, kI), kJ);
  expect_quat_eq(quat_mul(kI, kI), Quaternion::real(-1));
  expect_quat_eq(quat_mul(kJ, kJ), Quaternion::real(-1));
  expect_quat_eq(quat_mul(kK, kK), Quaternion::real(-1));
  expect_quat_eq(quat_mul(quat_mul(kI, kJ), kK), Quaternion::real(-1));
}

TEST(QuatMul, IdentityElement) {
  const Quaternion q{-1.5, 2.25, 0.5, 7};
  expect_quat_eq(quat_mul(Quaternion::real(1), q), q);
  expect_quat_eq(quat_mul(q, Quaternion::real(1)), q);
}

TEST(QuatMul, HandExpandedProduct) {
  // Expanded term by term with ij = k, jk = i, ki = j.
  expect_quat_eq(quat_mul({1, 2, 3, 4}, {5, 6, 7, 8}), {-60, 12, 30, 24});
  expect_quat_eq(quat_mul({5, 6, 7, 8}, {1, 2, 3, 4}), {-60, 20, 14, 32});
}

TEST(QuatConj, Definition) {
  expect_quat_eq(quat_conj({1, 2, 3, 4}), {1, -2, -3, -4});
  expect_quat_eq(quat_conj({5, 0, 0, 0}), {5, 0, 0, 0});
}

TEST(QuatConj, ReversesProducts) {
  const Quaternion a{1, 2, 3, 4}, b{5, 6, 7, 8};
  expect_quat_eq(quat_conj(quat_mul(a, b)), {-60, -12, -30, -24});
  expect_quat_eq(quat_mul(quat_conj(b), quat_conj(a)), {-60, -12, -30, -24});
}

TEST(QuatModulus, Values) {
  EXPECT_DOUBLE_EQ(quat_modulus({1, 1, 1, 1}), 2.0);
  EXPECT_NEAR(quat_modulus({1, 2, 3, 4}), 5.477226, 1e-6);
  EXPECT_DOUBLE_EQ(quat_modulus({0, 0, 0, 0}), 0.0);
}

TEST(QuatProperties, RandomInvariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const Quaternion a{u(rng), u(rng), u(rng), u(rng)};
    const Quaternion b{u(rng), u(rng), u(rng), u(rng)};
    EXPECT_EQ(quat_conj(quat_conj(a)), a);
    const Quaternion n = quat_mul(a, quat_conj(a));
    EXPECT_NEAR(n.q0, quat_norm2(a), 1e-12 * quat_norm2(a));
    EXPECT_NEAR(n.q1, 0.0, 1e-12 * quat_norm2(a));
    EXPECT_NEAR(n.q2, 0.0, 1e-12 * quat_norm2(a));
    EXPECT_NEAR(n.q3, 0.0, 1e-12 * quat_norm2(a));
    // |ab| = |a||b|
    EXPECT_NEAR(quat_modulus(quat_mul(a, b)), quat_modulus(a) * quat_modulus(b), 1e-10 * quat_modulus(a) * quat_modulus(b));
    EXPECT_GE(quat_modulus(a), 0.0);
  }
}

TEST(QuaternionMatrix, FrobeniusAndPurity) {
  QuaternionMatrix q(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) q.set(i, j, {1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(frobenius_norm(q), 4.0);
  EXPECT_FALSE(q.is_pure());
  EXPECT_DOUBLE_EQ(frobenius_norm(QuaternionMatrix::zero(3, 2)), 0.0);
  q.plane(0).setZero();
  EXPECT_TRUE(q.is_pure());
}

TEST(QuaternionMatrix, FrobeniusIsSumOfModuli) {
  std::mt19937_64 rng(3);
  const QuaternionMatrix q = testkit::random_q(5, 4, rng);
  double s = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j) s += quat_norm2(q(i, j));
  EXPECT_NEAR(frobenius_norm2(q), s, 1e-12 * s);
}

TEST(QuaternionMatrix, ShapeMismatchThrows) {
  QuaternionMatrix a(2, 3), b(3, 2);
  EXPECT_THROW(a += b, DimensionError);
}
