#pragma once

#include <cmath>
#include <ostream>

namespace lrqmc {

/// Real quaternion q0 + q1 i + q2 j + q3 k.
struct Quaternion {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double a, double b, double c, double d) : q0(a), q1(b), q2(c), q3(d) {}

  static constexpr Quaternion real(double a) { return {a, 0.0, 0.0, 0.0}; }
  static constexpr Quaternion pure(double b, double c, double d) { return {0.0, b, c, d}; }

  constexpr bool is_pure() const { return q0 == 0.0; }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.q0 + b.q0, a.q1 + b.q1, a.q2 + b.q2, a.q3 + b.q3};
}

constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.q0 - b.q0, a.q1 - b.q1, a.q2 - b.q2, a.q3 - b.q3};
}

constexpr Quaternion operator-(const Quaternion& a) { return {-a.q0, -a.q1, -a.q2, -a.q3}; }

constexpr Quaternion operator*(double s, const Quaternion& a) {
  return {s * a.q0, s * a.q1, s * a.q2, s * a.q3};
}

/// Hamilton product: i^2 = j^2 = k^2 = ijk = -1, ij = k, jk = i, ki = j.
constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
          a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
          a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
          a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0};
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }

constexpr Quaternion quat_conj(const Quaternion& a) { return {a.q0, -a.q1, -a.q2, -a.q3}; }

constexpr double quat_norm2(const Quaternion& a) {
  return a.q0 * a.q0 + a.q1 * a.q1 + a.q2 * a.q2 + a.q3 * a.q3;
}

inline double quat_modulus(const Quaternion& a) { return std::sqrt(quat_norm2(a)); }

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.q0 << ", " << q.q1 << ", " << q.q2 << ", " << q.q3 << ')';
}

}  // namespace lrqmc
