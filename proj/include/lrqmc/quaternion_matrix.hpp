#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>

#include <Eigen/Dense>

#include "lrqmc/errors.hpp"
#include "lrqmc/quaternion.hpp"

namespace lrqmc {

/// Dense M x N quaternion matrix stored as four real component planes
/// (q0, q1, q2, q3), each an M x N column-major Eigen matrix.
class QuaternionMatrix {
 public:
  using Plane = Eigen::MatrixXd;
  using Index = Eigen::Index;

  QuaternionMatrix() = default;

  QuaternionMatrix(Index rows, Index cols) {
    for (auto& p : planes_) p = Plane::Zero(rows, cols);
  }

  QuaternionMatrix(Plane q0, Plane q1, Plane q2, Plane q3)
      : planes_{std::move(q0), std::move(q1), std::move(q2), std::move(q3)} {
    for (const auto& p : planes_) {
      detail::require_dims(p.rows() == planes_[0].rows() && p.cols() == planes_[0].cols(),
                           "QuaternionMatrix: component planes differ in shape");
    }
  }

  static QuaternionMatrix zero(Index rows, Index cols) { return {rows, cols}; }

  static QuaternionMatrix identity(Index n) {
    QuaternionMatrix q(n, n);
    q.planes_[0].setIdentity();
    return q;
  }

  /// Entries with i.i.d. standard normal components.
  template <typename Rng>
  static QuaternionMatrix random_normal(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    QuaternionMatrix q(rows, cols);
    // Entry-major draw order keeps a fixed seed stable under layout changes.
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i)
        for (auto& p : q.planes_) p(i, j) = dist(rng);
    return q;
  }

  Index rows() const { return planes_[0].rows(); }
  Index cols() const { return planes_[0].cols(); }
  Index size() const { return rows() * cols(); }

  Quaternion operator()(Index i, Index j) const {
    return {planes_[0](i, j), planes_[1](i, j), planes_[2](i, j), planes_[3](i, j)};
  }

  void set(Index i, Index j, const Quaternion& q) {
    planes_[0](i, j) = q.q0;
    planes_[1](i, j) = q.q1;
    planes_[2](i, j) = q.q2;
    planes_[3](i, j) = q.q3;
  }

  const Plane& plane(std::size_t c) const { return planes_[c]; }
  Plane& plane(std::size_t c) { return planes_[c]; }

  bool is_pure() const { return (planes_[0].array() == 0.0).all(); }

  bool all_finite() const {
    for (const auto& p : planes_)
      if (!p.allFinite()) return false;
    return true;
  }

  /// Conjugate transpose.
  QuaternionMatrix adjoint_h() const {
    return {planes_[0].transpose(), -planes_[1].transpose(), -planes_[2].transpose(),
            -planes_[3].transpose()};
  }

  QuaternionMatrix& operator+=(const QuaternionMatrix& o) {
    check_same(o);
    for (std::size_t c = 0; c < 4; ++c) planes_[c] += o.planes_[c];
    return *this;
  }

  QuaternionMatrix& operator-=(const QuaternionMatrix& o) {
    check_same(o);
    for (std::size_t c = 0; c < 4; ++c) planes_[c] -= o.planes_[c];
    return *this;
  }

  QuaternionMatrix& operator*=(double s) {
    for (auto& p : planes_) p *= s;
    return *this;
  }

  friend QuaternionMatrix operator+(QuaternionMatrix a, const QuaternionMatrix& b) { return a += b; }
  friend QuaternionMatrix operator-(QuaternionMatrix a, const QuaternionMatrix& b) { return a -= b; }
  friend QuaternionMatrix operator*(double s, QuaternionMatrix a) { return a *= s; }

  friend bool operator==(const QuaternionMatrix& a, const QuaternionMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t c = 0; c < 4; ++c)
      if (a.planes_[c] != b.planes_[c]) return false;
    return true;
  }

 private:
  void check_same(const QuaternionMatrix& o) const {
    detail::require_dims(rows() == o.rows() && cols() == o.cols(),
                         "QuaternionMatrix: shape mismatch in elementwise operation");
  }

  std::array<Plane, 4> planes_;
};

inline double frobenius_norm2(const QuaternionMatrix& q) {
  double s = 0.0;
  for (std::size_t c = 0; c < 4; ++c) s += q.plane(c).squaredNorm();
  return s;
}

inline double frobenius_norm(const QuaternionMatrix& q) { return std::sqrt(frobenius_norm2(q)); }

}  // namespace lrqmc
