#pragma once

#include <complex>

#include <Eigen/Dense>

#include "lrqmc/errors.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Complex adjoint of a quaternion matrix Q = Qa + Qb j:
///
///     f(Q) = [  Qa         Qb       ]
///            [ -conj(Qb)   conj(Qa) ]
///
/// Only the top blocks are stored, so every value of this type carries the
/// block structure exactly. Logical shape is 2M x 2N.
class AdjointMatrix {
 public:
  using Index = Eigen::Index;

  AdjointMatrix() = default;
  AdjointMatrix(CMatrix qa, CMatrix qb) : qa_(std::move(qa)), qb_(std::move(qb)) {
    detail::require_dims(qa_.rows() == qb_.rows() && qa_.cols() == qb_.cols(),
                         "AdjointMatrix: Qa and Qb differ in shape");
  }

  static AdjointMatrix zero(Index m, Index n) { return {CMatrix::Zero(m, n), CMatrix::Zero(m, n)}; }

  const CMatrix& qa() const { return qa_; }
  const CMatrix& qb() const { return qb_; }

  /// Quaternion shape (M, N).
  Index block_rows() const { return qa_.rows(); }
  Index block_cols() const { return qa_.cols(); }

  /// Logical complex shape (2M, 2N).
  Index rows() const { return 2 * qa_.rows(); }
  Index cols() const { return 2 * qa_.cols(); }

  CMatrix materialize() const {
    const Index m = qa_.rows(), n = qa_.cols();
    CMatrix full(2 * m, 2 * n);
    full.topLeftCorner(m, n) = qa_;
    full.topRightCorner(m, n) = qb_;
    full.bottomLeftCorner(m, n) = -qb_.conjugate();
    full.bottomRightCorner(m, n) = qa_.conjugate();
    return full;
  }

  /// f(Q)^H = f(Q^H).
  AdjointMatrix adjoint_h() const { return {qa_.adjoint(), -qb_.transpose()}; }

  /// Squared Frobenius norm of the full 2M x 2N matrix.
  double squared_norm() const { return 2.0 * (qa_.squaredNorm() + qb_.squaredNorm()); }

 private:
  CMatrix qa_;
  CMatrix qb_;
};

inline AdjointMatrix adjoint(const QuaternionMatrix& q) {
  const cdouble i(0.0, 1.0);
  CMatrix qa = q.plane(0).cast<cdouble>() + i * q.plane(1).cast<cdouble>();
  CMatrix qb = q.plane(2).cast<cdouble>() + i * q.plane(3).cast<cdouble>();
  return {std::move(qa), std::move(qb)};
}

inline QuaternionMatrix adjoint_inverse(const AdjointMatrix& c) {
  return {c.qa().real(), c.qa().imag(), c.qb().real(), c.qb().imag()};
}

/// Nearest structured matrix to a raw 2M x 2N complex matrix, in the
/// Frobenius sense: Qa = (C11 + conj C22)/2, Qb = (C12 - conj C21)/2.
inline AdjointMatrix structure_project(const CMatrix& c) {
  if (c.rows() % 2 != 0 || c.cols() % 2 != 0)
    throw DimensionError("structure_project: matrix dimensions must be even");
  const auto m = c.rows() / 2, n = c.cols() / 2;
  CMatrix qa = 0.5 * (c.topLeftCorner(m, n) + c.bottomRightCorner(m, n).conjugate());
  CMatrix qb = 0.5 * (c.topRightCorner(m, n) - c.bottomLeftCorner(m, n).conjugate());
  return {std::move(qa), std::move(qb)};
}

/// Relative Frobenius distance of a raw matrix from its structured projection.
inline double structure_defect(const CMatrix& c) {
  const double n = c.norm();
  if (n == 0.0) return 0.0;
  return (c - structure_project(c).materialize()).norm() / n;
}

/// f(P) f(Q) computed on the stored blocks:
///   (Pa + Pb j)(Qa + Qb j) = (Pa Qa - Pb conj Qb) + (Pa Qb + Pb conj Qa) j.
inline AdjointMatrix operator*(const AdjointMatrix& p, const AdjointMatrix& q) {
  detail::require_dims(p.block_cols() == q.block_rows(), "adjoint product: inner dimensions differ");
  CMatrix a = p.qa() * q.qa();
  a.noalias() -= p.qb() * q.qb().conjugate();
  CMatrix b = p.qa() * q.qb();
  b.noalias() += p.qb() * q.qa().conjugate();
  return {std::move(a), std::move(b)};
}

inline AdjointMatrix operator+(const AdjointMatrix& p, const AdjointMatrix& q) {
  detail::require_dims(p.block_rows() == q.block_rows() && p.block_cols() == q.block_cols(),
                       "adjoint sum: shape mismatch");
  return {p.qa() + q.qa(), p.qb() + q.qb()};
}

inline AdjointMatrix operator-(const AdjointMatrix& p, const AdjointMatrix& q) {
  detail::require_dims(p.block_rows() == q.block_rows() && p.block_cols() == q.block_cols(),
                       "adjoint difference: shape mismatch");
  return {p.qa() - q.qa(), p.qb() - q.qb()};
}

inline AdjointMatrix operator*(double s, const AdjointMatrix& p) { return {s * p.qa(), s * p.qb()}; }

/// Quaternion matrix product, evaluated through the adjoint homomorphism.
inline QuaternionMatrix qmat_mul(const QuaternionMatrix& p, const QuaternionMatrix& q) {
  detail::require_dims(p.cols() == q.rows(), "qmat_mul: inner dimensions differ");
  return adjoint_inverse(adjoint(p) * adjoint(q));
}

inline QuaternionMatrix operator*(const QuaternionMatrix& p, const QuaternionMatrix& q) {
  return qmat_mul(p, q);
}

}  // namespace lrqmc
