#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lrqmc/adjoint.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// Default relative threshold (against the largest singular value) for
/// numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-10;

struct QSVDResult {
  QuaternionMatrix a;           // M x M unitary
  std::vector<double> sigma;    // K values, non-increasing, all > tol * sigma_1
  QuaternionMatrix b;           // N x N unitary
  Eigen::Index rank = 0;        // K

  /// M x N real matrix with sigma on the leading diagonal.
  QuaternionMatrix sigma_matrix() const {
    QuaternionMatrix s(a.cols(), b.rows());
    for (std::size_t t = 0; t < sigma.size(); ++t) {
      const auto i = static_cast<Eigen::Index>(t);
      s.plane(0)(i, i) = sigma[t];
    }
    return s;
  }

  QuaternionMatrix reconstruct() const { return a * sigma_matrix() * b; }
};

namespace detail {

// A quaternion column vector q = qa + qb j is handled through the first column
// of its adjoint, c = [qa; -conj(qb)]. The second adjoint column is J c with
// J [x; y] = [-conj(y); conj(x)]. Quaternion orthogonality of q and p is
// complex orthogonality of c against both p_c and J p_c.
inline CVector j_partner(const CVector& c) {
  const auto m = c.size() / 2;
  CVector out(c.size());
  out.head(m) = -c.tail(m).conjugate();
  out.tail(m) = c.head(m).conjugate();
  return out;
}

/// Growing quaternion-orthonormal set, kept as the complex orthonormal
/// columns [c_1, J c_1, c_2, J c_2, ...].
class QuaternionBasis {
 public:
  explicit QuaternionBasis(Eigen::Index complex_dim) : dim_(complex_dim) {}

  Eigen::Index size() const { return static_cast<Eigen::Index>(vectors_.size()); }

  CVector residual(const CVector& v) const {
    CVector r = v;
    // Two classical Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& c : vectors_) {
        r -= c * c.dot(r);
        const CVector jc = j_partner(c);
        r -= jc * jc.dot(r);
      }
    }
    return r;
  }

  /// Orthogonalizes v against the set, normalizes it and appends it.
  void accept(const CVector& v) {
    CVector r = residual(v);
    r /= r.norm();
    r = residual(r);
    r /= r.norm();
    vectors_.push_back(std::move(r));
  }

  /// Greedily extends the basis from candidate columns until it holds
  /// `target` vectors or the candidates are exhausted.
  void extend_from(const CMatrix& candidates, Eigen::Index target) {
    std::vector<bool> used(static_cast<std::size_t>(candidates.cols()), false);
    while (size() < target) {
      Eigen::Index best = -1;
      double best_norm = 0.0;
      for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double n = residual(candidates.col(j)).norm() / std::max(candidates.col(j).norm(), 1e-300);
        if (n > best_norm) {
          best_norm = n;
          best = j;
        }
      }
      if (best < 0 || best_norm < 1e-8) break;
      used[static_cast<std::size_t>(best)] = true;
      accept(candidates.col(best));
    }
  }

  /// Quaternion matrix whose columns are the accepted vectors.
  QuaternionMatrix as_columns() const {
    const auto m = dim_ / 2;
    QuaternionMatrix q(m, size());
    for (Eigen::Index t = 0; t < size(); ++t) {
      const CVector& c = vectors_[static_cast<std::size_t>(t)];
      q.plane(0).col(t) = c.head(m).real();
      q.plane(1).col(t) = c.head(m).imag();
      q.plane(2).col(t) = -c.tail(m).real();
      q.plane(3).col(t) = c.tail(m).imag();
    }
    return q;
  }

  /// Completes to a full quaternion basis using the real unit vectors.
  void complete() {
    const auto m = dim_ / 2;
    extend_from(CMatrix::Identity(dim_, m), m);
  }

 private:
  Eigen::Index dim_;
  std::vector<CVector> vectors_;
};

inline CVector as_complex_column(const QuaternionMatrix& q, Eigen::Index col) {
  const auto m = q.rows();
  CVector c(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    c(i) = cdouble(q.plane(0)(i, col), q.plane(1)(i, col));
    c(m + i) = cdouble(-q.plane(2)(i, col), q.plane(3)(i, col));
  }
  return c;
}

/// Quaternion-orthonormal left singular vectors, one per singular-value pair.
/// `left` holds complex left singular vectors of a structured matrix, sorted
/// by `sv`; the first 2K of them span the top K pairs. Within a cluster of
/// (numerically) equal pairs the paired columns are not individually
/// structured, so each pick takes the candidate with the largest residual.
inline QuaternionBasis paired_left_vectors(const CMatrix& left, const Eigen::VectorXd& sv, Eigen::Index k,
                                           double cluster_tol = 1e-8) {
  QuaternionBasis basis(left.rows());
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index t = 0;
  while (t < k) {
    Eigen::Index end = t + 1;
    while (end < k && std::abs(sv(2 * end) - sv(2 * t)) <= cluster_tol * top) ++end;
    const auto first = 2 * t;
    const auto count = std::min<Eigen::Index>(2 * (end - t), left.cols() - first);
    basis.extend_from(left.middleCols(first, count), end);
    if (basis.size() < end) throw NumericalError("qsvd: singular vectors do not pair up");
    t = end;
  }
  return basis;
}

inline QuaternionMatrix orthonormalize_rows(const QuaternionMatrix& rows) {
  const QuaternionMatrix cols = rows.adjoint_h();
  QuaternionBasis basis(2 * cols.rows());
  for (Eigen::Index j = 0; j < cols.cols(); ++j) basis.accept(as_complex_column(cols, j));
  return basis.as_columns().adjoint_h();
}

inline Eigen::Index count_above(const Eigen::VectorXd& values, double threshold) {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > threshold) ++n;
  return n;
}

}  // namespace detail

/// Singular values of f(Q), non-increasing. They come in equal pairs.
inline Eigen::VectorXd adjoint_singular_values(const QuaternionMatrix& q) {
  if (q.size() == 0) return {};
  return Eigen::BDCSVD<CMatrix>(adjoint(q).materialize()).singularValues();
}

/// Quaternion rank: half the numerical rank of f(Q), counting singular
/// values above tol * sigma_1. A pair split by the threshold counts once.
inline Eigen::Index qrank(const QuaternionMatrix& q, double tol = kDefaultRankTol) {
  const Eigen::VectorXd sv = adjoint_singular_values(q);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return (detail::count_above(sv, tol * sv(0)) + 1) / 2;
}

/// Quaternion SVD Q = A diag(sigma) B through the complex SVD of f(Q).
inline QSVDResult qsvd(const QuaternionMatrix& q, double tol = kDefaultRankTol) {
  const auto m = q.rows(), n = q.cols();
  QSVDResult out;
  Eigen::Index k = 0;
  detail::QuaternionBasis left_basis(2 * m);

  if (q.size() > 0) {
    Eigen::BDCSVD<CMatrix> svd(adjoint(q).materialize(), Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(0) > 0.0) {
      for (Eigen::Index t = 0; 2 * t < sv.size(); ++t)
        if (sv(2 * t) > tol * sv(0)) ++k;
    }
    left_basis = detail::paired_left_vectors(svd.matrixU(), sv, k);
    for (Eigen::Index t = 0; t < k; ++t) out.sigma.push_back(sv(2 * t));
  }

  const QuaternionMatrix a_k = left_basis.as_columns();
  QuaternionMatrix b_rows(k, n);
  if (k > 0) {
    b_rows = a_k.adjoint_h() * q;
    for (Eigen::Index t = 0; t < k; ++t) {
      const double inv = 1.0 / out.sigma[static_cast<std::size_t>(t)];
      for (std::size_t c = 0; c < 4; ++c) b_rows.plane(c).row(t) *= inv;
    }
    b_rows = detail::orthonormalize_rows(b_rows);
  }

  left_basis.complete();
  out.a = left_basis.as_columns();

  const QuaternionMatrix b_cols = b_rows.adjoint_h();
  detail::QuaternionBasis right_basis(2 * n);
  for (Eigen::Index j = 0; j < k; ++j) right_basis.accept(detail::as_complex_column(b_cols, j));
  right_basis.complete();
  out.b = right_basis.as_columns().adjoint_h();
  out.rank = k;
  return out;
}

}  // namespace lrqmc
