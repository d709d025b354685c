#pragma once

#include <Eigen/Dense>

#include "lrqmc/adjoint.hpp"
#include "lrqmc/errors.hpp"
#include "lrqmc/mask.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// Lifted factors f(U) (2M x r) and f(V) (r x 2N), r = 2K.
struct FactorPair {
  AdjointMatrix u;  // quaternion M x K
  AdjointMatrix v;  // quaternion K x N

  Eigen::Index rank() const { return u.cols(); }
  AdjointMatrix product() const { return u * v; }
};

/// Observed entries of T on Omega, zero elsewhere.
inline QuaternionMatrix zero_fill(const QuaternionMatrix& t, const ObservationMask& omega) {
  return project_omega(t, omega);
}

/// G = 1/2 ||f(U) f(V) - f(X)||^2 + lambda/2 (||f(U)||^2 + ||f(V)||^2), with
/// f(U) f(V) and f(X) already formed.
inline double objective_from_product(const FactorPair& pair, const AdjointMatrix& uv, const AdjointMatrix& fx,
                                     double lambda) {
  detail::require_dims(uv.block_rows() == fx.block_rows() && uv.block_cols() == fx.block_cols(),
                       "objective: factor product and X differ in shape");
  const double fit = 2.0 * ((uv.qa() - fx.qa()).squaredNorm() + (uv.qb() - fx.qb()).squaredNorm());
  return 0.5 * fit + 0.5 * lambda * (pair.u.squared_norm() + pair.v.squared_norm());
}

inline double objective_from_product(const FactorPair& pair, const AdjointMatrix& uv, const QuaternionMatrix& x,
                                     double lambda) {
  return objective_from_product(pair, uv, adjoint(x), lambda);
}

inline double objective(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  return objective_from_product(pair, pair.product(), adjoint(x), lambda);
}

namespace detail {

/// Solves (G + lambda I) Y = rhs for Hermitian positive semidefinite G.
/// lambda > 0: Cholesky. lambda = 0: eigenvalue pseudoinverse with
/// threshold 1e-12 * largest eigenvalue.
inline CMatrix regularized_solve(const CMatrix& gram, double lambda, const CMatrix& rhs) {
  if (lambda < 0.0) throw ConfigError("regularizer lambda must be non-negative");
  if (lambda > 0.0) {
    CMatrix g = gram;
    g.diagonal().array() += lambda;
    Eigen::LLT<CMatrix> llt(g);
    if (llt.info() != Eigen::Success) throw NumericalError("regularized_solve: Cholesky factorization failed");
    return llt.solve(rhs);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericalError("regularized_solve: eigendecomposition failed");
  const Eigen::VectorXd& w = eig.eigenvalues();
  const double cut = 1e-12 * (w.size() ? w.cwiseAbs().maxCoeff() : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > cut) inv(i) = 1.0 / w(i);
  const CMatrix& q = eig.eigenvectors();
  return q * inv.asDiagonal() * (q.adjoint() * rhs);
}

/// f(X) f(V)^H (f(V) f(V)^H + lambda I)^+ before structure projection.
inline CMatrix update_factor_u_raw(const FactorPair& pair, const AdjointMatrix& fx, double lambda) {
  detail::require_dims(pair.v.block_cols() == fx.block_cols() && pair.u.block_rows() == fx.block_rows(),
                       "update_factor_u: factor and data shapes differ");
  const AdjointMatrix vh = pair.v.adjoint_h();
  const CMatrix gram = (pair.v * vh).materialize();
  const CMatrix b = (fx * vh).materialize();
  // Y (G + lambda I) = B with G Hermitian  <=>  (G + lambda I) Y^H = B^H
  return regularized_solve(gram, lambda, b.adjoint()).adjoint();
}

/// (f(U)^H f(U) + lambda I)^+ f(U)^H f(X) before structure projection.
inline CMatrix update_factor_v_raw(const FactorPair& pair, const AdjointMatrix& fx, double lambda) {
  detail::require_dims(pair.u.block_rows() == fx.block_rows() && pair.v.block_cols() == fx.block_cols(),
                       "update_factor_v: factor and data shapes differ");
  const AdjointMatrix uh = pair.u.adjoint_h();
  const CMatrix gram = (uh * pair.u).materialize();
  const CMatrix rhs = (uh * fx).materialize();
  return regularized_solve(gram, lambda, rhs);
}

inline CMatrix update_factor_u_raw(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  return update_factor_u_raw(pair, adjoint(x), lambda);
}

inline CMatrix update_factor_v_raw(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  return update_factor_v_raw(pair, adjoint(x), lambda);
}

}  // namespace detail

/// Ridge least-squares update of f(U) with f(V) and X fixed.
inline AdjointMatrix update_factor_u(const FactorPair& pair, const AdjointMatrix& fx, double lambda) {
  return structure_project(detail::update_factor_u_raw(pair, fx, lambda));
}

inline AdjointMatrix update_factor_u(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  return update_factor_u(pair, adjoint(x), lambda);
}

/// Ridge least-squares update of f(V) with f(U) and X fixed.
inline AdjointMatrix update_factor_v(const FactorPair& pair, const AdjointMatrix& fx, double lambda) {
  return structure_project(detail::update_factor_v_raw(pair, fx, lambda));
}

inline AdjointMatrix update_factor_v(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  return update_factor_v(pair, adjoint(x), lambda);
}

/// X = P_{Omega^c}(f^{-1}(uv)) + P_Omega(T). Observed entries are copied
/// from T verbatim.
inline QuaternionMatrix completion_from_product(const AdjointMatrix& uv, const QuaternionMatrix& t,
                                                const ObservationMask& omega) {
  detail::require_dims(uv.block_rows() == t.rows() && uv.block_cols() == t.cols() && omega.rows() == t.rows() &&
                           omega.cols() == t.cols(),
                       "update_completion: shapes differ");
  const auto& obs = omega.dense();
  return {obs.select(t.plane(0), uv.qa().real()), obs.select(t.plane(1), uv.qa().imag()),
          obs.select(t.plane(2), uv.qb().real()), obs.select(t.plane(3), uv.qb().imag())};
}

inline QuaternionMatrix update_completion(const FactorPair& pair, const QuaternionMatrix& t,
                                          const ObservationMask& omega) {
  return completion_from_product(pair.product(), t, omega);
}

struct KktResiduals {
  double u_stationarity = 0.0;  // ||(f(U)f(V) - f(X)) f(V)^H + lambda f(U)||_F
  double v_stationarity = 0.0;  // ||f(U)^H (f(U)f(V) - f(X)) + lambda f(V)||_F
};

inline KktResiduals kkt_residuals(const FactorPair& pair, const QuaternionMatrix& x, double lambda) {
  const AdjointMatrix resid = pair.product() - adjoint(x);
  KktResiduals out;
  out.u_stationarity = std::sqrt((resid * pair.v.adjoint_h() + lambda * pair.u).squared_norm());
  out.v_stationarity = std::sqrt((pair.u.adjoint_h() * resid + lambda * pair.v).squared_norm());
  return out;
}

}  // namespace lrqmc
