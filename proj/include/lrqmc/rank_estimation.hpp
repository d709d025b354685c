#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lrqmc/adjoint.hpp"
#include "lrqmc/errors.hpp"
#include "lrqmc/factor_updates.hpp"
#include "lrqmc/qsvd.hpp"

namespace lrqmc {

/// Eigenvalues below this fraction of the largest are left out of the
/// quotient sequence.
inline constexpr double kGapEigenFloor = 1e-12;

struct RankGapReport {
  std::vector<double> eigenvalues;  // as given, non-increasing
  std::vector<double> quotients;    // d_m / d_{m+1} over the usable prefix
  Eigen::Index gap_index = 0;       // p, 1-based; 0 when no gap can be formed
  double mu = 0.0;

  bool drop(double threshold) const { return gap_index > 0 && mu >= threshold; }
};

/// Eigenvalue-quotient gap statistic:
///   dhat_m = d_m / d_{m+1},  p = argmax dhat,
///   mu = (r - 1) dhat_p / sum_{m != p} dhat_m
/// with r the number of usable eigenvalues. Ties pick the smallest m.
inline RankGapReport rank_gap_statistic(const std::vector<double>& d) {
  if (!std::is_sorted(d.begin(), d.end(), std::greater<>{}))
    throw ConfigError("rank_gap_statistic: eigenvalues must be sorted non-increasing");
  RankGapReport rep;
  rep.eigenvalues = d;
  if (d.empty() || !(d.front() > 0.0)) return rep;

  const double floor = kGapEigenFloor * d.front();
  std::size_t usable = 0;
  while (usable < d.size() && d[usable] > floor) ++usable;
  if (usable < 2) return rep;

  for (std::size_t m = 0; m + 1 < usable; ++m) rep.quotients.push_back(d[m] / d[m + 1]);
  const auto best = std::max_element(rep.quotients.begin(), rep.quotients.end());
  const auto p = static_cast<std::size_t>(best - rep.quotients.begin());
  double rest = 0.0;
  for (std::size_t m = 0; m < rep.quotients.size(); ++m)
    if (m != p) rest += rep.quotients[m];
  rep.gap_index = static_cast<Eigen::Index>(p + 1);
  rep.mu = rest > 0.0 ? static_cast<double>(usable - 1) * (*best) / rest : 0.0;
  return rep;
}

/// Eigenvalues of f(U)^H f(U), sorted non-increasing.
inline std::vector<double> gram_eigenvalues(const AdjointMatrix& u) {
  const CMatrix gram = (u.adjoint_h() * u).materialize();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("gram_eigenvalues: eigendecomposition failed");
  std::vector<double> d(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(d.begin(), d.end(), std::greater<>{});
  return d;
}

/// Leading K quaternion singular triplets of the product f(U) f(V), computed
/// from thin QR factors of each side and a small core SVD.
struct ProductQSVD {
  QuaternionMatrix a;          // M x K, orthonormal columns
  std::vector<double> sigma;   // K values
  Eigen::VectorXd complex_sv;  // all singular values of the product (paired)
};

inline ProductQSVD product_qsvd(const FactorPair& pair, Eigen::Index k) {
  const CMatrix fu = pair.u.materialize();
  const CMatrix fvh = pair.v.materialize().adjoint();
  Eigen::HouseholderQR<CMatrix> qr_u(fu), qr_v(fvh);
  const auto r = fu.cols();
  const CMatrix q1 = qr_u.householderQ() * CMatrix::Identity(fu.rows(), r);
  const CMatrix r1 = qr_u.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const CMatrix r2 = qr_v.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<CMatrix> core(r1 * r2.adjoint(), Eigen::ComputeFullU);

  ProductQSVD out;
  out.complex_sv = core.singularValues();
  const CMatrix left = q1 * core.matrixU();
  out.a = detail::paired_left_vectors(left, out.complex_sv, k).as_columns();
  for (Eigen::Index t = 0; t < k; ++t) out.sigma.push_back(out.complex_sv(2 * t));
  return out;
}

/// Truncates the factorization to complex rank p (rounded up to even):
/// f(U) <- L_p Sigma_p, f(V) <- (R^H)_p from the SVD of f(U) f(V). The
/// singular pairs are taken as quaternion triplets so both factors keep the
/// adjoint structure. Returns the pair unchanged when p_even >= r.
inline FactorPair shrink_rank(const FactorPair& pair, Eigen::Index p) {
  if (p <= 0) throw ConfigError("shrink_rank: target rank must be positive");
  const Eigen::Index p_even = p + (p % 2);
  if (p_even >= pair.rank()) return pair;
  const Eigen::Index k = p_even / 2;

  const ProductQSVD svd = product_qsvd(pair, k);
  QuaternionMatrix u_new = svd.a;
  QuaternionMatrix v_new = svd.a.adjoint_h() * adjoint_inverse(pair.u) * adjoint_inverse(pair.v);
  for (Eigen::Index t = 0; t < k; ++t) {
    const double s = svd.sigma[static_cast<std::size_t>(t)];
    const double inv = s > 0.0 ? 1.0 / s : 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      u_new.plane(c).col(t) *= s;
      v_new.plane(c).row(t) *= inv;
    }
  }
  return {adjoint(u_new), adjoint(v_new)};
}

}  // namespace lrqmc
