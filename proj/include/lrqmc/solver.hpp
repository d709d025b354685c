#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lrqmc/adjoint.hpp"
#include "lrqmc/errors.hpp"
#include "lrqmc/factor_updates.hpp"
#include "lrqmc/mask.hpp"
#include "lrqmc/quaternion_matrix.hpp"
#include "lrqmc/rank_estimation.hpp"

namespace lrqmc {

struct SolverConfig {
  double lambda = 0.5;
  Eigen::Index init_rank = 50;  // complex rank of f(X); must be even
  double tol = 1e-3;            // on |eps^t - eps^{t+1}|
  int max_iters = 1000;
  double mu_threshold = 10.0;   // +inf disables rank estimation
  std::uint64_t seed = 0;
  bool allow_multiple_rank_drops = true;
  bool relative_tol = false;    // scale tol by ||P_Omega(T)||_F

  void validate(Eigen::Index rows, Eigen::Index cols) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
    if (init_rank <= 0 || init_rank % 2 != 0) throw ConfigError("init_rank must be a positive even integer");
    if (init_rank > 2 * std::min(rows, cols))
      throw ConfigError("init_rank must not exceed 2 * min(M, N) = " + std::to_string(2 * std::min(rows, cols)));
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iters <= 0) throw ConfigError("max_iters must be positive");
    if (std::isnan(mu_threshold)) throw ConfigError("mu_threshold must not be NaN");
  }
};

enum class Termination { Tolerance, MaxIters };

inline const char* to_string(Termination t) { return t == Termination::Tolerance ? "tolerance" : "max_iters"; }

struct RankDropEvent {
  int iteration = 0;
  Eigen::Index from_rank = 0;
  Eigen::Index to_rank = 0;
  double mu = 0.0;
};

/// Per-iteration history. Index t of each vector is iteration t + 1; the
/// initial state is stored separately.
struct SolverTrace {
  double initial_objective = 0.0;
  std::vector<double> objective;        // G after the U, V, X sweep
  std::vector<double> state_objective;  // G after the rank check (differs only on drops)
  std::vector<double> epsilon;          // ||P_{Omega^c}(X)||_F
  std::vector<Eigen::Index> rank;       // complex rank after the iteration
  std::vector<double> mu;
  std::vector<double> seconds;
  std::vector<RankDropEvent> rank_drops;
  Termination termination = Termination::MaxIters;

  int iterations() const { return static_cast<int>(objective.size()); }

  /// Objective value entering iteration t (1-based).
  double objective_before(int t) const {
    return t == 1 ? initial_objective : state_objective[static_cast<std::size_t>(t - 2)];
  }

  /// Every sweep is non-increasing relative to the state it started from.
  bool monotone(double relative_slack = 1e-9) const {
    const double slack = relative_slack * initial_objective;
    for (int t = 1; t <= iterations(); ++t)
      if (objective[static_cast<std::size_t>(t - 1)] > objective_before(t) + slack) return false;
    return true;
  }
};

struct SolveResult {
  QuaternionMatrix x;
  FactorPair factors;
  SolverTrace trace;
};

/// Called after each iteration with the current iterate; lets tests audit
/// intermediate states without copying them into the trace.
using IterationObserver = std::function<void(int, const FactorPair&, const QuaternionMatrix&)>;

/// Random structured start: adjoints of quaternion matrices with i.i.d.
/// standard normal components.
inline FactorPair random_factors(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::Index k = rank / 2;
  AdjointMatrix u = adjoint(QuaternionMatrix::random_normal(rows, k, rng));
  AdjointMatrix v = adjoint(QuaternionMatrix::random_normal(k, cols, rng));
  return {std::move(u), std::move(v)};
}

/// Low-rank quaternion matrix completion by alternating ridge updates of the
/// lifted factors, with eigenvalue-gap rank decrease.
inline SolveResult solve(const QuaternionMatrix& t, const ObservationMask& omega, const SolverConfig& cfg,
                         const IterationObserver& observer = {}) {
  detail::require_dims(omega.rows() == t.rows() && omega.cols() == t.cols(),
                       "solve: mask and data dimensions differ");
  if (omega.empty()) throw ConfigError("solve: observation set is empty");
  if (!t.all_finite()) throw InputError("solve: input contains non-finite entries");
  cfg.validate(t.rows(), t.cols());

  using clock = std::chrono::steady_clock;
  const Eigen::MatrixXd missing = 1.0 - omega.indicator().array();
  const auto missing_norm = [&](const QuaternionMatrix& x) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += (x.plane(c).array() * missing.array()).square().sum();
    return std::sqrt(s);
  };
  const QuaternionMatrix t_obs = project_omega(t, omega);
  // exact on Omega: t + 0 * uv == t
  const auto complete = [&](const AdjointMatrix& uv, QuaternionMatrix& x) {
    x.plane(0) = t_obs.plane(0).array() + missing.array() * uv.qa().real().array();
    x.plane(1) = t_obs.plane(1).array() + missing.array() * uv.qa().imag().array();
    x.plane(2) = t_obs.plane(2).array() + missing.array() * uv.qb().real().array();
    x.plane(3) = t_obs.plane(3).array() + missing.array() * uv.qb().imag().array();
  };
  const double tol = cfg.relative_tol ? cfg.tol * frobenius_norm(t_obs) : cfg.tol;

  SolveResult res;
  res.factors = random_factors(t.rows(), t.cols(), cfg.init_rank, cfg.seed);
  res.x = zero_fill(t, omega);
  AdjointMatrix fx = adjoint(res.x);
  SolverTrace& trace = res.trace;
  trace.initial_objective = objective_from_product(res.factors, res.factors.product(), fx, cfg.lambda);

  double eps_prev = missing_norm(res.x);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto start = clock::now();
    FactorPair& f = res.factors;
    f.u = update_factor_u(f, fx, cfg.lambda);
    f.v = update_factor_v(f, fx, cfg.lambda);
    const AdjointMatrix uv = f.product();
    complete(uv, res.x);
    fx = adjoint(res.x);
    const double g = objective_from_product(f, uv, fx, cfg.lambda);
    if (!std::isfinite(g)) throw NumericalError("solve: objective became non-finite at iteration " + std::to_string(it));
    const double eps = missing_norm(res.x);

    double g_state = g;
    double mu = 0.0;
    const bool may_drop = std::isfinite(cfg.mu_threshold) && (cfg.allow_multiple_rank_drops || trace.rank_drops.empty());
    if (may_drop && f.rank() > 2) {
      const RankGapReport gap = rank_gap_statistic(gram_eigenvalues(f.u));
      mu = gap.mu;
      if (gap.drop(cfg.mu_threshold)) {
        const Eigen::Index before = f.rank();
        f = shrink_rank(f, gap.gap_index);
        if (f.rank() < before) {
          trace.rank_drops.push_back({it, before, f.rank(), gap.mu});
          g_state = objective_from_product(f, f.product(), fx, cfg.lambda);
        }
      }
    }

    trace.objective.push_back(g);
    trace.state_objective.push_back(g_state);
    trace.epsilon.push_back(eps);
    trace.rank.push_back(f.rank());
    trace.mu.push_back(mu);
    trace.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
    if (observer) observer(it, f, res.x);

    if (std::abs(eps - eps_prev) < tol) {
      trace.termination = Termination::Tolerance;
      return res;
    }
    eps_prev = eps;
  }
  trace.termination = Termination::MaxIters;
  return res;
}

}  // namespace lrqmc
