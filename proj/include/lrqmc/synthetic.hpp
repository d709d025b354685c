#pragma once

#include <cstdint>
#include <random>

#include "lrqmc/adjoint.hpp"
#include "lrqmc/errors.hpp"
#include "lrqmc/mask.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// splitmix64 finalizer; decorrelates seeds derived from one master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x51ed27a3ULL));
}

/// Random quaternion matrix of rank k: product of M x k and k x N factors
/// with i.i.d. standard normal components.
inline QuaternionMatrix random_low_rank_quaternion(Eigen::Index rows, Eigen::Index cols, Eigen::Index k,
                                                   std::uint64_t seed) {
  if (k <= 0 || k > std::min(rows, cols)) throw ConfigError("rank must lie in [1, min(M, N)]");
  std::mt19937_64 rng(seed);
  const QuaternionMatrix left = QuaternionMatrix::random_normal(rows, k, rng);
  const QuaternionMatrix right = QuaternionMatrix::random_normal(k, cols, rng);
  return qmat_mul(left, right);
}

/// A seeded exact-recovery instance: data, mask and solver seeds all derive
/// from one master seed.
struct SyntheticProblem {
  QuaternionMatrix truth;
  ObservationMask mask;
  std::uint64_t solver_seed = 0;
};

inline SyntheticProblem make_synthetic_problem(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank, double sr,
                                               std::uint64_t seed) {
  SyntheticProblem p;
  p.truth = random_low_rank_quaternion(rows, cols, rank, derive_seed(seed, 0));
  p.mask = sample_mask(rows, cols, sr, derive_seed(seed, 1));
  p.solver_seed = derive_seed(seed, 2);
  return p;
}

}  // namespace lrqmc
