#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lrqmc/errors.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// The observed index set Omega over an M x N grid. One element is a whole
/// pixel (quaternion entry). Indices are kept sorted row-major.
class ObservationMask {
 public:
  using Index = Eigen::Index;
  using Entry = std::pair<Index, Index>;

  ObservationMask() = default;

  /// Explicit index set; duplicates are removed. `seed` is empty for masks
  /// that did not come from the seeded sampler.
  ObservationMask(Index rows, Index cols, std::vector<Entry> observed,
                  std::optional<std::uint64_t> seed = std::nullopt)
      : rows_(rows), cols_(cols), seed_(seed), observed_(std::move(observed)) {
    if (rows <= 0 || cols <= 0) throw ConfigError("ObservationMask: dimensions must be positive");
    std::sort(observed_.begin(), observed_.end());
    observed_.erase(std::unique(observed_.begin(), observed_.end()), observed_.end());
    dense_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
    for (const auto& [r, c] : observed_) {
      if (r < 0 || r >= rows || c < 0 || c >= cols)
        throw InputError("ObservationMask: index (" + std::to_string(r) + "," + std::to_string(c) +
                         ") out of range");
      dense_(r, c) = true;
    }
    sampling_ratio_ = static_cast<double>(observed_.size()) / static_cast<double>(rows * cols);
  }

  static ObservationMask full(Index rows, Index cols) {
    std::vector<Entry> all;
    all.reserve(static_cast<std::size_t>(rows * cols));
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) all.emplace_back(r, c);
    return {rows, cols, std::move(all)};
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double sampling_ratio() const { return sampling_ratio_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  const std::vector<Entry>& observed() const { return observed_; }
  std::size_t count() const { return observed_.size(); }
  bool empty() const { return observed_.empty(); }
  bool contains(Index r, Index c) const { return dense_(r, c); }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& dense() const { return dense_; }

  ObservationMask complement() const {
    std::vector<Entry> rest;
    rest.reserve(static_cast<std::size_t>(rows_ * cols_) - observed_.size());
    for (Index r = 0; r < rows_; ++r)
      for (Index c = 0; c < cols_; ++c)
        if (!dense_(r, c)) rest.emplace_back(r, c);
    return {rows_, cols_, std::move(rest)};
  }

  /// 1.0 on Omega, 0.0 elsewhere.
  Eigen::MatrixXd indicator() const { return dense_.cast<double>(); }

  // Set by the sampler, which may record the requested ratio.
  void set_sampling_ratio(double sr) { sampling_ratio_ = sr; }

  friend bool operator==(const ObservationMask& a, const ObservationMask& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.observed_ == b.observed_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  double sampling_ratio_ = 0.0;
  std::optional<std::uint64_t> seed_;
  std::vector<Entry> observed_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> dense_;
};

/// Uniformly samples round(sr * M * N) distinct pixels without replacement.
inline ObservationMask sample_mask(Eigen::Index rows, Eigen::Index cols, double sr, std::uint64_t seed) {
  if (!(sr >= 0.0 && sr <= 1.0)) throw ConfigError("sample_mask: sampling ratio must lie in [0, 1]");
  if (rows <= 0 || cols <= 0) throw ConfigError("sample_mask: dimensions must be positive");
  const auto total = static_cast<std::uint64_t>(rows * cols);
  const auto count = static_cast<std::uint64_t>(std::llround(sr * static_cast<double>(total)));

  std::vector<std::uint64_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, total - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }

  std::vector<ObservationMask::Entry> observed;
  observed.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto lin = static_cast<Eigen::Index>(pool[i]);
    observed.emplace_back(lin / cols, lin % cols);
  }
  ObservationMask mask(rows, cols, std::move(observed), seed);
  mask.set_sampling_ratio(sr);
  return mask;
}

/// Keeps entries on Omega and zeroes the rest.
inline QuaternionMatrix project_omega(const QuaternionMatrix& x, const ObservationMask& omega) {
  detail::require_dims(x.rows() == omega.rows() && x.cols() == omega.cols(),
                       "project_omega: mask and matrix dimensions differ");
  const Eigen::MatrixXd keep = omega.indicator();
  QuaternionMatrix out(x.rows(), x.cols());
  for (std::size_t c = 0; c < 4; ++c) out.plane(c) = x.plane(c).cwiseProduct(keep);
  return out;
}

// ---- text persistence -------------------------------------------------------
//
//   M N SR SEED
//   row,col
//   ...
//
// SR is written with 17 significant digits; SEED is an integer or "explicit".

inline std::string format_mask(const ObservationMask& mask) {
  std::ostringstream os;
  char sr[64];
  std::snprintf(sr, sizeof sr, "%.17g", mask.sampling_ratio());
  os << mask.rows() << ' ' << mask.cols() << ' ' << sr << ' ';
  if (mask.seed())
    os << *mask.seed();
  else
    os << "explicit";
  os << '\n';
  for (const auto& [r, c] : mask.observed()) os << r << ',' << c << '\n';
  return os.str();
}

inline ObservationMask parse_mask(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InputError("mask: missing header line");
  std::istringstream hs(header);
  long long rows = 0, cols = 0;
  std::string sr_text, seed_text, extra;
  if (!(hs >> rows >> cols >> sr_text >> seed_text) || (hs >> extra))
    throw InputError("mask: header must be 'M N SR SEED'");

  double sr = 0.0;
  try {
    std::size_t used = 0;
    sr = std::stod(sr_text, &used);
    if (used != sr_text.size()) throw std::invalid_argument(sr_text);
  } catch (const std::exception&) {
    throw InputError("mask: unreadable sampling ratio '" + sr_text + "'");
  }
  std::optional<std::uint64_t> seed;
  if (seed_text != "explicit") {
    try {
      std::size_t used = 0;
      seed = std::stoull(seed_text, &used);
      if (used != seed_text.size()) throw std::invalid_argument(seed_text);
    } catch (const std::exception&) {
      throw InputError("mask: unreadable seed '" + seed_text + "'");
    }
  }
  if (rows <= 0 || cols <= 0) throw InputError("mask: dimensions must be positive");

  std::vector<ObservationMask::Entry> observed;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long long r = 0, c = 0;
    char comma = 0;
    std::istringstream ls(line);
    if (!(ls >> r >> comma >> c) || comma != ',' || (ls >> extra))
      throw InputError("mask: malformed entry on line " + std::to_string(lineno));
    observed.emplace_back(r, c);
  }
  ObservationMask mask(rows, cols, std::move(observed), seed);
  const auto expected = std::llround(sr * static_cast<double>(rows * cols));
  if (expected != static_cast<long long>(mask.count()))
    throw InputError("mask: header SR does not match the number of listed entries");
  mask.set_sampling_ratio(sr);
  return mask;
}

inline void write_mask(const std::string& path, const ObservationMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open mask file for writing: " + path);
  out << format_mask(mask);
  if (!out) throw InputError("failed writing mask file: " + path);
}

inline ObservationMask read_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mask file: " + path);
  return parse_mask(in);
}

}  // namespace lrqmc
