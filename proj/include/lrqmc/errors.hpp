#pragma once

#include <stdexcept>
#include <string>

namespace lrqmc {

// Bad or unreadable data supplied by the caller (files, non-finite entries).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters (sampling ratio out of range, odd rank, empty mask...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Shapes that do not agree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A dense kernel failed (factorization breakdown, NaN produced mid-solve).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail
}  // namespace lrqmc
