#pragma once

#include <cstdint>
#include <string>

namespace lrqmc::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitDimension = 4;
inline constexpr int kExitNumerical = 5;

/// Per-task seed for batch runs; depends only on its arguments.
std::uint64_t batch_seed(std::uint64_t master, const std::string& image_name, double sr);

/// Rounds to 6 significant digits.
double round6(double v);

int run(int argc, char** argv);

}  // namespace lrqmc::cli
