#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "lrqmc/errors.hpp"
#include "lrqmc/fsim.hpp"
#include "lrqmc/image.hpp"
#include "lrqmc/mask.hpp"
#include "lrqmc/metrics.hpp"
#include "lrqmc/solver.hpp"

namespace lrqmc {

/// Intensity range the solver sees. Unit divides pixels by 255 before
/// solving and multiplies back afterwards.
enum class PixelScale { Unit, Byte };

inline double scale_factor(PixelScale s) { return s == PixelScale::Unit ? 1.0 / 255.0 : 1.0; }

/// Quality of `x` against reference `t`. SSIM and FSIM are left empty when
/// the image is below their minimum size.
struct QualityReport {
  double rse = 0.0;
  double psnr = 0.0;
  std::optional<double> ssim;
  std::optional<double> fsim;
};

inline QualityReport assess(const ColorImage& x, const ColorImage& t, const MetricsConfig& cfg = {}) {
  QualityReport q;
  q.rse = rse(x, t);
  q.psnr = psnr(x, t, cfg);
  if (std::min(x.height(), x.width()) >= cfg.ssim_window) q.ssim = ssim(x, t, cfg);
  if (std::min(x.height(), x.width()) >= kFsimMinSide) q.fsim = fsim(x, t, cfg);
  return q;
}

struct RecoveryOutcome {
  ColorImage recovered;
  ColorImage observed;  // zero-filled
  SolveResult solve;
  QualityReport quality;           // recovered vs original
  QualityReport observed_quality;  // zero-filled vs original
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Encodes, solves, decodes and scores one image against itself.
inline RecoveryOutcome recover_image(const ColorImage& original, const ObservationMask& omega, const SolverConfig& cfg,
                                     PixelScale scale = PixelScale::Unit) {
  detail::require_dims(omega.rows() == original.height() && omega.cols() == original.width(),
                       "mask is " + std::to_string(omega.rows()) + "x" + std::to_string(omega.cols()) +
                           " but image is " + std::to_string(original.height()) + "x" +
                           std::to_string(original.width()));
  const double s = scale_factor(scale);
  const auto start = std::chrono::steady_clock::now();

  RecoveryOutcome out;
  const QuaternionMatrix t = s * encode_image(original);
  out.solve = solve(t, omega, cfg);
  out.recovered = decode_image((1.0 / s) * out.solve.x, &out.warnings);
  // observed pixels are known; undo the rescaling round-off on them
  for (const auto& [r, c] : omega.observed())
    for (std::size_t ch = 0; ch < 3; ++ch) out.recovered.channels[ch](r, c) = original.channels[ch](r, c);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.observed = decode_image(project_omega(encode_image(original), omega));
  out.quality = assess(out.recovered, original);
  out.observed_quality = assess(out.observed, original);
  return out;
}

}  // namespace lrqmc
