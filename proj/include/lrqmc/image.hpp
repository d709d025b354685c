#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrqmc/errors.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// RGB image with double-precision channels on the [0, 255] scale.
struct ColorImage {
  std::array<Eigen::MatrixXd, 3> channels;  // red, green, blue; each height x width

  ColorImage() = default;
  ColorImage(Eigen::Index height, Eigen::Index width) {
    for (auto& c : channels) c = Eigen::MatrixXd::Zero(height, width);
  }

  Eigen::Index height() const { return channels[0].rows(); }
  Eigen::Index width() const { return channels[0].cols(); }
  Eigen::Index numel() const { return 3 * height() * width(); }

  bool same_shape(const ColorImage& o) const { return height() == o.height() && width() == o.width(); }

  friend bool operator==(const ColorImage& a, const ColorImage& b) {
    return a.same_shape(b) && a.channels[0] == b.channels[0] && a.channels[1] == b.channels[1] &&
           a.channels[2] == b.channels[2];
  }
};

/// Pixel (r, g, b) -> pure quaternion r i + g j + b k.
inline QuaternionMatrix encode_image(const ColorImage& img) {
  return {Eigen::MatrixXd::Zero(img.height(), img.width()), img.channels[0], img.channels[1],
          img.channels[2]};
}

/// Threshold on |q0| above which decode_image reports a dropped real part.
inline constexpr double kRealResidueWarn = 1e-6;

/// Imaginary parts become (r, g, b), clamped to [0, 255]; the real part is
/// discarded. A warning is appended when that real part is not negligible.
inline ColorImage decode_image(const QuaternionMatrix& q, std::vector<std::string>* warnings = nullptr) {
  ColorImage img;
  for (std::size_t c = 0; c < 3; ++c) img.channels[c] = q.plane(c + 1).cwiseMax(0.0).cwiseMin(255.0);
  if (q.size() > 0) {
    const double residue = q.plane(0).cwiseAbs().maxCoeff();
    if (residue > kRealResidueWarn && warnings)
      warnings->push_back("decode_image: discarding real component of magnitude " + std::to_string(residue));
  }
  return img;
}

}  // namespace lrqmc
