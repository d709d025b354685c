#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrqmc/errors.hpp"
#include "lrqmc/image.hpp"
#include "lrqmc/quaternion_matrix.hpp"

namespace lrqmc {

/// dB values are reported inside [-kDbCap, kDbCap] so reports stay finite.
inline constexpr double kDbCap = 300.0;

struct MetricsConfig {
  double peakval = 255.0;

  // SSIM: Gaussian window, C1 = (0.01 L)^2, C2 = (0.03 L)^2 with L = peakval.
  int ssim_window = 11;
  double ssim_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;

  // FSIM phase congruency bank and similarity constants.
  int fsim_scales = 4;
  int fsim_orientations = 4;
  double fsim_min_wavelength = 6.0;
  double fsim_mult = 2.0;
  double fsim_sigma_on_f = 0.55;
  double fsim_dtheta_on_sigma = 1.2;
  double fsim_noise_k = 2.0;
  double fsim_t1 = 0.85;
  double fsim_t2 = 160.0;

  double c1() const { return (k1 * peakval) * (k1 * peakval); }
  double c2() const { return (k2 * peakval) * (k2 * peakval); }

  void validate() const {
    if (!(peakval > 0.0)) throw ConfigError("MetricsConfig: peakval must be positive");
    if (ssim_window <= 0 || ssim_window % 2 == 0) throw ConfigError("MetricsConfig: SSIM window must be odd");
  }
};

namespace detail {

inline void require_same_shape(const ColorImage& x, const ColorImage& t, const char* what) {
  if (!x.same_shape(t)) throw DimensionError(std::string(what) + ": images differ in size");
}

inline double squared_diff(const ColorImage& x, const ColorImage& t) {
  double s = 0.0;
  for (std::size_t c = 0; c < 3; ++c) s += (x.channels[c] - t.channels[c]).squaredNorm();
  return s;
}

inline double cap_db(double v) { return std::clamp(v, -kDbCap, kDbCap); }

inline double rse_from_norms(double diff, double ref) {
  if (ref == 0.0) throw InputError("rse: reference is all zero");
  if (diff == 0.0) return -kDbCap;
  return cap_db(10.0 * std::log10(diff / ref));
}

}  // namespace detail

/// 10 log10(||X - T||_F / ||T||_F). The norm ratio is not squared.
inline double rse(const ColorImage& x, const ColorImage& t) {
  detail::require_same_shape(x, t, "rse");
  double ref = 0.0;
  for (const auto& c : t.channels) ref += c.squaredNorm();
  return detail::rse_from_norms(std::sqrt(detail::squared_diff(x, t)), std::sqrt(ref));
}

/// Same quantity on quaternion matrices (synthetic experiments).
inline double rse(const QuaternionMatrix& x, const QuaternionMatrix& t) {
  detail::require_dims(x.rows() == t.rows() && x.cols() == t.cols(), "rse: matrices differ in shape");
  return detail::rse_from_norms(frobenius_norm(x - t), frobenius_norm(t));
}

/// 10 log10(peak^2 / MSE), MSE over all M*N*3 values.
inline double psnr(const ColorImage& x, const ColorImage& t, const MetricsConfig& cfg = {}) {
  detail::require_same_shape(x, t, "psnr");
  cfg.validate();
  const double mse = detail::squared_diff(x, t) / static_cast<double>(x.numel());
  if (mse == 0.0) return kDbCap;
  return detail::cap_db(10.0 * std::log10(cfg.peakval * cfg.peakval / mse));
}

namespace detail {

inline Eigen::VectorXd gaussian_kernel(int size, double sigma) {
  Eigen::VectorXd k(size);
  const double half = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    k(i) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return k / k.sum();
}

// Separable correlation keeping only fully covered positions.
inline Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& img, const Eigen::VectorXd& k) {
  const auto w = k.size();
  const auto rows = img.rows() - w + 1, cols = img.cols() - w + 1;
  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(rows, img.cols());
  for (Eigen::Index i = 0; i < w; ++i) tmp += k(i) * img.middleRows(i, rows);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index j = 0; j < w; ++j) out += k(j) * tmp.middleCols(j, cols);
  return out;
}

inline double ssim_channel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& t, const Eigen::VectorXd& win, double c1,
                           double c2) {
  const Eigen::ArrayXXd mu_x = filter_valid(x, win).array();
  const Eigen::ArrayXXd mu_t = filter_valid(t, win).array();
  const Eigen::ArrayXXd var_x = filter_valid(x.cwiseProduct(x), win).array() - mu_x * mu_x;
  const Eigen::ArrayXXd var_t = filter_valid(t.cwiseProduct(t), win).array() - mu_t * mu_t;
  const Eigen::ArrayXXd cov = filter_valid(x.cwiseProduct(t), win).array() - mu_x * mu_t;
  const Eigen::ArrayXXd map = ((2.0 * mu_x * mu_t + c1) * (2.0 * cov + c2)) /
                              ((mu_x * mu_x + mu_t * mu_t + c1) * (var_x + var_t + c2));
  return map.mean();
}

}  // namespace detail

/// Mean SSIM over an 11x11 Gaussian-window map, averaged over R, G, B.
inline double ssim(const ColorImage& x, const ColorImage& t, const MetricsConfig& cfg = {}) {
  detail::require_same_shape(x, t, "ssim");
  cfg.validate();
  if (std::min(x.height(), x.width()) < cfg.ssim_window)
    throw InputError("ssim: image is smaller than the SSIM window");
  const Eigen::VectorXd win = detail::gaussian_kernel(cfg.ssim_window, cfg.ssim_sigma);
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) total += detail::ssim_channel(x.channels[c], t.channels[c], win, cfg.c1(), cfg.c2());
  return total / 3.0;
}

}  // namespace lrqmc
