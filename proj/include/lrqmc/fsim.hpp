#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "lrqmc/errors.hpp"
#include "lrqmc/image.hpp"
#include "lrqmc/metrics.hpp"

namespace lrqmc {

/// Smallest image side FSIM accepts.
inline constexpr Eigen::Index kFsimMinSide = 32;

namespace detail {

using ArrayXXc = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

inline void fft2_inplace(ArrayXXc& a, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in, out;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    in.assign(a.cols(), {});
    for (Eigen::Index c = 0; c < a.cols(); ++c) in[c] = a(r, c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = out[c];
  }
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    in.assign(a.rows(), {});
    for (Eigen::Index r = 0; r < a.rows(); ++r) in[r] = a(r, c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = out[r];
  }
}

// Normalized frequency coordinate for index i of an n-point grid, already
// ifftshift-ed so that index 0 is the zero frequency.
inline double freq_coord(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index j = (i + n / 2) % n;  // ifftshift
  if (n % 2) return (static_cast<double>(j) - (n - 1) / 2.0) / static_cast<double>(n - 1);
  return (static_cast<double>(j) - n / 2.0) / static_cast<double>(n);
}

inline double median(std::vector<double> v) {
  const auto n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Phase congruency map from a log-Gabor filter bank (scales x
/// orientations), with per-orientation noise compensation estimated from
/// the smallest-scale response.
inline Eigen::ArrayXXd phase_congruency(const Eigen::ArrayXXd& im, const MetricsConfig& cfg = {}) {
  using detail::ArrayXXc;
  const Eigen::Index rows = im.rows(), cols = im.cols();
  const int nscale = cfg.fsim_scales, norient = cfg.fsim_orientations;
  const double pi = std::numbers::pi;
  const double epsilon = 1e-4;
  const double theta_sigma = pi / norient / cfg.fsim_dtheta_on_sigma;

  ArrayXXc image_fft = im.cast<std::complex<double>>();
  detail::fft2_inplace(image_fft, false);

  Eigen::ArrayXXd radius(rows, cols), sin_t(rows, cols), cos_t(rows, cols), lowpass(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double y = detail::freq_coord(r, rows);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double x = detail::freq_coord(c, cols);
      const double rad = std::sqrt(x * x + y * y);
      lowpass(r, c) = 1.0 / (1.0 + std::pow(rad / 0.45, 2 * 15));
      radius(r, c) = rad;
      const double theta = std::atan2(-y, x);
      sin_t(r, c) = std::sin(theta);
      cos_t(r, c) = std::cos(theta);
    }
  }
  radius(0, 0) = 1.0;

  std::vector<Eigen::ArrayXXd> log_gabor(nscale);
  const double log_sigma2 = 2.0 * std::log(cfg.fsim_sigma_on_f) * std::log(cfg.fsim_sigma_on_f);
  for (int s = 0; s < nscale; ++s) {
    const double fo = 1.0 / (cfg.fsim_min_wavelength * std::pow(cfg.fsim_mult, s));
    log_gabor[s] = (-(radius / fo).log().square() / log_sigma2).exp() * lowpass;
    log_gabor[s](0, 0) = 0.0;
  }

  Eigen::ArrayXXd energy_all = Eigen::ArrayXXd::Zero(rows, cols);
  Eigen::ArrayXXd an_all = Eigen::ArrayXXd::Zero(rows, cols);
  const double sqrt_n = std::sqrt(static_cast<double>(rows * cols));

  for (int o = 0; o < norient; ++o) {
    const double angle = o * pi / norient;
    const Eigen::ArrayXXd ds = sin_t * std::cos(angle) - cos_t * std::sin(angle);
    const Eigen::ArrayXXd dc = cos_t * std::cos(angle) + sin_t * std::sin(angle);
    Eigen::ArrayXXd dtheta = ds.binaryExpr(dc, [](double a, double b) { return std::abs(std::atan2(a, b)); });
    const Eigen::ArrayXXd spread = (-dtheta.square() / (2.0 * theta_sigma * theta_sigma)).exp();

    Eigen::ArrayXXd sum_e = Eigen::ArrayXXd::Zero(rows, cols), sum_o = sum_e, sum_an = sum_e;
    std::vector<ArrayXXc> eo(nscale);
    std::vector<Eigen::ArrayXXd> spatial_filter(nscale);
    double em_n = 0.0;
    for (int s = 0; s < nscale; ++s) {
      const Eigen::ArrayXXd filter = log_gabor[s] * spread;
      ArrayXXc f = filter.cast<std::complex<double>>();
      detail::fft2_inplace(f, true);
      spatial_filter[s] = f.real() * sqrt_n;
      eo[s] = image_fft * filter.cast<std::complex<double>>();
      detail::fft2_inplace(eo[s], true);
      sum_an += eo[s].abs();
      sum_e += eo[s].real();
      sum_o += eo[s].imag();
      if (s == 0) em_n = filter.square().sum();
    }

    const Eigen::ArrayXXd x_energy = (sum_e.square() + sum_o.square()).sqrt() + epsilon;
    const Eigen::ArrayXXd mean_e = sum_e / x_energy, mean_o = sum_o / x_energy;
    Eigen::ArrayXXd energy = Eigen::ArrayXXd::Zero(rows, cols);
    for (int s = 0; s < nscale; ++s) {
      const Eigen::ArrayXXd e = eo[s].real(), od = eo[s].imag();
      energy += e * mean_e + od * mean_o - (e * mean_o - od * mean_e).abs();
    }

    // Noise threshold from the median squared response at the finest scale,
    // assuming Rayleigh-distributed noise amplitude.
    const Eigen::ArrayXXd a2 = eo[0].abs2();
    const double median_e2n = detail::median(std::vector<double>(a2.data(), a2.data() + a2.size()));
    const double mean_e2n = -median_e2n / std::log(0.5);
    const double noise_power = em_n > 0.0 ? mean_e2n / em_n : 0.0;

    double sum_an2 = 0.0, sum_aiaj = 0.0;
    for (int s = 0; s < nscale; ++s) sum_an2 += spatial_filter[s].square().sum();
    for (int si = 0; si + 1 < nscale; ++si)
      for (int sj = si + 1; sj < nscale; ++sj) sum_aiaj += (spatial_filter[si] * spatial_filter[sj]).sum();
    const double noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_aiaj;
    const double tau = std::sqrt(noise_energy2 / 2.0);
    const double noise_mean = tau * std::sqrt(pi / 2.0);
    const double noise_sigma = std::sqrt((2.0 - pi / 2.0) * tau * tau);
    const double threshold = (noise_mean + cfg.fsim_noise_k * noise_sigma) / 1.7;

    energy_all += (energy - threshold).max(0.0);
    an_all += sum_an;
  }
  return an_all.binaryExpr(energy_all, [](double an, double en) { return an > 0.0 ? en / an : 0.0; });
}

namespace detail {

// 2-D convolution returning the central part the size of `a` (zero padded).
inline Eigen::ArrayXXd conv2_same(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& k) {
  const Eigen::Index kr = k.rows(), kc = k.cols(), rows = a.rows(), cols = a.cols();
  const Eigen::Index off_r = kr / 2, off_c = kc / 2;
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double s = 0.0;
      for (Eigen::Index u = 0; u < kr; ++u) {
        const Eigen::Index ai = i + off_r - u;
        if (ai < 0 || ai >= rows) continue;
        for (Eigen::Index v = 0; v < kc; ++v) {
          const Eigen::Index aj = j + off_c - v;
          if (aj < 0 || aj >= cols) continue;
          s += a(ai, aj) * k(u, v);
        }
      }
      out(i, j) = s;
    }
  return out;
}

inline Eigen::ArrayXXd luminance(const ColorImage& img) {
  return 0.299 * img.channels[0].array() + 0.587 * img.channels[1].array() + 0.114 * img.channels[2].array();
}

// Box-filter and subsample by F = max(1, round(min side / 256)).
inline Eigen::ArrayXXd fsim_downsample(const Eigen::ArrayXXd& y) {
  const auto f = std::max<Eigen::Index>(1, std::lround(std::min(y.rows(), y.cols()) / 256.0));
  if (f == 1) return y;
  const Eigen::ArrayXXd smoothed = conv2_same(y, Eigen::ArrayXXd::Constant(f, f, 1.0 / static_cast<double>(f * f)));
  const Eigen::Index rows = (y.rows() + f - 1) / f, cols = (y.cols() + f - 1) / f;
  Eigen::ArrayXXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = smoothed(i * f, j * f);
  return out;
}

inline Eigen::ArrayXXd gradient_magnitude(const Eigen::ArrayXXd& y) {
  Eigen::ArrayXXd dx(3, 3), dy(3, 3);
  dx << 3, 0, -3, 10, 0, -10, 3, 0, -3;
  dy << 3, 10, 3, 0, 0, 0, -3, -10, -3;
  dx /= 16.0;
  dy /= 16.0;
  const Eigen::ArrayXXd gx = conv2_same(y, dx), gy = conv2_same(y, dy);
  return (gx.square() + gy.square()).sqrt();
}

}  // namespace detail

/// Feature similarity on luminance: phase-congruency similarity times
/// gradient-magnitude similarity, pooled with max(PC_X, PC_T) as weight.
inline double fsim(const ColorImage& x, const ColorImage& t, const MetricsConfig& cfg = {}) {
  detail::require_same_shape(x, t, "fsim");
  cfg.validate();
  if (std::min(x.height(), x.width()) < kFsimMinSide)
    throw InputError("fsim: image sides must be at least " + std::to_string(kFsimMinSide) + " pixels");

  const Eigen::ArrayXXd y1 = detail::fsim_downsample(detail::luminance(x));
  const Eigen::ArrayXXd y2 = detail::fsim_downsample(detail::luminance(t));
  const Eigen::ArrayXXd pc1 = phase_congruency(y1, cfg), pc2 = phase_congruency(y2, cfg);
  const Eigen::ArrayXXd g1 = detail::gradient_magnitude(y1), g2 = detail::gradient_magnitude(y2);

  const double t1 = cfg.fsim_t1, t2 = cfg.fsim_t2;
  const Eigen::ArrayXXd s_pc = (2.0 * pc1 * pc2 + t1) / (pc1.square() + pc2.square() + t1);
  const Eigen::ArrayXXd s_g = (2.0 * g1 * g2 + t2) / (g1.square() + g2.square() + t2);
  const Eigen::ArrayXXd s_l = s_pc * s_g;
  const Eigen::ArrayXXd pc_m = pc1.max(pc2);
  const double weight = pc_m.sum();
  // Featureless pair (no phase congruency anywhere): unweighted mean.
  if (weight == 0.0) return s_l.mean();
  return (s_l * pc_m).sum() / weight;
}

}  // namespace lrqmc
