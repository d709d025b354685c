#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <png.h>

#include "lrqmc/errors.hpp"
#include "lrqmc/image.hpp"

namespace lrqmc {

struct PngReadResult {
  ColorImage image;
  bool had_alpha = false;
};

/// Reads any PNG libpng understands as 8-bit RGB. An alpha channel is
/// discarded, not composited.
inline PngReadResult read_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw InputError("cannot read PNG '" + path + "': " + img.message);

  PngReadResult out;
  out.had_alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  img.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw InputError("cannot decode PNG '" + path + "': " + img.message);
  }

  const Eigen::Index h = img.height, w = img.width;
  out.image = ColorImage(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch)
        out.image.channels[ch](r, c) = buf[static_cast<std::size_t>((r * w + c) * 4) + ch];
  return out;
}

/// Writes 8-bit RGB; values are clamped to [0, 255] and rounded.
inline void write_png(const std::string& path, const ColorImage& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_RGB;

  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  const Eigen::Index h = image.height(), w = image.width();
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double v = std::round(std::clamp(image.channels[ch](r, c), 0.0, 255.0));
        buf[static_cast<std::size_t>((r * w + c) * 3) + ch] = static_cast<std::uint8_t>(v);
      }
  if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
    throw InputError("cannot write PNG '" + path + "': " + img.message);
}

}  // namespace lrqmc
