// SPDX-License-Identifier: Apache-2.0
#include "core/descriptors.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace nnsc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr char kMagic[4] = {'N', 'N', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

DescriptorSet extract_dense(const GrayImage& image, std::uint32_t patch, std::uint32_t step) {
  if (patch < 8) throw std::invalid_argument("patch size must be >= 8");
  if (step < 1) throw std::invalid_argument("step must be >= 1");
  const std::uint32_t w = image.width, h = image.height;
  if (image.pixels.size() != std::size_t(w) * h)
    throw std::invalid_argument("pixel buffer does not match image dimensions");
  if (w < 16 || h < 16 || w < patch || h < patch)
    throw std::invalid_argument("image too small for one patch (need >= 16x16 and >= patch)");
  for (const float v : image.pixels) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite pixel intensity");
    if (v < 0.0f || v > 1.0f) throw std::invalid_argument("pixel intensity outside [0, 1]");
  }

  // Per-pixel gradients once for the whole image.
  std::vector<double> gx(std::size_t(w) * h), gy(std::size_t(w) * h);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint32_t xp = x + 1 < w ? x + 1 : w - 1;
      const std::uint32_t xm = x > 0 ? x - 1 : 0;
      const std::uint32_t yp = y + 1 < h ? y + 1 : h - 1;
      const std::uint32_t ym = y > 0 ? y - 1 : 0;
      gx[std::size_t(y) * w + x] = 0.5 * (double(image.at(xp, y)) - double(image.at(xm, y)));
      gy[std::size_t(y) * w + x] = 0.5 * (double(image.at(x, yp)) - double(image.at(x, ym)));
    }
  }

  const std::uint32_t nx = (w - patch) / step + 1;
  const std::uint32_t ny = (h - patch) / step + 1;

  DescriptorSet set;
  set.dim = kDescriptorDim;
  set.image_width = w;
  set.image_height = h;
  set.data.resize(std::size_t(nx) * ny * kDescriptorDim);
  set.locations.resize(std::size_t(nx) * ny * 2);

  double hist[kDescriptorDim];
  std::size_t out = 0;
  for (std::uint32_t py = 0; py + patch <= h; py += step) {
    for (std::uint32_t px = 0; px + patch <= w; px += step, ++out) {
      for (double& v : hist) v = 0.0;
      for (std::uint32_t dy = 0; dy < patch; ++dy) {
        for (std::uint32_t dx = 0; dx < patch; ++dx) {
          const std::size_t idx = std::size_t(py + dy) * w + (px + dx);
          const double mag = std::hypot(gx[idx], gy[idx]);
          if (mag == 0.0) continue;
          double theta = std::atan2(gy[idx], gx[idx]);
          if (theta < 0.0) theta += kTwoPi;
          int bin = int(theta / (kTwoPi / 8.0));
          if (bin > 7) bin = 7;  // theta that rounded up to 2*pi
          const std::uint32_t cell = (dy * 4 / patch) * 4 + (dx * 4 / patch);
          hist[cell * 8 + std::uint32_t(bin)] += mag;
        }
      }

      double norm2 = 0.0;
      for (const double v : hist) norm2 += v * v;
      if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        double clipped2 = 0.0;
        for (double& v : hist) {
          v *= inv;
          if (v > 0.2) v = 0.2;
          clipped2 += v * v;
        }
        const double inv2 = 1.0 / std::sqrt(clipped2);
        for (double& v : hist) v *= inv2;
      }

      float* row = set.data.data() + out * kDescriptorDim;
      for (std::uint32_t k = 0; k < kDescriptorDim; ++k) row[k] = float(hist[k]);
      set.locations[2 * out] = float(px) + float(patch) * 0.5f;
      set.locations[2 * out + 1] = float(py) + float(patch) * 0.5f;
    }
  }
  return set;
}

void save_descriptors(const DescriptorSet& set, const std::string& path) {
  auto os = io::open_output(path);
  io::write_magic(os, kMagic);
  io::write_u32(os, kVersion);
  io::write_u64(os, set.count());
  io::write_u32(os, set.dim);
  io::write_u32(os, set.image_width);
  io::write_u32(os, set.image_height);
  io::write_f32_array(os, set.data);
  io::write_f32_array(os, set.locations);
  os.flush();
  if (!os) throw io_error("write failed: " + path);
}

DescriptorSet load_descriptors(const std::string& path) {
  auto is = io::open_input(path);
  io::expect_magic(is, kMagic, "descriptor");
  const std::uint32_t version = io::read_u32(is, "descriptor version");
  if (version != kVersion) throw format_error("unsupported descriptor file version");

  DescriptorSet set;
  const std::uint64_t count = io::read_u64(is, "descriptor count");
  set.dim = io::read_u32(is, "descriptor dim");
  set.image_width = io::read_u32(is, "image width");
  set.image_height = io::read_u32(is, "image height");
  if (set.dim == 0) throw format_error("descriptor dim must be positive");
  set.data = io::read_f32_array(is, std::size_t(count) * set.dim, "descriptor data");
  set.locations = io::read_f32_array(is, std::size_t(count) * 2, "descriptor locations");
  io::expect_eof(is, "descriptor");

  for (std::uint64_t i = 0; i < count; ++i) {
    double norm2 = 0.0;
    for (std::uint32_t k = 0; k < set.dim; ++k) {
      const float v = set.data[i * set.dim + k];
      if (!std::isfinite(v)) throw format_error("non-finite descriptor value");
      norm2 += double(v) * v;
    }
    if (std::sqrt(norm2) > 1.0 + 1e-6) throw format_error("descriptor l2 norm exceeds 1");
    const float x = set.locations[2 * i], y = set.locations[2 * i + 1];
    if (!(x >= 0.0f && x <= float(set.image_width) && y >= 0.0f && y <= float(set.image_height)))
      throw format_error("descriptor location outside image bounds");
  }
  return set;
}

}  // namespace nnsc
