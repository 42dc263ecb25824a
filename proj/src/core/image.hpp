// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nnsc {

// Row-major grayscale raster with intensities in [0, 1].
struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> pixels;  // width * height

  float at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t(y) * width + x]; }
};

// Reads a PGM (P2/P5) or PPM (P3/P6) file with 8-bit samples; colour inputs
// are converted to luma (Rec. 601). Throws io_error / format_error.
GrayImage load_image(const std::string& path);

bool has_image_extension(const std::string& path);

}  // namespace nnsc
