// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace nnsc {

// Dense local descriptors with their pixel locations.
struct DescriptorSet {
  std::uint32_t dim = 0;           // L
  std::uint32_t image_width = 0;   // extent the locations refer to
  std::uint32_t image_height = 0;
  std::vector<float> data;         // count * dim, row-major, nonnegative
  std::vector<float> locations;    // count * 2, (x, y) pairs

  std::size_t count() const { return locations.size() / 2; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  float x(std::size_t i) const { return locations[2 * i]; }
  float y(std::size_t i) const { return locations[2 * i + 1]; }
};

inline constexpr std::uint32_t kDescriptorDim = 128;  // 4x4 cells x 8 orientation bins

// Extracts one descriptor per patch on a regular grid: per-pixel gradients by
// central differences (replicated borders), gradient magnitudes accumulated
// into 4x4 spatial cells x 8 hard-assigned orientation bins, l2-normalised,
// clamped at 0.2 and renormalised. A patch with no gradient energy yields the
// zero vector. Locations are patch centres.
DescriptorSet extract_dense(const GrayImage& image, std::uint32_t patch = 16,
                            std::uint32_t step = 8);

// Binary interchange format, magic "NNSC".
void save_descriptors(const DescriptorSet& set, const std::string& path);
DescriptorSet load_descriptors(const std::string& path);

}  // namespace nnsc
