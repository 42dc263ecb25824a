// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nnsc {

// Per-descriptor codes with the locations they were extracted at.
struct CodedImage {
  std::uint32_t code_dim = 0;  // p
  std::uint32_t image_width = 0;
  std::uint32_t image_height = 0;
  std::vector<double> codes;     // count * code_dim, row-major
  std::vector<float> locations;  // count * 2, (x, y)

  std::size_t count() const { return locations.size() / 2; }
};

// 21 = 1 + 4 + 16 cells over pyramid levels 0, 1, 2.
inline constexpr std::uint32_t kPyramidCells = 21;

// Concatenated max-pooled pyramid, l2-normalised (all-zero when no code is
// nonzero). Length is exactly kPyramidCells * code_dim.
struct PyramidFeature {
  std::uint32_t code_dim = 0;
  std::vector<double> values;
};

// Componentwise maximum over `row_count` rows of width p (flat row-major).
// An empty region pools to the zero vector.
std::vector<double> max_pool(std::span<const double> rows, std::size_t row_count, std::size_t p);

// Levels l = 0, 1, 2 partition the image into 2^l x 2^l equal cells; a
// location's cell is found by floor division with the right/bottom edge
// folded into the last cell. Cells are concatenated level by level in
// row-major order, then the whole vector is l2-normalised.
PyramidFeature build_pyramid(const CodedImage& coded);

// Feature rows with class labels; the on-disk format is "NNFT".
struct FeatureSet {
  std::uint32_t dim = 0;
  std::vector<float> data;  // count * dim, row-major
  std::vector<std::uint32_t> labels;

  std::size_t count() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

void save_features(const FeatureSet& set, const std::string& path);
FeatureSet load_features(const std::string& path);

}  // namespace nnsc
