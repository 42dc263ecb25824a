// SPDX-License-Identifier: Apache-2.0
#include "core/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace nnsc {

namespace {
constexpr char kMagic[4] = {'N', 'N', 'F', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t cell_index(float coord, std::uint32_t extent, std::uint32_t cells) {
  const auto idx = std::uint32_t(double(coord) * cells / extent);
  return std::min(idx, cells - 1);
}
}  // namespace

std::vector<double> max_pool(std::span<const double> rows, std::size_t row_count, std::size_t p) {
  if (p == 0 || rows.size() != row_count * p)
    throw std::invalid_argument("code rows do not match the stated width");
  std::vector<double> pooled(p, 0.0);
  for (std::size_t r = 0; r < row_count; ++r) {
    const double* row = rows.data() + r * p;
    if (r == 0) {
      std::copy(row, row + p, pooled.begin());
    } else {
      for (std::size_t j = 0; j < p; ++j) pooled[j] = std::max(pooled[j], row[j]);
    }
  }
  return pooled;
}

PyramidFeature build_pyramid(const CodedImage& coded) {
  const std::uint32_t p = coded.code_dim;
  const std::size_t m = coded.count();
  if (p == 0) throw std::invalid_argument("code dim must be positive");
  if (coded.codes.size() != m * p) throw std::invalid_argument("code matrix size mismatch");
  if (coded.image_width == 0 || coded.image_height == 0)
    throw std::invalid_argument("image extent must be positive");
  for (std::size_t i = 0; i < m; ++i) {
    const float x = coded.locations[2 * i], y = coded.locations[2 * i + 1];
    if (!(x >= 0.0f && x <= float(coded.image_width) && y >= 0.0f &&
          y <= float(coded.image_height)))
      throw std::invalid_argument("descriptor location outside image bounds");
  }

  PyramidFeature feature;
  feature.code_dim = p;
  feature.values.assign(std::size_t(kPyramidCells) * p, 0.0);
  std::vector<bool> seen(kPyramidCells, false);

  for (std::size_t i = 0; i < m; ++i) {
    const double* row = coded.codes.data() + i * p;
    std::uint32_t base = 0;
    for (std::uint32_t level = 0; level <= 2; ++level) {
      const std::uint32_t n = 1u << level;
      const std::uint32_t col = cell_index(coded.locations[2 * i], coded.image_width, n);
      const std::uint32_t rowc = cell_index(coded.locations[2 * i + 1], coded.image_height, n);
      const std::uint32_t cell = base + rowc * n + col;
      double* out = feature.values.data() + std::size_t(cell) * p;
      if (!seen[cell]) {
        std::copy(row, row + p, out);
        seen[cell] = true;
      } else {
        for (std::uint32_t j = 0; j < p; ++j) out[j] = std::max(out[j], row[j]);
      }
      base += n * n;
    }
  }

  double norm2 = 0.0;
  for (const double v : feature.values) norm2 += v * v;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : feature.values) v *= inv;
  }
  return feature;
}

void save_features(const FeatureSet& set, const std::string& path) {
  auto os = io::open_output(path);
  io::write_magic(os, kMagic);
  io::write_u32(os, kVersion);
  io::write_u64(os, set.count());
  io::write_u32(os, set.dim);
  io::write_f32_array(os, set.data);
  for (const auto label : set.labels) io::write_u32(os, label);
  os.flush();
  if (!os) throw io_error("write failed: " + path);
}

FeatureSet load_features(const std::string& path) {
  auto is = io::open_input(path);
  io::expect_magic(is, kMagic, "feature");
  const std::uint32_t version = io::read_u32(is, "feature version");
  if (version != kVersion) throw format_error("unsupported feature file version");
  FeatureSet set;
  const std::uint64_t count = io::read_u64(is, "feature count");
  set.dim = io::read_u32(is, "feature dim");
  if (set.dim == 0) throw format_error("feature dim must be positive");
  set.data = io::read_f32_array(is, std::size_t(count) * set.dim, "feature data");
  set.labels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) set.labels[i] = io::read_u32(is, "feature labels");
  io::expect_eof(is, "feature");
  for (const float v : set.data)
    if (!std::isfinite(v)) throw format_error("non-finite feature value");
  return set;
}

}  // namespace nnsc
