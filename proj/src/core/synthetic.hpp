// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace nnsc {

// Desk-scale dataset for end-to-end checks: every descriptor is a positive
// multiple of one ground-truth atom, and each class draws from its own atom
// set on a disjoint coordinate block, so pooled features are linearly
// separable by construction.
struct SyntheticOptions {
  std::uint32_t classes = 3;
  std::uint32_t images_per_class = 40;
  std::uint32_t descriptors_per_image = 36;
  std::uint32_t dim = 24;             // descriptor dimension L
  std::uint32_t atoms_per_class = 4;
  std::uint32_t image_size = 64;      // square extent the locations live in
  std::uint64_t seed = 1;
};

// Writes dataset_dir/class_XX/img_XXXX.nnsc descriptor files.
void generate_synthetic_dataset(const std::string& dataset_dir, const SyntheticOptions& opts);

}  // namespace nnsc
