// SPDX-License-Identifier: Apache-2.0
#include "core/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "core/descriptors.hpp"
#include "core/rng.hpp"

namespace nnsc {

namespace {

std::string padded(std::uint32_t v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*u", width, v);
  return buf;
}

}  // namespace

void generate_synthetic_dataset(const std::string& dataset_dir, const SyntheticOptions& opts) {
  if (opts.classes < 2) throw std::invalid_argument("need at least two classes");
  if (opts.images_per_class == 0 || opts.descriptors_per_image == 0)
    throw std::invalid_argument("dataset must be non-empty");
  if (opts.atoms_per_class == 0) throw std::invalid_argument("need at least one atom per class");
  const std::uint32_t block = opts.dim / opts.classes;
  if (block < 2) throw std::invalid_argument("dim too small for the class count");

  // Ground-truth atoms: per class, unit-norm nonnegative vectors supported on
  // that class's coordinate block.
  const std::uint32_t total_atoms = opts.classes * opts.atoms_per_class;
  std::vector<double> atoms(std::size_t(total_atoms) * opts.dim, 0.0);
  Rng atom_rng(derive_seed(opts.seed, "synthetic-atoms"));
  for (std::uint32_t c = 0; c < opts.classes; ++c) {
    for (std::uint32_t a = 0; a < opts.atoms_per_class; ++a) {
      double* atom = atoms.data() + std::size_t(c * opts.atoms_per_class + a) * opts.dim;
      double norm2 = 0.0;
      for (std::uint32_t i = 0; i < block; ++i) {
        const double v = atom_rng.next_uniform(0.1, 1.0);
        atom[c * block + i] = v;
        norm2 += v * v;
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::uint32_t i = 0; i < block; ++i) atom[c * block + i] *= inv;
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(dataset_dir);
  for (std::uint32_t c = 0; c < opts.classes; ++c) {
    const fs::path class_dir = fs::path(dataset_dir) / ("class_" + padded(c, 2));
    fs::create_directories(class_dir);
    for (std::uint32_t img = 0; img < opts.images_per_class; ++img) {
      Rng rng(derive_seed(opts.seed, "synthetic-image", (std::uint64_t(c) << 32) | img));
      DescriptorSet set;
      set.dim = opts.dim;
      set.image_width = opts.image_size;
      set.image_height = opts.image_size;
      set.data.resize(std::size_t(opts.descriptors_per_image) * opts.dim);
      set.locations.resize(std::size_t(opts.descriptors_per_image) * 2);
      for (std::uint32_t d = 0; d < opts.descriptors_per_image; ++d) {
        const std::uint32_t a = std::uint32_t(rng.next_below(opts.atoms_per_class));
        const double scale = rng.next_uniform(0.5, 1.0);
        const double* atom = atoms.data() + std::size_t(c * opts.atoms_per_class + a) * opts.dim;
        for (std::uint32_t i = 0; i < opts.dim; ++i)
          set.data[std::size_t(d) * opts.dim + i] = float(scale * atom[i]);
        set.locations[2 * d] = float(rng.next_uniform(0.0, double(opts.image_size)));
        set.locations[2 * d + 1] = float(rng.next_uniform(0.0, double(opts.image_size)));
      }
      save_descriptors(set, (class_dir / ("img_" + padded(img, 4) + ".nnsc")).string());
    }
  }
}

}  // namespace nnsc
