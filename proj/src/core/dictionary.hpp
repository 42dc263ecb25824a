// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nnsc {

// Codebook: column-major L x p matrix, one unit-l2-norm atom per column.
struct Dictionary {
  std::uint32_t dim = 0;   // L
  std::uint32_t size = 0;  // p, number of atoms
  std::vector<double> atoms;  // dim * size, column-major

  std::span<const double> atom(std::size_t k) const { return {atoms.data() + k * dim, dim}; }
};

// Validates shape, finiteness and column norms (within norm_tol of 1).
// Freshly trained dictionaries satisfy 1e-9; files reloaded through the
// float32 codebook format satisfy 1e-4.
Dictionary make_dictionary(std::uint32_t dim, std::uint32_t size, std::vector<double> atoms,
                           double norm_tol = 1e-9);

// Binary codebook format, magic "NNCB".
void save_codebook(const Dictionary& dict, const std::string& path);
Dictionary load_codebook(const std::string& path);

}  // namespace nnsc
