// SPDX-License-Identifier: Apache-2.0
#include "core/dictionary.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace nnsc {

namespace {
constexpr char kMagic[4] = {'N', 'N', 'C', 'B'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

Dictionary make_dictionary(std::uint32_t dim, std::uint32_t size, std::vector<double> atoms,
                           double norm_tol) {
  if (dim == 0 || size == 0) throw std::invalid_argument("dictionary dimensions must be positive");
  if (atoms.size() != std::size_t(dim) * size)
    throw std::invalid_argument("atom buffer does not match dictionary dimensions");
  for (std::uint32_t k = 0; k < size; ++k) {
    double norm2 = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
      const double v = atoms[std::size_t(k) * dim + i];
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite dictionary atom");
      norm2 += v * v;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > norm_tol)
      throw std::invalid_argument("dictionary atom is not unit l2 norm");
  }
  Dictionary d;
  d.dim = dim;
  d.size = size;
  d.atoms = std::move(atoms);
  return d;
}

void save_codebook(const Dictionary& dict, const std::string& path) {
  auto os = io::open_output(path);
  io::write_magic(os, kMagic);
  io::write_u32(os, kVersion);
  io::write_u32(os, dict.dim);
  io::write_u32(os, dict.size);
  std::vector<float> buf(dict.atoms.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = float(dict.atoms[i]);
  io::write_f32_array(os, buf);
  os.flush();
  if (!os) throw io_error("write failed: " + path);
}

Dictionary load_codebook(const std::string& path) {
  auto is = io::open_input(path);
  io::expect_magic(is, kMagic, "codebook");
  const std::uint32_t version = io::read_u32(is, "codebook version");
  if (version != kVersion) throw format_error("unsupported codebook file version");
  const std::uint32_t dim = io::read_u32(is, "codebook dim");
  const std::uint32_t size = io::read_u32(is, "codebook size");
  if (dim == 0 || size == 0) throw format_error("codebook dimensions must be positive");
  const auto buf = io::read_f32_array(is, std::size_t(dim) * size, "codebook atoms");
  io::expect_eof(is, "codebook");

  std::vector<double> atoms(buf.begin(), buf.end());
  try {
    // float32 storage perturbs norms by ~1e-7; atoms are not renormalised so
    // that load/save round-trips are byte-exact.
    return make_dictionary(dim, size, std::move(atoms), 1e-4);
  } catch (const std::invalid_argument& e) {
    throw format_error(std::string("invalid codebook: ") + e.what());
  }
}

}  // namespace nnsc
