// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "core/descriptors.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace nnsc;

namespace {

GrayImage constant_image(std::uint32_t w, std::uint32_t h, float value) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(std::size_t(w) * h, value);
  return img;
}

GrayImage random_image(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
  GrayImage img = constant_image(w, h, 0.0f);
  Rng rng(seed);
  for (auto& p : img.pixels) p = float(rng.next_double());
  return img;
}

double row_norm(const DescriptorSet& set, std::size_t i) {
  double s = 0.0;
  for (const float v : set.row(i)) s += double(v) * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("grid arithmetic fixes the descriptor count") {
  const auto set = extract_dense(random_image(32, 32, 1), 16, 8);
  CHECK(set.count() == 9);  // 3 x 3 grid
  CHECK(set.dim == kDescriptorDim);

  // count = floor((w-patch)/step + 1) * floor((h-patch)/step + 1)
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const std::uint32_t w = 16 + std::uint32_t(rng.next_below(60));
    const std::uint32_t h = 16 + std::uint32_t(rng.next_below(60));
    const std::uint32_t patch = 8 + 2 * std::uint32_t(rng.next_below(5));
    const std::uint32_t step = 1 + std::uint32_t(rng.next_below(9));
    if (w < patch || h < patch) continue;
    const auto s = extract_dense(random_image(w, h, rng.next()), patch, step);
    const std::size_t expect =
        (std::size_t((w - patch) / step) + 1) * (std::size_t((h - patch) / step) + 1);
    CHECK(s.count() == expect);
  }
}

TEST_CASE("constant image yields all-zero descriptors") {
  const auto set = extract_dense(constant_image(32, 32, 0.5f), 16, 8);
  REQUIRE(set.count() == 9);
  for (const float v : set.data) CHECK(v == 0.0f);
  for (std::size_t i = 0; i < set.count(); ++i) CHECK(row_norm(set, i) == 0.0);
}

TEST_CASE("vertical step edge concentrates mass in the horizontal bins") {
  // 16x16 image, left half 0, right half 1; a single centred patch.
  GrayImage img = constant_image(16, 16, 0.0f);
  for (std::uint32_t y = 0; y < 16; ++y)
    for (std::uint32_t x = 8; x < 16; ++x) img.pixels[y * 16 + x] = 1.0f;

  const auto set = extract_dense(img, 16, 8);
  REQUIRE(set.count() == 1);
  const auto d = set.row(0);

  // Frozen oracle: gradient magnitude 0.5 in columns 7 and 8 only, all in
  // orientation bin 0; after the 0.2 clamp the eight populated (cell, bin)
  // slots each hold 1/sqrt(8).
  const std::size_t expected_nonzero[] = {8, 16, 40, 48, 72, 80, 104, 112};
  const float expected_value = float(1.0 / std::sqrt(8.0));
  std::size_t nz = 0;
  for (std::size_t k = 0; k < kDescriptorDim; ++k) {
    const bool should_hit =
        std::find(std::begin(expected_nonzero), std::end(expected_nonzero), k) !=
        std::end(expected_nonzero);
    if (should_hit) {
      CHECK(d[k] == doctest::Approx(expected_value).epsilon(1e-6));
      ++nz;
    } else {
      CHECK(d[k] == 0.0f);
    }
  }
  CHECK(nz == 8);

  // >= 90% of the mass in the two bins nearest the horizontal direction.
  double mass_near = 0.0, mass_total = 0.0;
  for (std::size_t k = 0; k < kDescriptorDim; ++k) {
    const double sq = double(d[k]) * d[k];
    mass_total += sq;
    if (k % 8 == 0 || k % 8 == 7) mass_near += sq;
  }
  CHECK(mass_near >= 0.9 * mass_total);

  CHECK(set.x(0) == 8.0f);  // patch centre
  CHECK(set.y(0) == 8.0f);
}

TEST_CASE("descriptor norms are zero or unit") {
  const auto set = extract_dense(random_image(48, 40, 5), 16, 8);
  for (std::size_t i = 0; i < set.count(); ++i) {
    const double n = row_norm(set, i);
    const bool ok = n == 0.0 || (n >= 1.0 - 1e-6 && n <= 1.0 + 1e-6);
    CHECK(ok);
  }
}

TEST_CASE("extraction is deterministic") {
  const auto img = random_image(40, 40, 11);
  const auto a = extract_dense(img, 16, 8);
  const auto b = extract_dense(img, 16, 8);
  CHECK(a.data == b.data);
  CHECK(a.locations == b.locations);
}

TEST_CASE("locations are patch centres inside bounds") {
  const auto set = extract_dense(random_image(32, 24, 3), 16, 8);
  REQUIRE(set.count() == 6);
  for (std::size_t i = 0; i < set.count(); ++i) {
    CHECK(set.x(i) >= 8.0f);
    CHECK(set.x(i) <= 24.0f);
    CHECK(set.y(i) >= 8.0f);
    CHECK(set.y(i) <= 16.0f);
  }
}

TEST_CASE("extraction errors") {
  CHECK_THROWS_AS(extract_dense(random_image(16, 16, 1), 4, 8), std::invalid_argument);
  CHECK_THROWS_AS(extract_dense(random_image(16, 16, 1), 16, 0), std::invalid_argument);
  // image smaller than one patch
  CHECK_THROWS_AS(extract_dense(random_image(16, 16, 1), 32, 8), std::invalid_argument);
  CHECK_THROWS_AS(extract_dense(constant_image(12, 32, 0.5f), 8, 8), std::invalid_argument);
  // non-finite / out-of-range pixels
  GrayImage img = constant_image(16, 16, 0.5f);
  img.pixels[5] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(extract_dense(img, 16, 8), std::invalid_argument);
  img.pixels[5] = 2.0f;
  CHECK_THROWS_AS(extract_dense(img, 16, 8), std::invalid_argument);
}

TEST_CASE("save/load round-trips bit-exactly") {
  test_util::TempDir tmp("desc");
  const auto set = extract_dense(random_image(32, 32, 9), 16, 8);
  const auto path = tmp.file("a.nnsc");
  save_descriptors(set, path);
  const auto loaded = load_descriptors(path);
  CHECK(loaded.dim == set.dim);
  CHECK(loaded.image_width == set.image_width);
  CHECK(loaded.image_height == set.image_height);
  CHECK(std::memcmp(loaded.data.data(), set.data.data(), set.data.size() * sizeof(float)) == 0);
  CHECK(std::memcmp(loaded.locations.data(), set.locations.data(),
                    set.locations.size() * sizeof(float)) == 0);

  // Byte-level: saving the loaded set reproduces the file.
  const auto path2 = tmp.file("b.nnsc");
  save_descriptors(loaded, path2);
  CHECK(test_util::read_bytes(path) == test_util::read_bytes(path2));
}

TEST_CASE("format errors") {
  test_util::TempDir tmp("descfmt");

  const auto empty = tmp.file("empty.nnsc");
  test_util::write_bytes(empty, {});
  CHECK_THROWS_AS(load_descriptors(empty), format_error);

  const auto bad = tmp.file("bad.nnsc");
  test_util::write_bytes(bad, {'X', 'X', 'X', 'X', 1, 0, 0, 0});
  CHECK_THROWS_AS(load_descriptors(bad), format_error);

  // Truncation: drop the tail of a valid file.
  const auto good = tmp.file("good.nnsc");
  save_descriptors(extract_dense(random_image(32, 32, 2), 16, 8), good);
  auto bytes = test_util::read_bytes(good);
  bytes.resize(bytes.size() - 5);
  const auto trunc = tmp.file("trunc.nnsc");
  test_util::write_bytes(trunc, bytes);
  CHECK_THROWS_AS(load_descriptors(trunc), format_error);

  CHECK_THROWS_AS(load_descriptors(tmp.file("missing.nnsc")), io_error);
}

TEST_CASE("documented file layout parses to exact values") {
  // magic, version=1, M=1 (u64), L=2, width=16, height=16,
  // data [0.5, 0.25], location (8, 8).
  std::vector<char> bytes = {'N', 'N', 'S', 'C'};
  const auto push_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(char((v >> (8 * i)) & 0xff));
  };
  const auto push_f32 = [&](float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    push_u32(v);
  };
  push_u32(1);   // version
  push_u32(1);   // M low word
  push_u32(0);   // M high word
  push_u32(2);   // L
  push_u32(16);  // width
  push_u32(16);  // height
  push_f32(0.5f);
  push_f32(0.25f);
  push_f32(8.0f);
  push_f32(8.0f);

  test_util::TempDir tmp("descspec");
  const auto path = tmp.file("spec.nnsc");
  test_util::write_bytes(path, bytes);
  const auto set = load_descriptors(path);
  REQUIRE(set.count() == 1);
  CHECK(set.dim == 2);
  CHECK(set.image_width == 16);
  CHECK(set.image_height == 16);
  CHECK(set.data[0] == 0.5f);
  CHECK(set.data[1] == 0.25f);
  CHECK(set.x(0) == 8.0f);
  CHECK(set.y(0) == 8.0f);
}
