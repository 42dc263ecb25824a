// SPDX-License-Identifier: Apache-2.0
#include "core/io_util.hpp"

#include <cstring>

namespace nnsc::io {

namespace {

constexpr bool kLittle = std::endian::native == std::endian::little;

std::uint32_t bswap32(std::uint32_t v) {
  return ((v & 0x000000ffu) << 24) | ((v & 0x0000ff00u) << 8) |
         ((v & 0x00ff0000u) >> 8) | ((v & 0xff000000u) >> 24);
}

std::uint64_t bswap64(std::uint64_t v) {
  return (std::uint64_t(bswap32(std::uint32_t(v))) << 32) | bswap32(std::uint32_t(v >> 32));
}

void write_raw(std::ostream& os, const void* data, std::size_t n) {
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!os) throw io_error("write failed");
}

void read_raw(std::istream& is, void* data, std::size_t n, const char* what) {
  is.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw format_error(std::string("truncated file while reading ") + what);
}

}  // namespace

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open for reading: " + path);
  return is;
}

void write_u32(std::ostream& os, std::uint32_t v) {
  if constexpr (!kLittle) v = bswap32(v);
  write_raw(os, &v, sizeof v);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  if constexpr (!kLittle) v = bswap64(v);
  write_raw(os, &v, sizeof v);
}

void write_f32(std::ostream& os, float v) {
  write_u32(os, std::bit_cast<std::uint32_t>(v));
}

void write_f32_array(std::ostream& os, std::span<const float> values) {
  if constexpr (kLittle) {
    if (!values.empty()) write_raw(os, values.data(), values.size() * sizeof(float));
  } else {
    for (float v : values) write_f32(os, v);
  }
}

void write_magic(std::ostream& os, const char magic[4]) { write_raw(os, magic, 4); }

void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  if (!s.empty()) write_raw(os, s.data(), s.size());
}

std::uint32_t read_u32(std::istream& is, const char* what) {
  std::uint32_t v;
  read_raw(is, &v, sizeof v, what);
  if constexpr (!kLittle) v = bswap32(v);
  return v;
}

std::uint64_t read_u64(std::istream& is, const char* what) {
  std::uint64_t v;
  read_raw(is, &v, sizeof v, what);
  if constexpr (!kLittle) v = bswap64(v);
  return v;
}

float read_f32(std::istream& is, const char* what) {
  return std::bit_cast<float>(read_u32(is, what));
}

std::vector<float> read_f32_array(std::istream& is, std::size_t count, const char* what) {
  std::vector<float> out(count);
  if constexpr (kLittle) {
    if (count > 0) read_raw(is, out.data(), count * sizeof(float), what);
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = read_f32(is, what);
  }
  return out;
}

void expect_magic(std::istream& is, const char magic[4], const char* format_name) {
  char got[4];
  read_raw(is, got, 4, format_name);
  if (std::memcmp(got, magic, 4) != 0)
    throw format_error(std::string("bad magic for ") + format_name + " file");
}

std::string read_string(std::istream& is, const char* what) {
  const std::uint32_t len = read_u32(is, what);
  std::string s(len, '\0');
  if (len > 0) read_raw(is, s.data(), len, what);
  return s;
}

void expect_eof(std::istream& is, const char* format_name) {
  char c;
  is.read(&c, 1);
  if (is.gcount() != 0)
    throw format_error(std::string("trailing bytes in ") + format_name + " file");
}

}  // namespace nnsc::io
