// SPDX-License-Identifier: Apache-2.0
#include "core/image.hpp"

#include <cctype>
#include <fstream>

#include "core/errors.hpp"

namespace nnsc {

namespace {

// Skips whitespace and '#' comment lines, then reads one unsigned integer.
std::uint64_t read_pnm_uint(std::istream& is, const char* what) {
  int c = is.get();
  for (;;) {
    while (c != EOF && std::isspace(c)) c = is.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = is.get();
      continue;
    }
    break;
  }
  if (c == EOF || !std::isdigit(c)) throw format_error(std::string("bad PNM header: ") + what);
  std::uint64_t v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + std::uint64_t(c - '0');
    c = is.get();
  }
  return v;
}

}  // namespace

GrayImage load_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open image: " + path);

  char p = 0, kind = 0;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
    throw format_error("unsupported image format (want PGM/PPM): " + path);
  const bool color = (kind == '3' || kind == '6');
  const bool binary = (kind == '5' || kind == '6');

  const std::uint64_t width = read_pnm_uint(is, "width");
  const std::uint64_t height = read_pnm_uint(is, "height");
  const std::uint64_t maxval = read_pnm_uint(is, "maxval");
  if (width == 0 || height == 0) throw format_error("empty image: " + path);
  if (maxval == 0 || maxval > 255) throw format_error("unsupported PNM maxval: " + path);

  const std::size_t samples = std::size_t(width) * height * (color ? 3 : 1);
  std::vector<float> raw(samples);
  if (binary) {
    std::vector<unsigned char> buf(samples);
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(samples));
    if (std::size_t(is.gcount()) != samples) throw format_error("truncated image: " + path);
    for (std::size_t i = 0; i < samples; ++i) raw[i] = float(buf[i]);
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      const std::uint64_t v = read_pnm_uint(is, "sample");
      if (v > maxval) throw format_error("sample exceeds maxval: " + path);
      raw[i] = float(v);
    }
  }

  GrayImage img;
  img.width = std::uint32_t(width);
  img.height = std::uint32_t(height);
  img.pixels.resize(std::size_t(width) * height);
  const float scale = 1.0f / float(maxval);
  if (color) {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const float r = raw[3 * i], g = raw[3 * i + 1], b = raw[3 * i + 2];
      img.pixels[i] = scale * (0.299f * r + 0.587f * g + 0.114f * b);
    }
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = scale * raw[i];
  }
  return img;
}

bool has_image_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  std::string ext = path.substr(dot);
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace nnsc
