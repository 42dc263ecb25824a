// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

// Little-endian binary readers/writers shared by all file formats.
namespace nnsc::io {

std::ofstream open_output(const std::string& path);
std::ifstream open_input(const std::string& path);

void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f32(std::ostream& os, float v);
void write_f32_array(std::ostream& os, std::span<const float> values);
void write_magic(std::ostream& os, const char magic[4]);
void write_string(std::ostream& os, const std::string& s);

std::uint32_t read_u32(std::istream& is, const char* what);
std::uint64_t read_u64(std::istream& is, const char* what);
float read_f32(std::istream& is, const char* what);
std::vector<float> read_f32_array(std::istream& is, std::size_t count, const char* what);
void expect_magic(std::istream& is, const char magic[4], const char* format_name);
std::string read_string(std::istream& is, const char* what);

// Throws format_error if the stream still holds unread bytes.
void expect_eof(std::istream& is, const char* format_name);

}  // namespace nnsc::io
