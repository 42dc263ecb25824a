// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace nnsc {

// Malformed or truncated binary file content.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File open/read/write failure.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nnsc
