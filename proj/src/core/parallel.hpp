// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace nnsc {

// Resolves 0 to the hardware thread count.
unsigned resolve_workers(unsigned workers);

// Runs fn(i) for every i in [0, n). Each index owns its output slot, so the
// result is identical for any worker count. Exceptions from fn are rethrown
// on the calling thread.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace nnsc
