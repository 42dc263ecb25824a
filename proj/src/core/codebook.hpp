// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "core/descriptors.hpp"
#include "core/dictionary.hpp"

namespace nnsc {

struct TrainLog {
  std::vector<double> objectives;  // one value per (outer) iteration
  std::uint32_t iterations = 0;
  bool converged = false;
};

struct KmeansResult {
  Dictionary dictionary;        // centres normalised to unit norm at export
  TrainLog log;                 // quantisation error per Lloyd iteration
  std::vector<double> centers;  // raw centres before normalisation, p x L row-major
};

// Lloyd's alternation from a seeded sample of p distinct descriptors. Stops
// when assignments stabilise or after max_iter rounds. An emptied cluster is
// re-seeded with the point farthest from its current centre (ties to the
// lowest index), which keeps the objective non-increasing.
KmeansResult kmeans_train(const DescriptorSet& data, std::uint32_t p, std::uint32_t max_iter,
                          std::uint64_t seed, unsigned workers = 1);

struct ScDictTrace {
  std::vector<std::vector<double>> dictionaries;  // per recorded objective, dim x p column-major
  std::vector<std::vector<double>> codes;         // per recorded objective, M x p row-major
};

struct ScDictResult {
  Dictionary dictionary;
  TrainLog log;  // full l1 sparse-coding objective, one value per coding pass
};

// Alternating sparse-coding dictionary learning: a signed l1 coding pass with
// the dictionary fixed, then a cyclic column update projected back to unit
// norm. outer_iters = 0 returns the seeded initialisation after one coding
// pass (a single recorded objective). The optional trace captures every
// recorded iterate for verification.
ScDictResult sc_dictionary_train(const DescriptorSet& data, std::uint32_t p, double lambda,
                                 std::uint32_t outer_iters, std::uint64_t seed,
                                 unsigned workers = 1, ScDictTrace* trace = nullptr);

}  // namespace nnsc
