// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/pooling.hpp"

namespace nnsc {

// One-vs-rest linear classifier; the on-disk format is "NNSV".
struct LinearModel {
  std::uint32_t classes = 0;  // C
  std::uint32_t dim = 0;      // F
  std::vector<float> weights;  // C * F, row-major
  std::vector<float> biases;   // C
  std::vector<std::string> class_names;  // C identifiers
};

struct SvmTrainLog {
  // Dual objective after each epoch, per class; exact coordinate minimisation
  // makes these non-increasing.
  std::vector<std::vector<double>> dual_objectives;
  // Final primal objective 0.5 (||w||^2 + b^2) + C sum max(0, 1 - y f)^2.
  std::vector<double> primal_objectives;
};

// Trains C one-vs-rest squared-hinge SVMs by dual coordinate descent with a
// seeded per-epoch permutation. The bias is handled as an augmented,
// regularised feature. Deterministic for a fixed seed.
LinearModel svm_train(const FeatureSet& data, std::vector<std::string> class_names, double reg_c,
                      std::uint32_t epochs, std::uint64_t seed, SvmTrainLog* log = nullptr,
                      unsigned workers = 1);

// argmax_c w_c' x + b_c per row; ties break to the lowest class index.
std::vector<std::uint32_t> svm_predict(const LinearModel& model, std::span<const float> rows,
                                       std::size_t row_count);

void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace nnsc
