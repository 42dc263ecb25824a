// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/codebook.hpp"
#include "core/descriptors.hpp"
#include "core/dictionary.hpp"
#include "core/pooling.hpp"
#include "core/solver.hpp"

namespace nnsc {

// sc: signed l1 coding. nsc: nonnegative l1. nnsc: nonnegative l1 with the
// support-detection outer loop.
enum class CodingMode { kSc, kNsc, kNnsc };

enum class CodebookMethod { kKmeans, kSparseCoding };

CodingMode parse_coding_mode(const std::string& name);
const char* coding_mode_name(CodingMode mode);

struct PipelineConfig {
  CodingMode mode = CodingMode::kNnsc;
  double lambda = 0.3;
  double beta = 1.4;
  double reg_c = 1.0;
  std::uint32_t codebook_size = 1024;
  CodebookMethod codebook_method = CodebookMethod::kKmeans;
  std::uint32_t patch = 16;
  std::uint32_t step = 8;
  std::uint32_t train_per_class = 100;
  std::uint32_t splits = 5;
  std::uint64_t seed = 1;
  std::uint64_t sample_limit = 50000;  // descriptors sampled for codebook training
  std::uint32_t kmeans_max_iter = 100;
  std::uint32_t sc_outer_iters = 10;
  std::uint32_t svm_epochs = 100;
  double inner_tol = 1e-6;
  std::uint32_t inner_max_iter = 10000;
  std::uint32_t outer_max_iter = 5;
  bool fixed_codebook = false;  // train once on the first split, reuse after
  unsigned workers = 0;         // 0 = hardware concurrency

  SolverConfig solver_config() const;
};

// Codes every descriptor with the mode's solver and pools the result.
PyramidFeature encode_image(const DescriptorSet& descriptors, const Dictionary& dict,
                            const PipelineConfig& cfg, unsigned workers = 1);

struct SplitResult {
  double accuracy = 0.0;
  std::vector<std::uint64_t> confusion;  // classes x classes, rows = true class
  std::uint64_t test_count = 0;
};

struct StageTiming {
  double load_seconds = 0.0;
  double codebook_seconds = 0.0;
  double encode_seconds = 0.0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<std::string> class_names;
  std::vector<std::uint64_t> images_per_class;
  std::vector<SplitResult> splits;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample (n-1) deviation; 0 for a single split
  StageTiming timing;
};

// Runs the full protocol: per split, a seeded disjoint train/test partition
// per class, codebook training on up to sample_limit training descriptors,
// encoding, one-vs-rest SVM training and test evaluation.
//
// dataset_dir holds one subdirectory per class containing descriptor files
// (.nnsc) or PGM/PPM images.
ExperimentReport run_experiment(const PipelineConfig& cfg, const std::string& dataset_dir);

// Deterministic report: plain-text table plus line-oriented key=value
// summary. Excludes timings, which are run-dependent; render_timing covers
// those for diagnostic output.
std::string render_report(const ExperimentReport& report, const PipelineConfig& cfg);
std::string render_timing(const ExperimentReport& report);

// Dataset access shared with the CLI.
struct DatasetIndex {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::string>> files;  // per class, sorted
};
DatasetIndex scan_dataset(const std::string& dataset_dir);
DescriptorSet load_input_descriptors(const std::string& path, std::uint32_t patch,
                                     std::uint32_t step);

}  // namespace nnsc
