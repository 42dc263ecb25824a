// SPDX-License-Identifier: Apache-2.0
#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/image.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace nnsc {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool has_descriptor_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot != std::string::npos && path.substr(dot) == ".nnsc";
}

}  // namespace

CodingMode parse_coding_mode(const std::string& name) {
  if (name == "sc") return CodingMode::kSc;
  if (name == "nsc") return CodingMode::kNsc;
  if (name == "nnsc") return CodingMode::kNnsc;
  throw std::invalid_argument("unknown coding mode: " + name + " (want sc|nsc|nnsc)");
}

const char* coding_mode_name(CodingMode mode) {
  switch (mode) {
    case CodingMode::kSc: return "sc";
    case CodingMode::kNsc: return "nsc";
    case CodingMode::kNnsc: return "nnsc";
  }
  return "?";
}

SolverConfig PipelineConfig::solver_config() const {
  SolverConfig solver;
  solver.lambda = lambda;
  solver.beta = beta;
  solver.inner_tol = inner_tol;
  solver.inner_max_iter = inner_max_iter;
  solver.outer_max_iter = outer_max_iter;
  solver.nonnegative = mode != CodingMode::kSc;
  return solver;
}

PyramidFeature encode_image(const DescriptorSet& descriptors, const Dictionary& dict,
                            const PipelineConfig& cfg, unsigned workers) {
  if (descriptors.dim != dict.dim)
    throw std::invalid_argument("descriptor dim does not match dictionary");
  const std::size_t m = descriptors.count();
  const std::uint32_t p = dict.size;
  const SolverConfig solver = cfg.solver_config();
  const WeightVector ones(p, 1);

  CodedImage coded;
  coded.code_dim = p;
  coded.image_width = descriptors.image_width;
  coded.image_height = descriptors.image_height;
  coded.locations = descriptors.locations;
  coded.codes.resize(m * std::size_t(p));

  parallel_for(m, workers, [&](std::size_t i) {
    const auto row = descriptors.row(i);
    std::vector<double> x(row.begin(), row.end());
    SparseCode code;
    if (cfg.mode == CodingMode::kNnsc) {
      code = isd_solve(x, dict, solver);
    } else {
      code = weighted_l1_solve(x, dict, ones, solver);
    }
    std::copy(code.alpha.begin(), code.alpha.end(), coded.codes.begin() + i * p);
  });

  return build_pyramid(coded);
}

DatasetIndex scan_dataset(const std::string& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) throw io_error("dataset directory not found: " + dataset_dir);
  DatasetIndex index;
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(dataset_dir))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());

  for (const auto& dir : class_dirs) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string path = entry.path().string();
      if (has_descriptor_extension(path) || has_image_extension(path)) files.push_back(path);
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    index.class_names.push_back(dir.filename().string());
    index.files.push_back(std::move(files));
  }
  if (index.class_names.size() < 2)
    throw std::invalid_argument("dataset needs at least two non-empty class directories");
  return index;
}

DescriptorSet load_input_descriptors(const std::string& path, std::uint32_t patch,
                                     std::uint32_t step) {
  try {
    if (has_descriptor_extension(path)) return load_descriptors(path);
    return extract_dense(load_image(path), patch, step);
  } catch (const format_error& e) {
    throw format_error(std::string(e.what()) + " [" + path + "]");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " [" + path + "]");
  }
}

namespace {

// Gathers up to cfg.sample_limit descriptors from the given image sets into
// one training pool, sampled without replacement when over the limit.
DescriptorSet sample_training_descriptors(const std::vector<const DescriptorSet*>& sets,
                                          std::uint64_t limit, std::uint64_t seed) {
  std::uint64_t total = 0;
  std::uint32_t dim = 0;
  for (const auto* s : sets) {
    total += s->count();
    if (dim == 0) dim = s->dim;
    if (s->dim != dim) throw std::invalid_argument("descriptor dims differ across images");
  }
  if (total == 0) throw std::invalid_argument("no training descriptors");

  DescriptorSet pool;
  pool.dim = dim;
  pool.image_width = 1;
  pool.image_height = 1;

  const auto copy_row = [&](const DescriptorSet* s, std::size_t row) {
    const auto r = s->row(row);
    pool.data.insert(pool.data.end(), r.begin(), r.end());
    pool.locations.push_back(0.0f);
    pool.locations.push_back(0.0f);
  };

  if (limit == 0 || total <= limit) {
    for (const auto* s : sets)
      for (std::size_t i = 0; i < s->count(); ++i) copy_row(s, i);
    return pool;
  }

  Rng rng(seed);
  const auto keep = sample_without_replacement(total, limit, rng);
  std::size_t set_idx = 0;
  std::uint64_t base = 0;
  for (const std::uint64_t global : keep) {
    while (global >= base + sets[set_idx]->count()) {
      base += sets[set_idx]->count();
      ++set_idx;
    }
    copy_row(sets[set_idx], std::size_t(global - base));
  }
  return pool;
}

Dictionary train_codebook_for_split(const PipelineConfig& cfg, const DescriptorSet& pool,
                                    std::uint64_t seed) {
  if (cfg.codebook_method == CodebookMethod::kKmeans)
    return kmeans_train(pool, cfg.codebook_size, cfg.kmeans_max_iter, seed, cfg.workers)
        .dictionary;
  return sc_dictionary_train(pool, cfg.codebook_size, cfg.lambda, cfg.sc_outer_iters, seed,
                             cfg.workers)
      .dictionary;
}

}  // namespace

ExperimentReport run_experiment(const PipelineConfig& cfg, const std::string& dataset_dir) {
  if (cfg.splits == 0) throw std::invalid_argument("splits must be >= 1");
  if (cfg.train_per_class == 0) throw std::invalid_argument("train_per_class must be >= 1");

  const DatasetIndex index = scan_dataset(dataset_dir);
  const std::uint32_t classes = std::uint32_t(index.class_names.size());

  ExperimentReport report;
  report.class_names = index.class_names;
  for (const auto& files : index.files) report.images_per_class.push_back(files.size());

  for (std::uint32_t c = 0; c < classes; ++c)
    if (index.files[c].size() < cfg.train_per_class)
      throw std::invalid_argument("class " + index.class_names[c] + " has only " +
                                  std::to_string(index.files[c].size()) +
                                  " images but train_per_class is " +
                                  std::to_string(cfg.train_per_class));

  // Flat image table; descriptors are loaded once and reused across splits.
  struct ImageEntry {
    std::uint32_t class_id;
    const std::string* path;
  };
  std::vector<ImageEntry> images;
  for (std::uint32_t c = 0; c < classes; ++c)
    for (const auto& path : index.files[c]) images.push_back({c, &path});

  auto t0 = Clock::now();
  std::vector<DescriptorSet> descriptors(images.size());
  parallel_for(images.size(), cfg.workers, [&](std::size_t i) {
    descriptors[i] = load_input_descriptors(*images[i].path, cfg.patch, cfg.step);
  });
  report.timing.load_seconds = seconds_since(t0);

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < images.size(); ++i) by_class[images[i].class_id].push_back(i);

  Dictionary fixed_dict;
  bool have_fixed_dict = false;
  const std::uint32_t feature_dim = kPyramidCells * cfg.codebook_size;
  std::vector<float> cached_features;  // reused across splits when the codebook is fixed
  std::vector<bool> cached(images.size(), false);

  for (std::uint32_t split = 0; split < cfg.splits; ++split) {
    // Seeded per-class partition: first train_per_class of a shuffle train,
    // the rest test.
    std::vector<std::size_t> train_ids, test_ids;
    for (std::uint32_t c = 0; c < classes; ++c) {
      std::vector<std::size_t> order = by_class[c];
      Rng rng(derive_seed(cfg.seed, "split", (std::uint64_t(split) << 32) | c));
      shuffle(order, rng);
      train_ids.insert(train_ids.end(), order.begin(), order.begin() + cfg.train_per_class);
      test_ids.insert(test_ids.end(), order.begin() + cfg.train_per_class, order.end());
    }
    std::sort(train_ids.begin(), train_ids.end());
    std::sort(test_ids.begin(), test_ids.end());
    if (test_ids.empty()) throw std::invalid_argument("no test images left after the split");

    t0 = Clock::now();
    Dictionary dict;
    if (cfg.fixed_codebook && have_fixed_dict) {
      dict = fixed_dict;
    } else {
      std::vector<const DescriptorSet*> train_sets;
      for (const auto id : train_ids) train_sets.push_back(&descriptors[id]);
      const DescriptorSet pool = sample_training_descriptors(
          train_sets, cfg.sample_limit, derive_seed(cfg.seed, "sample", split));
      dict = train_codebook_for_split(cfg, pool, derive_seed(cfg.seed, "codebook", split));
      if (cfg.fixed_codebook) {
        fixed_dict = dict;
        have_fixed_dict = true;
      }
    }
    report.timing.codebook_seconds += seconds_since(t0);

    // Encode whichever images this split touches.
    t0 = Clock::now();
    std::vector<std::size_t> needed = train_ids;
    needed.insert(needed.end(), test_ids.begin(), test_ids.end());
    std::sort(needed.begin(), needed.end());
    if (cached_features.empty())
      cached_features.assign(images.size() * std::size_t(feature_dim), 0.0f);
    if (!cfg.fixed_codebook) cached.assign(images.size(), false);
    parallel_for(needed.size(), cfg.workers, [&](std::size_t i) {
      const std::size_t id = needed[i];
      if (cached[id]) return;
      const PyramidFeature f = encode_image(descriptors[id], dict, cfg, 1);
      float* out = cached_features.data() + id * std::size_t(feature_dim);
      for (std::size_t j = 0; j < f.values.size(); ++j) out[j] = float(f.values[j]);
    });
    for (const auto id : needed) cached[id] = true;
    report.timing.encode_seconds += seconds_since(t0);

    const auto gather = [&](const std::vector<std::size_t>& ids) {
      FeatureSet set;
      set.dim = feature_dim;
      set.data.reserve(ids.size() * std::size_t(feature_dim));
      for (const auto id : ids) {
        const float* row = cached_features.data() + id * std::size_t(feature_dim);
        set.data.insert(set.data.end(), row, row + feature_dim);
        set.labels.push_back(images[id].class_id);
      }
      return set;
    };

    t0 = Clock::now();
    const FeatureSet train_set = gather(train_ids);
    const LinearModel model =
        svm_train(train_set, index.class_names, cfg.reg_c, cfg.svm_epochs,
                  derive_seed(cfg.seed, "svm", split), nullptr, cfg.workers);
    report.timing.train_seconds += seconds_since(t0);

    t0 = Clock::now();
    const FeatureSet test_set = gather(test_ids);
    const auto predictions = svm_predict(model, test_set.data, test_set.count());
    report.timing.predict_seconds += seconds_since(t0);

    SplitResult result;
    result.confusion.assign(std::size_t(classes) * classes, 0);
    result.test_count = test_ids.size();
    std::uint64_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const std::uint32_t truth = test_set.labels[i];
      ++result.confusion[std::size_t(truth) * classes + predictions[i]];
      if (predictions[i] == truth) ++correct;
    }
    result.accuracy = double(correct) / double(test_ids.size());
    report.splits.push_back(std::move(result));
  }

  double mean = 0.0;
  for (const auto& s : report.splits) mean += s.accuracy;
  mean /= double(report.splits.size());
  double var = 0.0;
  for (const auto& s : report.splits) var += (s.accuracy - mean) * (s.accuracy - mean);
  report.mean_accuracy = mean;
  report.std_accuracy =
      report.splits.size() > 1 ? std::sqrt(var / double(report.splits.size() - 1)) : 0.0;
  return report;
}

std::string render_report(const ExperimentReport& report, const PipelineConfig& cfg) {
  std::string out;
  out += "nnsc experiment report\n";
  out += "mode=" + std::string(coding_mode_name(cfg.mode));
  out += " codebook=" +
         std::string(cfg.codebook_method == CodebookMethod::kKmeans ? "kmeans" : "sc");
  out += " p=" + std::to_string(cfg.codebook_size);
  out += " lambda=" + fmt("%.6g", cfg.lambda);
  out += " beta=" + fmt("%.6g", cfg.beta);
  out += " reg_c=" + fmt("%.6g", cfg.reg_c);
  out += " seed=" + std::to_string(cfg.seed) + "\n";
  out += "patch=" + std::to_string(cfg.patch) + " step=" + std::to_string(cfg.step);
  out += " train_per_class=" + std::to_string(cfg.train_per_class);
  out += " splits=" + std::to_string(cfg.splits);
  out += " sample_limit=" + std::to_string(cfg.sample_limit) + "\n";

  out += "\nclasses (" + std::to_string(report.class_names.size()) + "):\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c)
    out += "  " + std::to_string(c) + "  " + report.class_names[c] + "  (" +
           std::to_string(report.images_per_class[c]) + " images)\n";

  out += "\nsplit  accuracy\n";
  for (std::size_t s = 0; s < report.splits.size(); ++s)
    out += "  " + std::to_string(s + 1) + "    " + fmt("%.6f", report.splits[s].accuracy) + "\n";
  out += "mean " + fmt("%.6f", report.mean_accuracy) + "  std " +
         fmt("%.6f", report.std_accuracy) + "\n";

  const std::size_t classes = report.class_names.size();
  out += "\nconfusion (rows = true class, summed over splits):\n";
  for (std::size_t t = 0; t < classes; ++t) {
    out += "  " + std::to_string(t) + ":";
    for (std::size_t q = 0; q < classes; ++q) {
      std::uint64_t sum = 0;
      for (const auto& s : report.splits) sum += s.confusion[t * classes + q];
      out += " " + std::to_string(sum);
    }
    out += "\n";
  }

  out += "\n";
  out += "accuracy.mean=" + fmt("%.9f", report.mean_accuracy) + "\n";
  out += "accuracy.std=" + fmt("%.9f", report.std_accuracy) + "\n";
  out += "splits=" + std::to_string(report.splits.size()) + "\n";
  out += "classes=" + std::to_string(classes) + "\n";
  for (std::size_t s = 0; s < report.splits.size(); ++s) {
    out += "accuracy.split." + std::to_string(s + 1) + "=" +
           fmt("%.9f", report.splits[s].accuracy) + "\n";
    out += "test_count.split." + std::to_string(s + 1) + "=" +
           std::to_string(report.splits[s].test_count) + "\n";
  }
  return out;
}

std::string render_timing(const ExperimentReport& report) {
  std::string out;
  out += "timing.load_seconds=" + fmt("%.3f", report.timing.load_seconds) + "\n";
  out += "timing.codebook_seconds=" + fmt("%.3f", report.timing.codebook_seconds) + "\n";
  out += "timing.encode_seconds=" + fmt("%.3f", report.timing.encode_seconds) + "\n";
  out += "timing.train_seconds=" + fmt("%.3f", report.timing.train_seconds) + "\n";
  out += "timing.predict_seconds=" + fmt("%.3f", report.timing.predict_seconds) + "\n";
  return out;
}

}  // namespace nnsc
