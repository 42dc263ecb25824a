// SPDX-License-Identifier: Apache-2.0
#include "nnsc/nnsc.h"

#include <cstring>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/codebook.hpp"
#include "core/descriptors.hpp"
#include "core/dictionary.hpp"
#include "core/errors.hpp"
#include "core/image.hpp"
#include "core/pipeline.hpp"
#include "core/pooling.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"
#include "core/synthetic.hpp"

struct nnsc_descriptors {
  nnsc::DescriptorSet set;
};
struct nnsc_codebook {
  nnsc::Dictionary dict;
};
struct nnsc_features {
  nnsc::FeatureSet set;
};
struct nnsc_model {
  nnsc::LinearModel model;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg; }

// Runs fn, translating exceptions into status codes.
template <class Fn>
nnsc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return NNSC_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return NNSC_ERROR_INVALID_ARGUMENT;
  } catch (const nnsc::format_error& e) {
    set_error(e.what());
    return NNSC_ERROR_FORMAT;
  } catch (const nnsc::io_error& e) {
    set_error(e.what());
    return NNSC_ERROR_IO;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return NNSC_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return NNSC_ERROR_INTERNAL;
  }
}

nnsc_status require(bool ok, const char* msg) {
  if (ok) return NNSC_OK;
  set_error(msg);
  return NNSC_ERROR_INVALID_ARGUMENT;
}

nnsc::SolverConfig to_solver_config(const nnsc_solver_options* opts, nnsc_coding_mode mode) {
  nnsc::SolverConfig cfg;
  if (opts) {
    cfg.lambda = opts->lambda;
    cfg.beta = opts->beta;
    cfg.inner_tol = opts->inner_tol;
    cfg.inner_max_iter = opts->inner_max_iter;
    cfg.outer_max_iter = opts->outer_max_iter;
  }
  cfg.nonnegative = mode != NNSC_MODE_SC;
  return cfg;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* nnsc_version(void) { return "0.1.0"; }

const char* nnsc_last_error(void) { return g_last_error.c_str(); }

void nnsc_string_free(char* s) { delete[] s; }

/* ---------------- descriptors ---------------- */

nnsc_status nnsc_descriptors_extract(const float* pixels, uint32_t width, uint32_t height,
                                     uint32_t patch, uint32_t step, nnsc_descriptors** out) {
  if (auto st = require(pixels && out, "null argument")) return st;
  return guarded([&] {
    nnsc::GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(pixels, pixels + std::size_t(width) * height);
    *out = new nnsc_descriptors{nnsc::extract_dense(img, patch, step)};
  });
}

nnsc_status nnsc_descriptors_from_file(const char* path, uint32_t patch, uint32_t step,
                                       nnsc_descriptors** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded(
      [&] { *out = new nnsc_descriptors{nnsc::load_input_descriptors(path, patch, step)}; });
}

nnsc_status nnsc_descriptors_load(const char* path, nnsc_descriptors** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new nnsc_descriptors{nnsc::load_descriptors(path)}; });
}

nnsc_status nnsc_descriptors_save(const nnsc_descriptors* set, const char* path) {
  if (auto st = require(set && path, "null argument")) return st;
  return guarded([&] { nnsc::save_descriptors(set->set, path); });
}

void nnsc_descriptors_free(nnsc_descriptors* set) { delete set; }

uint64_t nnsc_descriptors_count(const nnsc_descriptors* set) { return set ? set->set.count() : 0; }
uint32_t nnsc_descriptors_dim(const nnsc_descriptors* set) { return set ? set->set.dim : 0; }
const float* nnsc_descriptors_data(const nnsc_descriptors* set) {
  return set ? set->set.data.data() : nullptr;
}
const float* nnsc_descriptors_locations(const nnsc_descriptors* set) {
  return set ? set->set.locations.data() : nullptr;
}

/* ---------------- codebook ---------------- */

void nnsc_codebook_options_init(nnsc_codebook_options* opts) {
  if (!opts) return;
  *opts = {};
  opts->size = 1024;
  opts->method = NNSC_CODEBOOK_KMEANS;
  opts->lambda = 0.3;
  opts->kmeans_max_iter = 100;
  opts->sc_outer_iters = 10;
  opts->sample_limit = 50000;
  opts->seed = 1;
  opts->workers = 0;
}

nnsc_status nnsc_codebook_train(const nnsc_descriptors* const* sets, size_t n_sets,
                                const nnsc_codebook_options* opts, nnsc_codebook** out) {
  if (auto st = require(sets && opts && out && n_sets > 0, "null argument or no input sets"))
    return st;
  for (size_t i = 0; i < n_sets; ++i)
    if (auto st = require(sets[i] != nullptr, "null descriptor set")) return st;
  return guarded([&] {
    // Pool (and possibly sample) the inputs, then train.
    std::vector<const nnsc::DescriptorSet*> views;
    views.reserve(n_sets);
    for (size_t i = 0; i < n_sets; ++i) views.push_back(&sets[i]->set);

    nnsc::PipelineConfig cfg;
    cfg.sample_limit = opts->sample_limit;
    nnsc::DescriptorSet pool;
    {
      // Reuses the experiment sampler for one-off training.
      std::uint64_t total = 0;
      for (const auto* v : views) total += v->count();
      if (total == 0) throw std::invalid_argument("empty descriptor set");
      pool.dim = views.front()->dim;
      pool.image_width = 1;
      pool.image_height = 1;
      nnsc::Rng rng(nnsc::derive_seed(opts->seed, "capi-sample"));
      std::vector<std::uint64_t> keep;
      const bool sample = opts->sample_limit != 0 && total > opts->sample_limit;
      if (sample) keep = nnsc::sample_without_replacement(total, opts->sample_limit, rng);
      std::uint64_t base = 0;
      std::size_t keep_pos = 0;
      for (const auto* v : views) {
        if (v->dim != pool.dim) throw std::invalid_argument("descriptor dims differ across sets");
        for (std::size_t r = 0; r < v->count(); ++r) {
          const std::uint64_t global = base + r;
          if (sample) {
            if (keep_pos == keep.size() || keep[keep_pos] != global) continue;
            ++keep_pos;
          }
          const auto row = v->row(r);
          pool.data.insert(pool.data.end(), row.begin(), row.end());
          pool.locations.push_back(0.0f);
          pool.locations.push_back(0.0f);
        }
        base += v->count();
      }
    }

    nnsc::Dictionary dict;
    if (opts->method == NNSC_CODEBOOK_SPARSE) {
      dict = nnsc::sc_dictionary_train(pool, opts->size, opts->lambda, opts->sc_outer_iters,
                                       opts->seed, opts->workers)
                 .dictionary;
    } else {
      dict = nnsc::kmeans_train(pool, opts->size, opts->kmeans_max_iter, opts->seed,
                                opts->workers)
                 .dictionary;
    }
    *out = new nnsc_codebook{std::move(dict)};
  });
}

nnsc_status nnsc_codebook_load(const char* path, nnsc_codebook** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new nnsc_codebook{nnsc::load_codebook(path)}; });
}

nnsc_status nnsc_codebook_save(const nnsc_codebook* cb, const char* path) {
  if (auto st = require(cb && path, "null argument")) return st;
  return guarded([&] { nnsc::save_codebook(cb->dict, path); });
}

void nnsc_codebook_free(nnsc_codebook* cb) { delete cb; }

uint32_t nnsc_codebook_dim(const nnsc_codebook* cb) { return cb ? cb->dict.dim : 0; }
uint32_t nnsc_codebook_size(const nnsc_codebook* cb) { return cb ? cb->dict.size : 0; }
uint32_t nnsc_codebook_feature_dim(const nnsc_codebook* cb) {
  return cb ? nnsc::kPyramidCells * cb->dict.size : 0;
}

/* ---------------- coding ---------------- */

void nnsc_solver_options_init(nnsc_solver_options* opts) {
  if (!opts) return;
  const nnsc::SolverConfig defaults;
  opts->lambda = defaults.lambda;
  opts->beta = defaults.beta;
  opts->inner_tol = defaults.inner_tol;
  opts->inner_max_iter = defaults.inner_max_iter;
  opts->outer_max_iter = defaults.outer_max_iter;
}

nnsc_status nnsc_solve(const nnsc_codebook* cb, const double* x, size_t x_len,
                       nnsc_coding_mode mode, const nnsc_solver_options* opts, double* alpha,
                       double* objective, double* kkt_residual, int* converged) {
  if (auto st = require(cb && x && alpha, "null argument")) return st;
  return guarded([&] {
    const nnsc::SolverConfig cfg = to_solver_config(opts, mode);
    const std::span<const double> xs(x, x_len);
    nnsc::SparseCode code;
    if (mode == NNSC_MODE_NNSC) {
      code = nnsc::isd_solve(xs, cb->dict, cfg);
    } else {
      code = nnsc::weighted_l1_solve(xs, cb->dict, nnsc::WeightVector(cb->dict.size, 1), cfg);
    }
    std::memcpy(alpha, code.alpha.data(), code.alpha.size() * sizeof(double));
    if (objective) *objective = code.objective;
    if (kkt_residual) *kkt_residual = code.kkt_residual;
    if (converged) *converged = code.converged ? 1 : 0;
  });
}

nnsc_status nnsc_encode_image(const nnsc_codebook* cb, const nnsc_descriptors* set,
                              nnsc_coding_mode mode, const nnsc_solver_options* opts,
                              uint32_t workers, float* feature) {
  if (auto st = require(cb && set && feature, "null argument")) return st;
  return guarded([&] {
    nnsc::PipelineConfig cfg;
    const nnsc::SolverConfig solver = to_solver_config(opts, mode);
    cfg.lambda = solver.lambda;
    cfg.beta = solver.beta;
    cfg.inner_tol = solver.inner_tol;
    cfg.inner_max_iter = solver.inner_max_iter;
    cfg.outer_max_iter = solver.outer_max_iter;
    cfg.mode = mode == NNSC_MODE_SC    ? nnsc::CodingMode::kSc
               : mode == NNSC_MODE_NSC ? nnsc::CodingMode::kNsc
                                       : nnsc::CodingMode::kNnsc;
    const nnsc::PyramidFeature f = nnsc::encode_image(set->set, cb->dict, cfg, workers);
    for (std::size_t i = 0; i < f.values.size(); ++i) feature[i] = float(f.values[i]);
  });
}

/* ---------------- features ---------------- */

nnsc_status nnsc_features_create(uint32_t dim, nnsc_features** out) {
  if (auto st = require(out && dim > 0, "null argument or zero dim")) return st;
  return guarded([&] {
    auto* set = new nnsc_features{};
    set->set.dim = dim;
    *out = set;
  });
}

nnsc_status nnsc_features_append(nnsc_features* set, const float* row, uint32_t label) {
  if (auto st = require(set && row, "null argument")) return st;
  return guarded([&] {
    set->set.data.insert(set->set.data.end(), row, row + set->set.dim);
    set->set.labels.push_back(label);
  });
}

nnsc_status nnsc_features_load(const char* path, nnsc_features** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new nnsc_features{nnsc::load_features(path)}; });
}

nnsc_status nnsc_features_save(const nnsc_features* set, const char* path) {
  if (auto st = require(set && path, "null argument")) return st;
  return guarded([&] { nnsc::save_features(set->set, path); });
}

void nnsc_features_free(nnsc_features* set) { delete set; }

uint64_t nnsc_features_count(const nnsc_features* set) { return set ? set->set.count() : 0; }
uint32_t nnsc_features_dim(const nnsc_features* set) { return set ? set->set.dim : 0; }
const float* nnsc_features_data(const nnsc_features* set) {
  return set ? set->set.data.data() : nullptr;
}
const uint32_t* nnsc_features_labels(const nnsc_features* set) {
  return set ? set->set.labels.data() : nullptr;
}

/* ---------------- classifier ---------------- */

nnsc_status nnsc_model_train(const nnsc_features* set, const char* const* class_names,
                             uint32_t n_classes, double reg_c, uint32_t epochs, uint64_t seed,
                             uint32_t workers, nnsc_model** out) {
  if (auto st = require(set && class_names && out, "null argument")) return st;
  for (uint32_t c = 0; c < n_classes; ++c)
    if (auto st = require(class_names[c] != nullptr, "null class name")) return st;
  return guarded([&] {
    std::vector<std::string> names(class_names, class_names + n_classes);
    *out = new nnsc_model{
        nnsc::svm_train(set->set, std::move(names), reg_c, epochs, seed, nullptr, workers)};
  });
}

nnsc_status nnsc_model_predict(const nnsc_model* model, const float* rows, size_t row_count,
                               uint32_t dim, uint32_t* labels) {
  if (auto st = require(model && rows && labels, "null argument")) return st;
  if (auto st = require(dim == model->model.dim, "feature dim does not match model")) return st;
  return guarded([&] {
    const auto out =
        nnsc::svm_predict(model->model, {rows, row_count * std::size_t(dim)}, row_count);
    std::memcpy(labels, out.data(), out.size() * sizeof(uint32_t));
  });
}

nnsc_status nnsc_model_load(const char* path, nnsc_model** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new nnsc_model{nnsc::load_model(path)}; });
}

nnsc_status nnsc_model_save(const nnsc_model* model, const char* path) {
  if (auto st = require(model && path, "null argument")) return st;
  return guarded([&] { nnsc::save_model(model->model, path); });
}

void nnsc_model_free(nnsc_model* model) { delete model; }

uint32_t nnsc_model_classes(const nnsc_model* model) { return model ? model->model.classes : 0; }
uint32_t nnsc_model_dim(const nnsc_model* model) { return model ? model->model.dim : 0; }
const char* nnsc_model_class_name(const nnsc_model* model, uint32_t c) {
  if (!model || c >= model->model.classes) return nullptr;
  return model->model.class_names[c].c_str();
}

/* ---------------- experiments ---------------- */

void nnsc_experiment_options_init(nnsc_experiment_options* opts) {
  if (!opts) return;
  const nnsc::PipelineConfig d;
  *opts = {};
  opts->mode = NNSC_MODE_NNSC;
  opts->lambda = d.lambda;
  opts->beta = d.beta;
  opts->reg_c = d.reg_c;
  opts->codebook_size = d.codebook_size;
  opts->codebook_method = NNSC_CODEBOOK_KMEANS;
  opts->patch = d.patch;
  opts->step = d.step;
  opts->train_per_class = d.train_per_class;
  opts->splits = d.splits;
  opts->seed = d.seed;
  opts->sample_limit = d.sample_limit;
  opts->kmeans_max_iter = d.kmeans_max_iter;
  opts->sc_outer_iters = d.sc_outer_iters;
  opts->svm_epochs = d.svm_epochs;
  opts->inner_tol = d.inner_tol;
  opts->inner_max_iter = d.inner_max_iter;
  opts->outer_max_iter = d.outer_max_iter;
  opts->fixed_codebook = 0;
  opts->workers = 0;
}

nnsc_status nnsc_experiment_run(const char* dataset_dir, const nnsc_experiment_options* opts,
                                char** report, char** timing) {
  if (auto st = require(dataset_dir && opts && report, "null argument")) return st;
  return guarded([&] {
    nnsc::PipelineConfig cfg;
    cfg.mode = opts->mode == NNSC_MODE_SC    ? nnsc::CodingMode::kSc
               : opts->mode == NNSC_MODE_NSC ? nnsc::CodingMode::kNsc
                                             : nnsc::CodingMode::kNnsc;
    cfg.lambda = opts->lambda;
    cfg.beta = opts->beta;
    cfg.reg_c = opts->reg_c;
    cfg.codebook_size = opts->codebook_size;
    cfg.codebook_method = opts->codebook_method == NNSC_CODEBOOK_SPARSE
                              ? nnsc::CodebookMethod::kSparseCoding
                              : nnsc::CodebookMethod::kKmeans;
    cfg.patch = opts->patch;
    cfg.step = opts->step;
    cfg.train_per_class = opts->train_per_class;
    cfg.splits = opts->splits;
    cfg.seed = opts->seed;
    cfg.sample_limit = opts->sample_limit;
    cfg.kmeans_max_iter = opts->kmeans_max_iter;
    cfg.sc_outer_iters = opts->sc_outer_iters;
    cfg.svm_epochs = opts->svm_epochs;
    cfg.inner_tol = opts->inner_tol;
    cfg.inner_max_iter = opts->inner_max_iter;
    cfg.outer_max_iter = opts->outer_max_iter;
    cfg.fixed_codebook = opts->fixed_codebook != 0;
    cfg.workers = opts->workers;

    const nnsc::ExperimentReport r = nnsc::run_experiment(cfg, dataset_dir);
    *report = dup_string(nnsc::render_report(r, cfg));
    if (timing) *timing = dup_string(nnsc::render_timing(r));
  });
}

nnsc_status nnsc_synthetic_dataset_write(const char* dataset_dir, uint32_t classes,
                                         uint32_t images_per_class,
                                         uint32_t descriptors_per_image, uint32_t dim,
                                         uint32_t atoms_per_class, uint64_t seed) {
  if (auto st = require(dataset_dir != nullptr, "null argument")) return st;
  return guarded([&] {
    nnsc::SyntheticOptions opts;
    opts.classes = classes;
    opts.images_per_class = images_per_class;
    opts.descriptors_per_image = descriptors_per_image;
    opts.dim = dim;
    opts.atoms_per_class = atoms_per_class;
    opts.seed = seed;
    nnsc::generate_synthetic_dataset(dataset_dir, opts);
  });
}

} /* extern "C" */
