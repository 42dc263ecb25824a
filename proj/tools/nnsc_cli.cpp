// SPDX-License-Identifier: Apache-2.0
//
// nnsc command-line tool. Links only the public C API.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nnsc/nnsc.h"

namespace fs = std::filesystem;

namespace {

int exit_code_for(nnsc_status status) {
  switch (status) {
    case NNSC_OK: return 0;
    case NNSC_ERROR_IO: return 2;
    default: return 1;  // invalid input, bad format, internal
  }
}

// Reports the library error and converts the status to a process exit code.
int fail(nnsc_status status, const std::string& context) {
  std::cerr << "nnsc: " << context << ": " << nnsc_last_error() << "\n";
  return exit_code_for(status);
}

struct DescriptorsDeleter {
  void operator()(nnsc_descriptors* p) const { nnsc_descriptors_free(p); }
};
struct CodebookDeleter {
  void operator()(nnsc_codebook* p) const { nnsc_codebook_free(p); }
};
struct FeaturesDeleter {
  void operator()(nnsc_features* p) const { nnsc_features_free(p); }
};
struct ModelDeleter {
  void operator()(nnsc_model* p) const { nnsc_model_free(p); }
};
using DescriptorsPtr = std::unique_ptr<nnsc_descriptors, DescriptorsDeleter>;
using CodebookPtr = std::unique_ptr<nnsc_codebook, CodebookDeleter>;
using FeaturesPtr = std::unique_ptr<nnsc_features, FeaturesDeleter>;
using ModelPtr = std::unique_ptr<nnsc_model, ModelDeleter>;

// --config <file> support: key=value lines become --key value tokens unless
// the flag is already present, so command-line flags always win. Lines
// starting with '#' and blank lines are ignored; key=true/false toggles
// flag-style options.
std::vector<std::string> apply_config_files(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> config_paths;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::runtime_error("--config needs a file argument");
      config_paths.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_paths.push_back(args[i].substr(9));
    } else {
      out.push_back(args[i]);
    }
  }

  const auto has_flag = [&](const std::string& flag) {
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  for (const auto& path : config_paths) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(is, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line is not key=value: " + line);
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw std::runtime_error("config line has an empty key: " + line);
      const std::string flag = "--" + key;
      if (has_flag(flag)) continue;  // command line wins
      if (value == "true") {
        out.push_back(flag);
      } else if (value == "false") {
        // omitted
      } else {
        out.push_back(flag);
        out.push_back(value);
      }
    }
  }
  return out;
}

bool is_descriptor_file(const fs::path& p) { return p.extension() == ".nnsc"; }
bool is_image_file(const fs::path& p) {
  const auto e = p.extension();
  return e == ".pgm" || e == ".ppm" || e == ".pnm";
}

std::vector<std::string> sorted_inputs(const std::string& input) {
  std::vector<std::string> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input))
      if (entry.is_regular_file() &&
          (is_image_file(entry.path()) || is_descriptor_file(entry.path())))
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  return files;
}

// Class subdirectories of a dataset root, sorted by name.
std::vector<std::string> class_directories(const std::string& dataset) {
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(dataset))
    if (entry.is_directory()) dirs.push_back(entry.path().string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

struct SolverFlags {
  nnsc_solver_options opts;
  std::string mode = "nnsc";

  SolverFlags() { nnsc_solver_options_init(&opts); }

  void attach(CLI::App& cmd) {
    cmd.add_option("--mode", mode, "coding mode: sc | nsc | nnsc")->default_str("nnsc");
    cmd.add_option("--lambda", opts.lambda, "l1 penalty weight")->default_val(opts.lambda);
    cmd.add_option("--beta", opts.beta, "support-detection threshold decay")
        ->default_val(opts.beta);
    cmd.add_option("--inner-tol", opts.inner_tol, "KKT residual target")
        ->default_val(opts.inner_tol);
    cmd.add_option("--inner-max", opts.inner_max_iter, "max coordinate sweeps")
        ->default_val(opts.inner_max_iter);
    cmd.add_option("--outer-max", opts.outer_max_iter, "max support-detection rounds")
        ->default_val(opts.outer_max_iter);
  }

  nnsc_coding_mode coding_mode() const {
    if (mode == "sc") return NNSC_MODE_SC;
    if (mode == "nsc") return NNSC_MODE_NSC;
    return NNSC_MODE_NNSC;
  }

  bool mode_valid() const { return mode == "sc" || mode == "nsc" || mode == "nnsc"; }
};

int run_extract(const std::string& input, const std::string& out, std::uint32_t patch,
                std::uint32_t step) {
  const bool dir_mode = fs::is_directory(input);
  const auto files = sorted_inputs(input);
  if (files.empty()) {
    std::cerr << "nnsc: no PGM/PPM or .nnsc files under " << input << "\n";
    return 1;
  }
  if (dir_mode) fs::create_directories(out);
  for (const auto& file : files) {
    nnsc_descriptors* raw = nullptr;
    if (const auto st = nnsc_descriptors_from_file(file.c_str(), patch, step, &raw))
      return fail(st, file);
    DescriptorsPtr set(raw);
    const std::string target =
        dir_mode ? (fs::path(out) / fs::path(file).stem().concat(".nnsc")).string() : out;
    if (const auto st = nnsc_descriptors_save(set.get(), target.c_str()))
      return fail(st, target);
    std::cout << file << " -> " << target << " (" << nnsc_descriptors_count(set.get())
              << " descriptors)\n";
  }
  return 0;
}

int run_train_codebook(const std::vector<std::string>& descriptor_files,
                       const nnsc_codebook_options& opts, const std::string& out) {
  std::vector<DescriptorsPtr> sets;
  std::vector<const nnsc_descriptors*> raw;
  for (const auto& file : descriptor_files) {
    nnsc_descriptors* set = nullptr;
    if (const auto st = nnsc_descriptors_load(file.c_str(), &set)) return fail(st, file);
    sets.emplace_back(set);
    raw.push_back(set);
  }
  nnsc_codebook* cb = nullptr;
  if (const auto st = nnsc_codebook_train(raw.data(), raw.size(), &opts, &cb))
    return fail(st, "train-codebook");
  CodebookPtr codebook(cb);
  if (const auto st = nnsc_codebook_save(codebook.get(), out.c_str())) return fail(st, out);
  std::cout << "codebook " << nnsc_codebook_dim(codebook.get()) << "x"
            << nnsc_codebook_size(codebook.get()) << " -> " << out << "\n";
  return 0;
}

int run_encode(const std::string& input, const std::string& codebook_path,
               const SolverFlags& solver, std::uint32_t patch, std::uint32_t step,
               std::uint32_t workers, const std::string& out, const std::string& classes_out) {
  nnsc_codebook* raw_cb = nullptr;
  if (const auto st = nnsc_codebook_load(codebook_path.c_str(), &raw_cb))
    return fail(st, codebook_path);
  CodebookPtr codebook(raw_cb);
  const std::uint32_t feature_dim = nnsc_codebook_feature_dim(codebook.get());

  // Dataset directory: per-class subdirectories define the labels. Otherwise
  // a single descriptor file or image gets label 0.
  std::vector<std::pair<std::string, std::uint32_t>> inputs;
  std::vector<std::string> class_names;
  if (fs::is_directory(input)) {
    const auto dirs = class_directories(input);
    for (const auto& dir : dirs) {
      const auto files = sorted_inputs(dir);
      if (files.empty()) continue;
      const auto label = std::uint32_t(class_names.size());
      class_names.push_back(fs::path(dir).filename().string());
      for (const auto& f : files) inputs.emplace_back(f, label);
    }
    if (inputs.empty()) {
      std::cerr << "nnsc: no class subdirectories with inputs under " << input << "\n";
      return 1;
    }
  } else {
    inputs.emplace_back(input, 0);
    class_names.push_back("class0");
  }

  nnsc_features* raw_features = nullptr;
  if (const auto st = nnsc_features_create(feature_dim, &raw_features))
    return fail(st, "features");
  FeaturesPtr features(raw_features);

  std::vector<float> feature(feature_dim);
  for (const auto& [file, label] : inputs) {
    nnsc_descriptors* raw_set = nullptr;
    if (const auto st = nnsc_descriptors_from_file(file.c_str(), patch, step, &raw_set))
      return fail(st, file);
    DescriptorsPtr set(raw_set);
    if (const auto st = nnsc_encode_image(codebook.get(), set.get(), solver.coding_mode(),
                                          &solver.opts, workers, feature.data()))
      return fail(st, file);
    if (const auto st = nnsc_features_append(features.get(), feature.data(), label))
      return fail(st, file);
  }
  if (const auto st = nnsc_features_save(features.get(), out.c_str())) return fail(st, out);

  if (!classes_out.empty()) {
    std::ofstream os(classes_out);
    for (const auto& name : class_names) os << name << "\n";
    if (!os) {
      std::cerr << "nnsc: cannot write " << classes_out << "\n";
      return 2;
    }
  }
  std::cout << nnsc_features_count(features.get()) << " features of dim " << feature_dim
            << " -> " << out << "\n";
  for (std::size_t c = 0; c < class_names.size(); ++c)
    std::cout << "label " << c << " = " << class_names[c] << "\n";
  return 0;
}

std::vector<std::string> read_class_names(const std::string& path) {
  std::vector<std::string> names;
  std::ifstream is(path);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) names.push_back(line);
  return names;
}

int run_train(const std::string& features_path, const std::string& classes_path, double reg_c,
              std::uint32_t epochs, std::uint64_t seed, std::uint32_t workers,
              const std::string& out) {
  nnsc_features* raw = nullptr;
  if (const auto st = nnsc_features_load(features_path.c_str(), &raw))
    return fail(st, features_path);
  FeaturesPtr features(raw);

  std::vector<std::string> names;
  if (!classes_path.empty()) {
    names = read_class_names(classes_path);
  } else {
    std::uint32_t max_label = 0;
    const auto* labels = nnsc_features_labels(features.get());
    for (std::uint64_t i = 0; i < nnsc_features_count(features.get()); ++i)
      max_label = std::max(max_label, labels[i]);
    for (std::uint32_t c = 0; c <= max_label; ++c) names.push_back("class" + std::to_string(c));
  }
  std::vector<const char*> name_ptrs;
  for (const auto& n : names) name_ptrs.push_back(n.c_str());

  nnsc_model* raw_model = nullptr;
  if (const auto st =
          nnsc_model_train(features.get(), name_ptrs.data(), std::uint32_t(name_ptrs.size()),
                           reg_c, epochs, seed, workers, &raw_model))
    return fail(st, "train");
  ModelPtr model(raw_model);
  if (const auto st = nnsc_model_save(model.get(), out.c_str())) return fail(st, out);
  std::cout << "model " << nnsc_model_classes(model.get()) << " classes x "
            << nnsc_model_dim(model.get()) << " dims -> " << out << "\n";
  return 0;
}

int run_evaluate(const std::string& features_path, const std::string& model_path) {
  nnsc_features* raw_features = nullptr;
  if (const auto st = nnsc_features_load(features_path.c_str(), &raw_features))
    return fail(st, features_path);
  FeaturesPtr features(raw_features);
  nnsc_model* raw_model = nullptr;
  if (const auto st = nnsc_model_load(model_path.c_str(), &raw_model))
    return fail(st, model_path);
  ModelPtr model(raw_model);

  const auto count = nnsc_features_count(features.get());
  const auto classes = nnsc_model_classes(model.get());
  std::vector<std::uint32_t> predicted(count);
  if (const auto st =
          nnsc_model_predict(model.get(), nnsc_features_data(features.get()), count,
                             nnsc_features_dim(features.get()), predicted.data()))
    return fail(st, "predict");

  const auto* labels = nnsc_features_labels(features.get());
  std::vector<std::uint64_t> confusion(std::size_t(classes) * classes, 0);
  std::uint64_t correct = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (labels[i] < classes) ++confusion[std::size_t(labels[i]) * classes + predicted[i]];
    if (labels[i] == predicted[i]) ++correct;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", count ? double(correct) / double(count) : 0.0);
  std::cout << "accuracy=" << buf << "\n";
  std::cout << "evaluated=" << count << "\n";
  std::cout << "confusion (rows = true class):\n";
  for (std::uint32_t t = 0; t < classes; ++t) {
    std::cout << "  " << nnsc_model_class_name(model.get(), t) << ":";
    for (std::uint32_t q = 0; q < classes; ++q)
      std::cout << " " << confusion[std::size_t(t) * classes + q];
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonnegative, non-convex sparse coding for image classification"};
  app.require_subcommand(1);
  app.footer(
      "Every subcommand accepts --config <file> with key=value lines\n"
      "(keys are the long flag names); explicit command-line flags win.");

  // ---- extract ----
  auto* extract = app.add_subcommand("extract", "extract dense descriptors from PGM/PPM images");
  std::string ex_input, ex_out;
  std::uint32_t ex_patch = 16, ex_step = 8;
  extract->add_option("--input", ex_input, "image file or directory")->required();
  extract->add_option("--out", ex_out, "output .nnsc file (or directory for directory input)")
      ->required();
  extract->add_option("--patch", ex_patch, "patch size in pixels")->default_val(16);
  extract->add_option("--step", ex_step, "grid step in pixels")->default_val(8);

  // ---- train-codebook ----
  auto* traincb = app.add_subcommand("train-codebook", "train a codebook from descriptor files");
  std::vector<std::string> cb_inputs;
  std::string cb_method = "kmeans", cb_out;
  nnsc_codebook_options cb_opts;
  nnsc_codebook_options_init(&cb_opts);
  traincb->add_option("--descriptors", cb_inputs, "descriptor .nnsc files")
      ->required()
      ->expected(-1);
  traincb->add_option("--p", cb_opts.size, "number of atoms")->default_val(cb_opts.size);
  traincb->add_option("--method", cb_method, "kmeans | sc")->default_str("kmeans");
  traincb->add_option("--lambda", cb_opts.lambda, "l1 weight for method sc")
      ->default_val(cb_opts.lambda);
  traincb->add_option("--sample", cb_opts.sample_limit, "descriptor sample limit (0 = all)")
      ->default_val(cb_opts.sample_limit);
  traincb->add_option("--seed", cb_opts.seed, "RNG seed")->default_val(cb_opts.seed);
  traincb->add_option("--kmeans-max-iter", cb_opts.kmeans_max_iter, "Lloyd iteration cap")
      ->default_val(cb_opts.kmeans_max_iter);
  traincb->add_option("--sc-outer-iters", cb_opts.sc_outer_iters,
                      "dictionary learning alternations")
      ->default_val(cb_opts.sc_outer_iters);
  traincb->add_option("--workers", cb_opts.workers, "worker threads (0 = auto)")->default_val(0);
  traincb->add_option("--out", cb_out, "output codebook file")->required();

  // ---- encode ----
  auto* encode = app.add_subcommand("encode", "encode descriptors into pyramid features");
  std::string en_input, en_codebook, en_out, en_classes_out;
  std::uint32_t en_patch = 16, en_step = 8, en_workers = 0;
  SolverFlags en_solver;
  encode->add_option("--input", en_input, "descriptor file, image, or dataset directory")
      ->required();
  encode->add_option("--codebook", en_codebook, "codebook file")->required();
  encode->add_option("--out", en_out, "output feature file")->required();
  encode->add_option("--classes-out", en_classes_out, "write class names to this text file");
  encode->add_option("--patch", en_patch, "patch size for image inputs")->default_val(16);
  encode->add_option("--step", en_step, "grid step for image inputs")->default_val(8);
  encode->add_option("--workers", en_workers, "worker threads (0 = auto)")->default_val(0);
  en_solver.attach(*encode);

  // ---- train ----
  auto* train = app.add_subcommand("train", "train the one-vs-rest linear SVM");
  std::string tr_features, tr_classes, tr_out;
  double tr_reg_c = 1.0;
  std::uint32_t tr_epochs = 100, tr_workers = 0;
  std::uint64_t tr_seed = 1;
  train->add_option("--features", tr_features, "feature file")->required();
  train->add_option("--classes", tr_classes, "class-name file (one per line)");
  train->add_option("--reg-c", tr_reg_c, "squared-hinge loss weight")->default_val(1.0);
  train->add_option("--epochs", tr_epochs, "dual coordinate descent epochs")->default_val(100);
  train->add_option("--seed", tr_seed, "RNG seed")->default_val(1);
  train->add_option("--workers", tr_workers, "worker threads (0 = auto)")->default_val(0);
  train->add_option("--out", tr_out, "output model file")->required();

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a model on a feature file");
  std::string ev_features, ev_model;
  evaluate->add_option("--features", ev_features, "feature file")->required();
  evaluate->add_option("--model", ev_model, "model file")->required();

  // ---- experiment ----
  auto* experiment =
      app.add_subcommand("experiment", "seeded train/test splits with mean/std accuracy");
  std::string xp_dataset;
  nnsc_experiment_options xp;
  nnsc_experiment_options_init(&xp);
  SolverFlags xp_solver;
  std::string xp_codebook_method = "kmeans";
  bool xp_fixed = false;
  experiment->add_option("--dataset", xp_dataset, "dataset directory")->required();
  experiment->add_option("--p", xp.codebook_size, "codebook size")->default_val(xp.codebook_size);
  experiment->add_option("--codebook-method", xp_codebook_method, "kmeans | sc")
      ->default_str("kmeans");
  experiment->add_option("--train-per-class", xp.train_per_class, "training images per class")
      ->default_val(xp.train_per_class);
  experiment->add_option("--splits", xp.splits, "number of random splits")
      ->default_val(xp.splits);
  experiment->add_option("--seed", xp.seed, "RNG seed")->default_val(xp.seed);
  experiment->add_option("--sample", xp.sample_limit, "codebook sample limit (0 = all)")
      ->default_val(xp.sample_limit);
  experiment->add_option("--patch", xp.patch, "patch size for image inputs")
      ->default_val(xp.patch);
  experiment->add_option("--step", xp.step, "grid step for image inputs")->default_val(xp.step);
  experiment->add_option("--reg-c", xp.reg_c, "SVM squared-hinge weight")
      ->default_val(xp.reg_c);
  experiment->add_option("--epochs", xp.svm_epochs, "SVM epochs")->default_val(xp.svm_epochs);
  experiment->add_option("--kmeans-max-iter", xp.kmeans_max_iter, "Lloyd iteration cap")
      ->default_val(xp.kmeans_max_iter);
  experiment->add_option("--sc-outer-iters", xp.sc_outer_iters,
                         "dictionary learning alternations")
      ->default_val(xp.sc_outer_iters);
  experiment->add_option("--workers", xp.workers, "worker threads (0 = auto)")->default_val(0);
  experiment->add_flag("--fixed-codebook", xp_fixed,
                       "train one codebook on the first split and reuse it");
  xp_solver.attach(*experiment);

  // ---- gen-synthetic ----
  auto* gen = app.add_subcommand("gen-synthetic", "write the bundled synthetic dataset");
  std::string gs_out;
  std::uint32_t gs_classes = 3, gs_images = 40, gs_descriptors = 36, gs_dim = 24, gs_atoms = 4;
  std::uint64_t gs_seed = 1;
  gen->add_option("--out", gs_out, "output dataset directory")->required();
  gen->add_option("--classes", gs_classes, "number of classes")->default_val(3);
  gen->add_option("--images-per-class", gs_images, "images per class")->default_val(40);
  gen->add_option("--descriptors-per-image", gs_descriptors, "descriptors per image")
      ->default_val(36);
  gen->add_option("--dim", gs_dim, "descriptor dimension")->default_val(24);
  gen->add_option("--atoms-per-class", gs_atoms, "ground-truth atoms per class")->default_val(4);
  gen->add_option("--seed", gs_seed, "RNG seed")->default_val(1);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_files(args);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse order
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 1 for any command-line problem
  } catch (const std::exception& e) {
    std::cerr << "nnsc: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*extract) return run_extract(ex_input, ex_out, ex_patch, ex_step);

    if (*traincb) {
      if (cb_method != "kmeans" && cb_method != "sc") {
        std::cerr << "nnsc: unknown codebook method: " << cb_method << "\n";
        return 1;
      }
      cb_opts.method = cb_method == "sc" ? NNSC_CODEBOOK_SPARSE : NNSC_CODEBOOK_KMEANS;
      return run_train_codebook(cb_inputs, cb_opts, cb_out);
    }

    if (*encode) {
      if (!en_solver.mode_valid()) {
        std::cerr << "nnsc: unknown coding mode: " << en_solver.mode << "\n";
        return 1;
      }
      return run_encode(en_input, en_codebook, en_solver, en_patch, en_step, en_workers, en_out,
                        en_classes_out);
    }

    if (*train)
      return run_train(tr_features, tr_classes, tr_reg_c, tr_epochs, tr_seed, tr_workers, tr_out);

    if (*evaluate) return run_evaluate(ev_features, ev_model);

    if (*experiment) {
      if (!xp_solver.mode_valid()) {
        std::cerr << "nnsc: unknown coding mode: " << xp_solver.mode << "\n";
        return 1;
      }
      if (xp_codebook_method != "kmeans" && xp_codebook_method != "sc") {
        std::cerr << "nnsc: unknown codebook method: " << xp_codebook_method << "\n";
        return 1;
      }
      xp.mode = xp_solver.coding_mode();
      xp.codebook_method =
          xp_codebook_method == "sc" ? NNSC_CODEBOOK_SPARSE : NNSC_CODEBOOK_KMEANS;
      xp.lambda = xp_solver.opts.lambda;
      xp.beta = xp_solver.opts.beta;
      xp.inner_tol = xp_solver.opts.inner_tol;
      xp.inner_max_iter = xp_solver.opts.inner_max_iter;
      xp.outer_max_iter = xp_solver.opts.outer_max_iter;
      xp.fixed_codebook = xp_fixed ? 1 : 0;

      char* report = nullptr;
      char* timing = nullptr;
      if (const auto st = nnsc_experiment_run(xp_dataset.c_str(), &xp, &report, &timing))
        return fail(st, xp_dataset);
      std::cout << report;
      std::cout.flush();
      std::cerr << timing;  // run-dependent; keep the report deterministic
      nnsc_string_free(report);
      nnsc_string_free(timing);
      return 0;
    }

    if (*gen) {
      if (const auto st = nnsc_synthetic_dataset_write(gs_out.c_str(), gs_classes, gs_images,
                                                       gs_descriptors, gs_dim, gs_atoms, gs_seed))
        return fail(st, gs_out);
      std::cout << "synthetic dataset -> " << gs_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "nnsc: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
