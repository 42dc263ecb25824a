// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/rng.hpp"
#include "core/synthetic.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace nnsc;

namespace {

Dictionary random_dictionary(std::uint32_t dim, std::uint32_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> atoms(std::size_t(dim) * size);
  for (std::uint32_t k = 0; k < size; ++k) {
    double norm2 = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
      const double v = rng.next_normal();
      atoms[std::size_t(k) * dim + i] = v;
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::uint32_t i = 0; i < dim; ++i) atoms[std::size_t(k) * dim + i] *= inv;
  }
  return make_dictionary(dim, size, std::move(atoms));
}

std::size_t l0_of(const std::vector<double>& v, double trunc) {
  std::size_t n = 0;
  for (const double a : v)
    if (std::abs(a) > trunc) ++n;
  return n;
}

SyntheticOptions small_synth(std::uint32_t images_per_class) {
  SyntheticOptions opts;
  opts.classes = 3;
  opts.images_per_class = images_per_class;
  opts.descriptors_per_image = 24;
  opts.dim = 24;
  opts.atoms_per_class = 4;
  opts.seed = 11;
  return opts;
}

}  // namespace

TEST_CASE("synthetic generator writes a loadable, class-structured dataset") {
  test_util::TempDir tmp("synth");
  generate_synthetic_dataset(tmp.dir(), small_synth(4));

  const auto index = scan_dataset(tmp.dir());
  REQUIRE(index.class_names.size() == 3);
  CHECK(index.class_names[0] == "class_00");
  CHECK(index.class_names[2] == "class_02");
  for (const auto& files : index.files) CHECK(files.size() == 4);

  // Every file loads and satisfies the descriptor invariants (checked by the
  // loader); descriptors of different classes live on disjoint blocks.
  const auto a = load_descriptors(index.files[0][0]);
  const auto b = load_descriptors(index.files[1][0]);
  CHECK(a.dim == 24);
  for (std::size_t i = 0; i < a.count(); ++i)
    for (std::uint32_t j = 8; j < 24; ++j) CHECK(a.row(i)[j] == 0.0f);
  for (std::size_t i = 0; i < b.count(); ++i) {
    for (std::uint32_t j = 0; j < 8; ++j) CHECK(b.row(i)[j] == 0.0f);
    for (std::uint32_t j = 16; j < 24; ++j) CHECK(b.row(i)[j] == 0.0f);
  }

  // Deterministic: regenerating gives byte-identical files.
  test_util::TempDir tmp2("synth2");
  generate_synthetic_dataset(tmp2.dir(), small_synth(4));
  CHECK(test_util::read_bytes(index.files[0][0]) ==
        test_util::read_bytes(scan_dataset(tmp2.dir()).files[0][0]));
}

TEST_CASE("encoding an empty descriptor set gives the zero feature") {
  const auto dict = random_dictionary(8, 5, 3);
  DescriptorSet empty;
  empty.dim = 8;
  empty.image_width = 32;
  empty.image_height = 32;
  PipelineConfig cfg;
  const auto f = encode_image(empty, dict, cfg);
  CHECK(f.values.size() == 21 * 5);
  for (const double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("a descriptor equal to one atom concentrates on that atom") {
  const auto dict = random_dictionary(16, 8, 21);
  DescriptorSet set;
  set.dim = 16;
  set.image_width = 32;
  set.image_height = 32;
  for (std::uint32_t i = 0; i < 16; ++i) set.data.push_back(float(dict.atoms[3 * 16 + i]));
  set.locations = {16.0f, 16.0f};

  PipelineConfig cfg;
  cfg.lambda = 0.01;
  cfg.mode = CodingMode::kNnsc;
  const SolverConfig solver = cfg.solver_config();

  std::vector<double> x(set.row(0).begin(), set.row(0).end());
  const auto code = isd_solve(x, dict, solver);
  CHECK(code.alpha[3] >= 0.9);
  for (std::uint32_t k = 0; k < 8; ++k)
    if (k != 3) CHECK(code.alpha[k] <= 0.05);

  // Cross-check the first (all-ones weights) round against the oracle.
  const auto plain = weighted_l1_solve(x, dict, WeightVector(8, 1), solver);
  const auto oracle = brute_force_oracle(x, dict, WeightVector(8, 1), solver.lambda);
  CHECK(std::abs(plain.objective - oracle.objective) <= 1e-6);

  // The pooled feature places that code in the centre cells.
  const auto f = encode_image(set, dict, cfg);
  CHECK(f.values.size() == 21 * 8);
  CHECK(f.values[3] > 0.0);  // level-0 block, coordinate of atom 3
}

TEST_CASE("nnsc codes are at least as sparse as sc codes on most images") {
  test_util::TempDir tmp("sparsity");
  generate_synthetic_dataset(tmp.dir(), small_synth(34));  // 102 images
  const auto index = scan_dataset(tmp.dir());

  // One shared codebook trained on everything.
  std::vector<DescriptorSet> all;
  for (const auto& files : index.files)
    for (const auto& f : files) all.push_back(load_descriptors(f));
  DescriptorSet pool;
  pool.dim = all[0].dim;
  pool.image_width = 1;
  pool.image_height = 1;
  for (const auto& s : all) {
    pool.data.insert(pool.data.end(), s.data.begin(), s.data.end());
    pool.locations.insert(pool.locations.end(), s.locations.size(), 0.0f);
  }
  const auto dict = kmeans_train(pool, 12, 100, 1).dictionary;

  PipelineConfig sc_cfg, nnsc_cfg;
  sc_cfg.mode = CodingMode::kSc;
  nnsc_cfg.mode = CodingMode::kNnsc;
  const SolverConfig sc_solver = sc_cfg.solver_config();
  const SolverConfig nnsc_solver = nnsc_cfg.solver_config();
  const WeightVector ones(12, 1);

  int ok = 0;
  for (const auto& s : all) {
    std::size_t l0_sc = 0, l0_nnsc = 0;
    for (std::size_t i = 0; i < s.count(); ++i) {
      std::vector<double> x(s.row(i).begin(), s.row(i).end());
      l0_sc += l0_of(weighted_l1_solve(x, dict, ones, sc_solver).alpha, 1e-6);
      l0_nnsc += l0_of(isd_solve(x, dict, nnsc_solver).alpha, 1e-6);
    }
    if (l0_nnsc <= l0_sc) ++ok;
  }
  CHECK(ok * 10 >= int(all.size()) * 9);  // >= 90%
}

TEST_CASE("encode_image is deterministic and worker-count independent") {
  test_util::TempDir tmp("encdet");
  generate_synthetic_dataset(tmp.dir(), small_synth(2));
  const auto index = scan_dataset(tmp.dir());
  const auto set = load_descriptors(index.files[0][0]);
  const auto dict = random_dictionary(24, 10, 4);
  PipelineConfig cfg;
  const auto a = encode_image(set, dict, cfg, 1);
  const auto b = encode_image(set, dict, cfg, 4);
  CHECK(a.values == b.values);
}

TEST_CASE("experiment report is consistent and reproducible") {
  test_util::TempDir tmp("exp");
  generate_synthetic_dataset(tmp.dir(), small_synth(8));

  PipelineConfig cfg;
  cfg.codebook_size = 12;
  cfg.train_per_class = 5;
  cfg.splits = 3;
  cfg.seed = 13;
  cfg.sample_limit = 0;
  cfg.svm_epochs = 60;
  cfg.workers = 2;

  const auto report = run_experiment(cfg, tmp.dir());
  REQUIRE(report.splits.size() == 3);
  CHECK(report.class_names.size() == 3);

  // mean/std recompute exactly from the per-split list.
  double mean = 0.0;
  for (const auto& s : report.splits) mean += s.accuracy;
  mean /= 3.0;
  double var = 0.0;
  for (const auto& s : report.splits) var += (s.accuracy - mean) * (s.accuracy - mean);
  const double stdev = std::sqrt(var / 2.0);
  CHECK(std::abs(report.mean_accuracy - mean) <= 1e-12);
  CHECK(std::abs(report.std_accuracy - stdev) <= 1e-12);

  // Confusion counts sum to the test-set size, per split.
  for (const auto& s : report.splits) {
    std::uint64_t total = 0;
    for (const auto c : s.confusion) total += c;
    CHECK(total == s.test_count);
    CHECK(s.test_count == 9);  // 3 classes x (8 - 5)
  }

  // Separable by construction.
  CHECK(report.mean_accuracy >= 0.95);

  // Rendered reports are byte-identical across runs and worker counts.
  const auto text = render_report(report, cfg);
  cfg.workers = 1;
  const auto report2 = run_experiment(cfg, tmp.dir());
  CHECK(render_report(report2, cfg) == text);
  CHECK(text.find("accuracy.mean=") != std::string::npos);
  CHECK(text.find("accuracy.split.3=") != std::string::npos);
}

TEST_CASE("training-set evaluation of the separable dataset is near perfect") {
  test_util::TempDir tmp("trainacc");
  generate_synthetic_dataset(tmp.dir(), small_synth(6));
  const auto index = scan_dataset(tmp.dir());

  PipelineConfig cfg;
  cfg.codebook_size = 12;
  cfg.sample_limit = 0;

  std::vector<DescriptorSet> sets;
  std::vector<std::uint32_t> labels;
  for (std::uint32_t c = 0; c < 3; ++c)
    for (const auto& f : index.files[c]) {
      sets.push_back(load_descriptors(f));
      labels.push_back(c);
    }
  DescriptorSet pool;
  pool.dim = sets[0].dim;
  pool.image_width = 1;
  pool.image_height = 1;
  for (const auto& s : sets) {
    pool.data.insert(pool.data.end(), s.data.begin(), s.data.end());
    pool.locations.insert(pool.locations.end(), s.locations.size(), 0.0f);
  }
  const auto dict = kmeans_train(pool, 12, 100, 2).dictionary;

  FeatureSet features;
  features.dim = 21 * 12;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto f = encode_image(sets[i], dict, cfg);
    for (const double v : f.values) features.data.push_back(float(v));
    features.labels.push_back(labels[i]);
  }
  const auto model = svm_train(features, index.class_names, cfg.reg_c, 100, 1);
  const auto pred = svm_predict(model, features.data, features.count());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == labels[i]) ++correct;
  CHECK(double(correct) / double(pred.size()) >= 0.99);
}

TEST_CASE("dataset and config errors") {
  test_util::TempDir tmp("experr");
  generate_synthetic_dataset(tmp.dir(), small_synth(3));

  PipelineConfig cfg;
  cfg.codebook_size = 8;
  cfg.sample_limit = 0;
  cfg.train_per_class = 10;  // more than the 3 images per class
  CHECK_THROWS_AS(run_experiment(cfg, tmp.dir()), std::invalid_argument);

  cfg.train_per_class = 3;  // nothing left to test on
  CHECK_THROWS_AS(run_experiment(cfg, tmp.dir()), std::invalid_argument);

  CHECK_THROWS_AS(run_experiment(cfg, tmp.file("missing")), io_error);

  // A single-class directory cannot be scanned into a dataset.
  test_util::TempDir single("single");
  std::filesystem::create_directories(std::filesystem::path(single.dir()) / "only");
  CHECK_THROWS_AS(scan_dataset(single.dir()), std::invalid_argument);

  CHECK_THROWS_AS(parse_coding_mode("bogus"), std::invalid_argument);
  CHECK(parse_coding_mode("nnsc") == CodingMode::kNnsc);
  CHECK(std::string(coding_mode_name(CodingMode::kNsc)) == "nsc");
}

TEST_CASE("PGM and PPM images feed the extractor") {
  test_util::TempDir tmp("pnm");

  // Binary PGM with a vertical edge.
  const auto pgm = tmp.file("edge.pgm");
  {
    std::ofstream os(pgm, std::ios::binary);
    os << "P5\n# test image\n32 32\n255\n";
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) os.put(x < 16 ? '\0' : char(255));
  }
  const auto set = load_input_descriptors(pgm, 16, 8);
  CHECK(set.count() == 9);
  CHECK(set.dim == kDescriptorDim);

  // ASCII PPM, converted to luma.
  const auto ppm = tmp.file("c.ppm");
  {
    std::ofstream os(ppm);
    os << "P3\n16 16\n255\n";
    for (int i = 0; i < 16 * 16; ++i) os << "10 200 30\n";
  }
  const auto set2 = load_input_descriptors(ppm, 16, 8);
  CHECK(set2.count() == 1);

  // Unsupported extension content.
  const auto bad = tmp.file("x.pgm");
  test_util::write_bytes(bad, {'P', '9', '\n'});
  CHECK_THROWS_AS(load_input_descriptors(bad, 16, 8), format_error);
}

TEST_CASE("fixed codebook reuses the first split's dictionary") {
  test_util::TempDir tmp("fixed");
  generate_synthetic_dataset(tmp.dir(), small_synth(6));

  PipelineConfig cfg;
  cfg.codebook_size = 12;
  cfg.train_per_class = 4;
  cfg.splits = 2;
  cfg.sample_limit = 0;
  cfg.svm_epochs = 60;
  cfg.fixed_codebook = true;
  const auto report = run_experiment(cfg, tmp.dir());
  CHECK(report.splits.size() == 2);
  CHECK(report.mean_accuracy >= 0.9);
}
