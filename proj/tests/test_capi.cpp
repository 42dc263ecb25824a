// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "nnsc/nnsc.h"
#include "test_util.hpp"

namespace {

std::vector<float> gradient_image(std::uint32_t w, std::uint32_t h) {
  std::vector<float> pixels(std::size_t(w) * h);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x)
      pixels[std::size_t(y) * w + x] = float(x) / float(w - 1);
  return pixels;
}

}  // namespace

TEST_CASE("version and error strings exist") {
  CHECK(std::string(nnsc_version()) == "0.1.0");
  CHECK(nnsc_last_error() != nullptr);
}

TEST_CASE("null arguments are rejected with a message") {
  CHECK(nnsc_descriptors_extract(nullptr, 16, 16, 16, 8, nullptr) ==
        NNSC_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(nnsc_last_error()) == "null argument");
  nnsc_descriptors* out = nullptr;
  CHECK(nnsc_descriptors_load(nullptr, &out) == NNSC_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("status codes map the error taxonomy") {
  test_util::TempDir tmp("capierr");
  nnsc_descriptors* out = nullptr;
  CHECK(nnsc_descriptors_load(tmp.file("missing.nnsc").c_str(), &out) == NNSC_ERROR_IO);

  const auto bad = tmp.file("bad.nnsc");
  test_util::write_bytes(bad, {'B', 'A', 'D', '!', 0, 0, 0, 0});
  CHECK(nnsc_descriptors_load(bad.c_str(), &out) == NNSC_ERROR_FORMAT);
  CHECK(std::strlen(nnsc_last_error()) > 0);

  // Too-small image -> invalid argument.
  const auto pixels = gradient_image(8, 8);
  CHECK(nnsc_descriptors_extract(pixels.data(), 8, 8, 16, 8, &out) ==
        NNSC_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("full pipeline through the C API") {
  test_util::TempDir tmp("capi");

  // Extract from a raw raster.
  const auto pixels = gradient_image(48, 48);
  nnsc_descriptors* set = nullptr;
  REQUIRE(nnsc_descriptors_extract(pixels.data(), 48, 48, 16, 8, &set) == NNSC_OK);
  CHECK(nnsc_descriptors_count(set) == 25);
  CHECK(nnsc_descriptors_dim(set) == 128);
  CHECK(nnsc_descriptors_data(set) != nullptr);
  CHECK(nnsc_descriptors_locations(set) != nullptr);

  // Save / load round trip.
  const auto desc_path = tmp.file("img.nnsc");
  REQUIRE(nnsc_descriptors_save(set, desc_path.c_str()) == NNSC_OK);
  nnsc_descriptors* reloaded = nullptr;
  REQUIRE(nnsc_descriptors_load(desc_path.c_str(), &reloaded) == NNSC_OK);
  CHECK(nnsc_descriptors_count(reloaded) == 25);
  CHECK(std::memcmp(nnsc_descriptors_data(reloaded), nnsc_descriptors_data(set),
                    25 * 128 * sizeof(float)) == 0);

  // Codebook training.
  nnsc_codebook_options cb_opts;
  nnsc_codebook_options_init(&cb_opts);
  cb_opts.size = 6;
  cb_opts.seed = 5;
  const nnsc_descriptors* sets[] = {set, reloaded};
  nnsc_codebook* cb = nullptr;
  REQUIRE(nnsc_codebook_train(sets, 2, &cb_opts, &cb) == NNSC_OK);
  CHECK(nnsc_codebook_dim(cb) == 128);
  CHECK(nnsc_codebook_size(cb) == 6);
  CHECK(nnsc_codebook_feature_dim(cb) == 21 * 6);

  const auto cb_path = tmp.file("book.nncb");
  REQUIRE(nnsc_codebook_save(cb, cb_path.c_str()) == NNSC_OK);
  nnsc_codebook* cb2 = nullptr;
  REQUIRE(nnsc_codebook_load(cb_path.c_str(), &cb2) == NNSC_OK);
  CHECK(nnsc_codebook_size(cb2) == 6);

  // Single-descriptor solve with a KKT certificate.
  nnsc_solver_options solver;
  nnsc_solver_options_init(&solver);
  std::vector<double> x(128);
  const float* data = nnsc_descriptors_data(set);
  for (int i = 0; i < 128; ++i) x[i] = data[i];
  std::vector<double> alpha(6);
  double objective = -1.0, kkt = -1.0;
  int converged = 0;
  REQUIRE(nnsc_solve(cb, x.data(), x.size(), NNSC_MODE_NNSC, &solver, alpha.data(), &objective,
                     &kkt, &converged) == NNSC_OK);
  CHECK(converged == 1);
  CHECK(kkt <= solver.inner_tol);
  for (const double a : alpha) CHECK(a >= 0.0);

  // Dimension mismatch is caught.
  CHECK(nnsc_solve(cb, x.data(), 64, NNSC_MODE_NSC, &solver, alpha.data(), nullptr, nullptr,
                   nullptr) == NNSC_ERROR_INVALID_ARGUMENT);

  // Image encoding + feature file.
  std::vector<float> feature(nnsc_codebook_feature_dim(cb));
  REQUIRE(nnsc_encode_image(cb, set, NNSC_MODE_NNSC, &solver, 2, feature.data()) == NNSC_OK);
  double norm2 = 0.0;
  for (const float v : feature) norm2 += double(v) * v;
  CHECK(std::abs(std::sqrt(norm2) - 1.0) <= 1e-6);

  nnsc_features* features = nullptr;
  REQUIRE(nnsc_features_create(std::uint32_t(feature.size()), &features) == NNSC_OK);
  REQUIRE(nnsc_features_append(features, feature.data(), 0) == NNSC_OK);
  for (auto& v : feature) v = -v;  // fake a second class
  REQUIRE(nnsc_features_append(features, feature.data(), 1) == NNSC_OK);
  CHECK(nnsc_features_count(features) == 2);

  const auto feat_path = tmp.file("f.nnft");
  REQUIRE(nnsc_features_save(features, feat_path.c_str()) == NNSC_OK);
  nnsc_features* features2 = nullptr;
  REQUIRE(nnsc_features_load(feat_path.c_str(), &features2) == NNSC_OK);
  CHECK(nnsc_features_dim(features2) == nnsc_features_dim(features));
  CHECK(nnsc_features_labels(features2)[1] == 1);

  // SVM train / predict / persist.
  const char* names[] = {"neg", "pos"};
  nnsc_model* model = nullptr;
  REQUIRE(nnsc_model_train(features, names, 2, 1.0, 100, 3, 1, &model) == NNSC_OK);
  CHECK(nnsc_model_classes(model) == 2);
  CHECK(std::string(nnsc_model_class_name(model, 1)) == "pos");
  CHECK(nnsc_model_class_name(model, 5) == nullptr);

  std::vector<std::uint32_t> labels(2);
  REQUIRE(nnsc_model_predict(model, nnsc_features_data(features), 2,
                             nnsc_features_dim(features), labels.data()) == NNSC_OK);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 1);

  const auto model_path = tmp.file("m.nnsv");
  REQUIRE(nnsc_model_save(model, model_path.c_str()) == NNSC_OK);
  nnsc_model* model2 = nullptr;
  REQUIRE(nnsc_model_load(model_path.c_str(), &model2) == NNSC_OK);
  CHECK(std::string(nnsc_model_class_name(model2, 0)) == "neg");

  nnsc_model_free(model2);
  nnsc_model_free(model);
  nnsc_features_free(features2);
  nnsc_features_free(features);
  nnsc_codebook_free(cb2);
  nnsc_codebook_free(cb);
  nnsc_descriptors_free(reloaded);
  nnsc_descriptors_free(set);
}

TEST_CASE("experiment runs through the C API") {
  test_util::TempDir tmp("capiexp");
  const auto dataset = tmp.file("ds");
  REQUIRE(nnsc_synthetic_dataset_write(dataset.c_str(), 3, 6, 18, 24, 4, 9) == NNSC_OK);

  nnsc_experiment_options opts;
  nnsc_experiment_options_init(&opts);
  opts.codebook_size = 12;
  opts.train_per_class = 4;
  opts.splits = 2;
  opts.seed = 9;
  opts.sample_limit = 0;
  opts.svm_epochs = 60;
  opts.workers = 2;

  char* report = nullptr;
  char* timing = nullptr;
  REQUIRE(nnsc_experiment_run(dataset.c_str(), &opts, &report, &timing) == NNSC_OK);
  REQUIRE(report != nullptr);
  REQUIRE(timing != nullptr);
  const std::string text(report);
  CHECK(text.find("accuracy.mean=") != std::string::npos);
  CHECK(std::string(timing).find("timing.encode_seconds=") != std::string::npos);

  // Identical options give an identical report.
  char* report2 = nullptr;
  REQUIRE(nnsc_experiment_run(dataset.c_str(), &opts, &report2, nullptr) == NNSC_OK);
  CHECK(text == report2);

  nnsc_string_free(report2);
  nnsc_string_free(report);
  nnsc_string_free(timing);

  CHECK(nnsc_experiment_run(tmp.file("nope").c_str(), &opts, &report, nullptr) ==
        NNSC_ERROR_IO);
}
