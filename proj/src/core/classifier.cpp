// SPDX-License-Identifier: Apache-2.0
#include "core/classifier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace nnsc {

namespace {

constexpr char kMagic[4] = {'N', 'N', 'S', 'V'};
constexpr std::uint32_t kVersion = 1;

// Dual coordinate descent for min_w 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w'x_i)^2
// over the bias-augmented features (see liblinear's L2-loss dual: alpha >= 0,
// diagonal C-term 1/(2C), no upper bound). Exact per-coordinate minimisation,
// so the dual objective never increases.
void train_one_class(const FeatureSet& data, const std::vector<double>& row_norm2,
                     std::uint32_t positive_class, double reg_c, std::uint32_t epochs,
                     std::uint64_t seed, double* w, double* b, std::vector<double>* dual_log,
                     double* primal_out) {
  const std::size_t n = data.count();
  const std::uint32_t dim = data.dim;
  const double diag = 0.5 / reg_c;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == positive_class ? 1.0 : -1.0;

  for (std::uint32_t j = 0; j < dim; ++j) w[j] = 0.0;
  *b = 0.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);

  for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle(order, rng);
    double max_pg = 0.0;
    for (const std::size_t i : order) {
      const float* x = data.data.data() + i * dim;
      double score = *b;
      for (std::uint32_t j = 0; j < dim; ++j) score += w[j] * x[j];
      const double grad = y[i] * score - 1.0 + diag * alpha[i];
      const double pg = alpha[i] == 0.0 ? std::min(grad, 0.0) : grad;
      max_pg = std::max(max_pg, std::abs(pg));
      if (pg == 0.0) continue;
      const double quad = row_norm2[i] + 1.0 + diag;
      const double next = std::max(0.0, alpha[i] - grad / quad);
      if (next == alpha[i]) continue;
      const double step = (next - alpha[i]) * y[i];
      for (std::uint32_t j = 0; j < dim; ++j) w[j] += step * x[j];
      *b += step;
      alpha[i] = next;
    }
    if (dual_log) {
      double wnorm2 = *b * *b, a1 = 0.0, a2 = 0.0;
      for (std::uint32_t j = 0; j < dim; ++j) wnorm2 += w[j] * w[j];
      for (std::size_t i = 0; i < n; ++i) {
        a1 += alpha[i];
        a2 += alpha[i] * alpha[i];
      }
      dual_log->push_back(0.5 * (wnorm2 + diag * a2) - a1);
    }
    if (max_pg < 1e-10) break;
  }

  if (primal_out) {
    double obj = 0.5 * (*b * *b);
    for (std::uint32_t j = 0; j < dim; ++j) obj += 0.5 * w[j] * w[j];
    for (std::size_t i = 0; i < n; ++i) {
      const float* x = data.data.data() + i * dim;
      double score = *b;
      for (std::uint32_t j = 0; j < dim; ++j) score += w[j] * x[j];
      const double slack = std::max(0.0, 1.0 - y[i] * score);
      obj += reg_c * slack * slack;
    }
    *primal_out = obj;
  }
}

}  // namespace

LinearModel svm_train(const FeatureSet& data, std::vector<std::string> class_names, double reg_c,
                      std::uint32_t epochs, std::uint64_t seed, SvmTrainLog* log,
                      unsigned workers) {
  const std::size_t n = data.count();
  const std::uint32_t classes = std::uint32_t(class_names.size());
  if (classes < 2) throw std::invalid_argument("need at least two classes");
  if (!(reg_c > 0.0)) throw std::invalid_argument("reg_c must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (n == 0 || data.dim == 0 || data.data.size() != n * data.dim)
    throw std::invalid_argument("malformed feature set");
  std::vector<std::size_t> per_class(classes, 0);
  for (const auto label : data.labels) {
    if (label >= classes) throw std::invalid_argument("label outside the class set");
    ++per_class[label];
  }
  for (std::uint32_t c = 0; c < classes; ++c)
    if (per_class[c] == 0) throw std::invalid_argument("class has no training examples");
  for (const float v : data.data)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");

  std::vector<double> row_norm2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::uint32_t j = 0; j < data.dim; ++j) {
      const double v = data.data[i * data.dim + j];
      s += v * v;
    }
    row_norm2[i] = s;
  }

  LinearModel model;
  model.classes = classes;
  model.dim = data.dim;
  model.weights.resize(std::size_t(classes) * data.dim);
  model.biases.resize(classes);
  model.class_names = std::move(class_names);
  if (log) {
    log->dual_objectives.assign(classes, {});
    log->primal_objectives.assign(classes, 0.0);
  }

  parallel_for(classes, workers, [&](std::size_t c) {
    std::vector<double> w(data.dim, 0.0);
    double b = 0.0;
    train_one_class(data, row_norm2, std::uint32_t(c), reg_c, epochs,
                    derive_seed(seed, "svm-class", c), w.data(), &b,
                    log ? &log->dual_objectives[c] : nullptr,
                    log ? &log->primal_objectives[c] : nullptr);
    for (std::uint32_t j = 0; j < data.dim; ++j) model.weights[c * data.dim + j] = float(w[j]);
    model.biases[c] = float(b);
  });
  return model;
}

std::vector<std::uint32_t> svm_predict(const LinearModel& model, std::span<const float> rows,
                                       std::size_t row_count) {
  if (model.classes == 0 || model.dim == 0) throw std::invalid_argument("empty model");
  if (rows.size() != row_count * model.dim)
    throw std::invalid_argument("feature dim does not match model");
  std::vector<std::uint32_t> labels(row_count);
  for (std::size_t i = 0; i < row_count; ++i) {
    const float* x = rows.data() + i * model.dim;
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t best_c = 0;
    for (std::uint32_t c = 0; c < model.classes; ++c) {
      const float* w = model.weights.data() + std::size_t(c) * model.dim;
      double score = model.biases[c];
      for (std::uint32_t j = 0; j < model.dim; ++j) score += double(w[j]) * x[j];
      if (score > best) {
        best = score;
        best_c = c;
      }
    }
    labels[i] = best_c;
  }
  return labels;
}

void save_model(const LinearModel& model, const std::string& path) {
  auto os = io::open_output(path);
  io::write_magic(os, kMagic);
  io::write_u32(os, kVersion);
  io::write_u32(os, model.classes);
  io::write_u32(os, model.dim);
  io::write_f32_array(os, model.weights);
  io::write_f32_array(os, model.biases);
  for (const auto& name : model.class_names) io::write_string(os, name);
  os.flush();
  if (!os) throw io_error("write failed: " + path);
}

LinearModel load_model(const std::string& path) {
  auto is = io::open_input(path);
  io::expect_magic(is, kMagic, "model");
  const std::uint32_t version = io::read_u32(is, "model version");
  if (version != kVersion) throw format_error("unsupported model file version");
  LinearModel model;
  model.classes = io::read_u32(is, "model classes");
  model.dim = io::read_u32(is, "model dim");
  if (model.classes == 0 || model.dim == 0) throw format_error("model dimensions must be positive");
  model.weights = io::read_f32_array(is, std::size_t(model.classes) * model.dim, "model weights");
  model.biases = io::read_f32_array(is, model.classes, "model biases");
  model.class_names.reserve(model.classes);
  for (std::uint32_t c = 0; c < model.classes; ++c)
    model.class_names.push_back(io::read_string(is, "model class names"));
  io::expect_eof(is, "model");
  for (const float v : model.weights)
    if (!std::isfinite(v)) throw format_error("non-finite model weight");
  return model;
}

}  // namespace nnsc
