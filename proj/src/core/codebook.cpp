// SPDX-License-Identifier: Apache-2.0
#include "core/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"

namespace nnsc {

namespace {

void check_train_args(const DescriptorSet& data, std::uint32_t p) {
  if (data.count() == 0) throw std::invalid_argument("empty descriptor set");
  if (p == 0) throw std::invalid_argument("codebook size must be positive");
  if (p > data.count())
    throw std::invalid_argument("codebook size exceeds number of descriptors");
  if (data.dim == 0 || data.data.size() != data.count() * data.dim)
    throw std::invalid_argument("malformed descriptor set");
}

// Seeded sample of p descriptors, preferring pairwise-distinct values; falls
// back to duplicates when the data has fewer than p distinct rows.
std::vector<std::size_t> sample_initial_rows(const DescriptorSet& data, std::uint32_t p,
                                             std::uint64_t seed) {
  const std::size_t m = data.count();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);

  const auto rows_equal = [&](std::size_t a, std::size_t b) {
    return std::memcmp(data.data.data() + a * data.dim, data.data.data() + b * data.dim,
                       data.dim * sizeof(float)) == 0;
  };

  std::vector<std::size_t> picked;
  picked.reserve(p);
  for (const std::size_t c : order) {
    if (picked.size() == p) break;
    bool dup = false;
    for (const std::size_t q : picked)
      if (rows_equal(c, q)) {
        dup = true;
        break;
      }
    if (!dup) picked.push_back(c);
  }
  for (std::size_t i = 0; picked.size() < p; ++i) picked.push_back(order[i]);
  return picked;
}

// Unit-normalises a column in place; a zero column becomes a basis vector so
// the dictionary invariant always holds.
void normalize_column(double* col, std::uint32_t dim, std::uint32_t k) {
  double norm2 = 0.0;
  for (std::uint32_t i = 0; i < dim; ++i) norm2 += col[i] * col[i];
  if (norm2 < 1e-24) {
    for (std::uint32_t i = 0; i < dim; ++i) col[i] = 0.0;
    col[k % dim] = 1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::uint32_t i = 0; i < dim; ++i) col[i] *= inv;
}

}  // namespace

KmeansResult kmeans_train(const DescriptorSet& data, std::uint32_t p, std::uint32_t max_iter,
                          std::uint64_t seed, unsigned workers) {
  check_train_args(data, p);
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
  const std::size_t m = data.count();
  const std::uint32_t L = data.dim;

  std::vector<double> centers(std::size_t(p) * L);  // row-major, one centre per row
  const auto init = sample_initial_rows(data, p, derive_seed(seed, "kmeans-init"));
  for (std::uint32_t k = 0; k < p; ++k)
    for (std::uint32_t i = 0; i < L; ++i)
      centers[std::size_t(k) * L + i] = data.data[init[k] * L + i];

  std::vector<std::uint32_t> assign(m, 0), prev_assign;
  std::vector<double> dist2(m, 0.0);

  KmeansResult result;
  bool stable = false;
  std::uint32_t iter = 0;
  while (iter < max_iter && !stable) {
    ++iter;
    // Assignment; ties go to the lowest centre index.
    parallel_for(m, workers, [&](std::size_t mm) {
      const float* x = data.data.data() + mm * L;
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_k = 0;
      for (std::uint32_t k = 0; k < p; ++k) {
        const double* c = centers.data() + std::size_t(k) * L;
        double d = 0.0;
        for (std::uint32_t i = 0; i < L; ++i) {
          const double diff = double(x[i]) - c[i];
          d += diff * diff;
        }
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      assign[mm] = best_k;
      dist2[mm] = best;
    });

    double objective = 0.0;
    for (const double d : dist2) objective += d;
    result.log.objectives.push_back(objective);

    stable = (assign == prev_assign);
    if (stable) break;

    std::vector<std::size_t> counts(p, 0);
    for (const auto a : assign) ++counts[a];

    // Re-seed empty clusters from the globally farthest point whose donor
    // cluster keeps at least one member.
    for (std::uint32_t k = 0; k < p; ++k) {
      if (counts[k] != 0) continue;
      double far = -1.0;
      std::size_t far_m = 0;
      for (std::size_t mm = 0; mm < m; ++mm)
        if (counts[assign[mm]] > 1 && dist2[mm] > far) {
          far = dist2[mm];
          far_m = mm;
        }
      --counts[assign[far_m]];
      counts[k] = 1;
      assign[far_m] = k;
      dist2[far_m] = 0.0;
      for (std::uint32_t i = 0; i < L; ++i)
        centers[std::size_t(k) * L + i] = data.data[far_m * L + i];
    }
    prev_assign = assign;

    // Centre update: cluster means, accumulated in index order.
    std::vector<double> sums(std::size_t(p) * L, 0.0);
    for (std::size_t mm = 0; mm < m; ++mm) {
      double* s = sums.data() + std::size_t(assign[mm]) * L;
      const float* x = data.data.data() + mm * L;
      for (std::uint32_t i = 0; i < L; ++i) s[i] += x[i];
    }
    for (std::uint32_t k = 0; k < p; ++k) {
      if (counts[k] == 0) continue;  // only possible pre-reseed; keep centre
      const double inv = 1.0 / double(counts[k]);
      for (std::uint32_t i = 0; i < L; ++i)
        centers[std::size_t(k) * L + i] = sums[std::size_t(k) * L + i] * inv;
    }
  }

  result.log.iterations = iter;
  result.log.converged = stable;
  result.centers = centers;

  std::vector<double> atoms(std::size_t(p) * L);
  for (std::uint32_t k = 0; k < p; ++k) {
    double* col = atoms.data() + std::size_t(k) * L;
    for (std::uint32_t i = 0; i < L; ++i) col[i] = centers[std::size_t(k) * L + i];
    normalize_column(col, L, k);
  }
  result.dictionary = make_dictionary(L, p, std::move(atoms));
  return result;
}

namespace {

// Signed l1 coding pass; rows of `codes` are the per-descriptor solutions.
// Returns the full objective summed in descriptor order.
double coding_pass(const DescriptorSet& data, const Dictionary& dict, double lambda,
                   unsigned workers, std::vector<double>& codes, bool& all_converged) {
  const std::size_t m = data.count();
  const std::uint32_t p = dict.size;
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.nonnegative = false;
  const WeightVector ones(p, 1);
  std::vector<double> objectives(m);
  std::vector<std::uint8_t> converged(m);
  parallel_for(m, workers, [&](std::size_t mm) {
    std::vector<double> x(data.row(mm).begin(), data.row(mm).end());
    const SparseCode code = weighted_l1_solve(x, dict, ones, cfg);
    std::copy(code.alpha.begin(), code.alpha.end(), codes.begin() + mm * p);
    objectives[mm] = code.objective;
    converged[mm] = code.converged ? 1 : 0;
  });
  double total = 0.0;
  for (const double o : objectives) total += o;
  all_converged = std::all_of(converged.begin(), converged.end(), [](std::uint8_t c) { return c; });
  return total;
}

}  // namespace

ScDictResult sc_dictionary_train(const DescriptorSet& data, std::uint32_t p, double lambda,
                                 std::uint32_t outer_iters, std::uint64_t seed, unsigned workers,
                                 ScDictTrace* trace) {
  check_train_args(data, p);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const std::size_t m = data.count();
  const std::uint32_t L = data.dim;
  if (trace) *trace = {};

  std::vector<double> atoms(std::size_t(L) * p);  // column-major
  const auto init = sample_initial_rows(data, p, derive_seed(seed, "scdict-init"));
  for (std::uint32_t k = 0; k < p; ++k) {
    double* col = atoms.data() + std::size_t(k) * L;
    for (std::uint32_t i = 0; i < L; ++i) col[i] = data.data[init[k] * L + i];
    normalize_column(col, L, k);
  }
  Dictionary dict = make_dictionary(L, p, atoms);

  ScDictResult result;
  std::vector<double> codes(m * std::size_t(p), 0.0);
  bool all_converged = false;

  const auto record = [&](double objective) {
    result.log.objectives.push_back(objective);
    if (trace) {
      trace->dictionaries.push_back(dict.atoms);
      trace->codes.push_back(codes);
    }
  };

  record(coding_pass(data, dict, lambda, workers, codes, all_converged));

  for (std::uint32_t t = 0; t < outer_iters; ++t) {
    // Residual columns r_m = x_m - D a_m, maintained through column updates.
    std::vector<double> residual(std::size_t(L) * m);
    for (std::size_t mm = 0; mm < m; ++mm) {
      double* r = residual.data() + mm * L;
      const float* x = data.data.data() + mm * L;
      for (std::uint32_t i = 0; i < L; ++i) r[i] = x[i];
      for (std::uint32_t k = 0; k < p; ++k) {
        const double a = codes[mm * p + k];
        if (a == 0.0) continue;
        const double* d = dict.atoms.data() + std::size_t(k) * L;
        for (std::uint32_t i = 0; i < L; ++i) r[i] -= a * d[i];
      }
    }

    std::vector<std::vector<std::size_t>> users(p);
    for (std::size_t mm = 0; mm < m; ++mm)
      for (std::uint32_t k = 0; k < p; ++k)
        if (codes[mm * p + k] != 0.0) users[k].push_back(mm);

    for (std::uint32_t k = 0; k < p; ++k) {
      if (users[k].empty()) continue;  // dead atom stays as is
      double* d = dict.atoms.data() + std::size_t(k) * L;

      // Sphere-constrained column minimiser: direction of E_k a_k where E_k
      // is the residual without atom k's contribution.
      std::vector<double> v(L, 0.0);
      double energy = 0.0;
      for (const std::size_t mm : users[k]) {
        const double a = codes[mm * p + k];
        const double* r = residual.data() + mm * L;
        for (std::uint32_t i = 0; i < L; ++i) v[i] += a * r[i];
        energy += a * a;
      }
      for (std::uint32_t i = 0; i < L; ++i) v[i] += energy * d[i];

      double vnorm2 = 0.0;
      for (const double vi : v) vnorm2 += vi * vi;
      if (vnorm2 < 1e-24) continue;  // degenerate direction, keep old atom
      const double inv = 1.0 / std::sqrt(vnorm2);

      for (const std::size_t mm : users[k]) {
        const double a = codes[mm * p + k];
        double* r = residual.data() + mm * L;
        for (std::uint32_t i = 0; i < L; ++i) r[i] += a * (d[i] - v[i] * inv);
      }
      for (std::uint32_t i = 0; i < L; ++i) d[i] = v[i] * inv;
    }

    record(coding_pass(data, dict, lambda, workers, codes, all_converged));
  }

  result.log.iterations = outer_iters;
  result.log.converged = all_converged;
  result.dictionary = make_dictionary(L, p, dict.atoms);
  return result;
}

}  // namespace nnsc
