// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/dictionary.hpp"

namespace nnsc {

struct SolverConfig {
  double lambda = 0.3;                 // l1 weight
  double beta = 1.4;                   // support-detection threshold decay
  double inner_tol = 1e-6;             // KKT residual target
  std::uint32_t inner_max_iter = 10000;  // max full coordinate sweeps
  std::uint32_t outer_max_iter = 5;    // max support-detection rounds
  bool nonnegative = true;
};

struct SparseCode {
  std::vector<double> alpha;
  double objective = 0.0;     // ||x - D a||^2 + lambda * sum_k w_k |a_k|
  double kkt_residual = 0.0;  // worst first-order violation at return
  bool converged = true;      // false if inner_max_iter ran out first
};

// 0/1 per-coordinate penalty weights; 0 removes a coordinate from the penalty.
using WeightVector = std::vector<std::uint8_t>;

// Detected support, sorted ascending.
using SupportSet = std::vector<std::uint32_t>;

// All-ones weights except zero on the given support (its complement keeps the
// penalty).
WeightVector weights_from_support(std::uint32_t size, const SupportSet& support);

// Minimises ||x - D a||^2 + lambda * sum_k w_k |a_k| by cyclic coordinate
// descent, subject to a >= 0 when cfg.nonnegative. Atoms of unit norm give
// the closed-form update a_k <- max(0, d_k'(x - sum_{j!=k} d_j a_j) -
// lambda w_k / 2) (soft threshold in the signed case). Convergence is
// certified by the KKT residual:
//   a_k > 0 (or != 0):  |2 (D'(D a - x))_k + lambda w_k sign(a_k)| <= tol
//   a_k = 0, nonneg:     2 (D'(D a - x))_k + lambda w_k >= -tol
//   a_k = 0, signed:    |2 (D'(D a - x))_k| <= lambda w_k + tol
// Running out of sweeps flags converged = false; the caller decides.
SparseCode weighted_l1_solve(std::span<const double> x, const Dictionary& dict,
                             const WeightVector& weights, const SolverConfig& cfg);

// Threshold support detection on the itr-th solve: keeps coordinates with
// a_k strictly above eps = max(a) / beta^(itr+1). An all-zero code yields the
// empty set.
SupportSet support_detect(const SparseCode& code, std::uint32_t itr, const SolverConfig& cfg);

double support_threshold(double alpha_max, std::uint32_t itr, double beta);

struct IsdIteration {
  SparseCode code;        // solution of this round's truncated solve
  SupportSet support;     // support detected from it
  double epsilon = 0.0;   // threshold used
};

// Alternates truncated nonnegative l1 solves with support detection, starting
// from the empty support (all weights one). Stops when the detected support
// repeats or after outer_max_iter rounds, and returns the last solve. The
// optional trace records every round for inspection.
SparseCode isd_solve(std::span<const double> x, const Dictionary& dict, const SolverConfig& cfg,
                     std::vector<IsdIteration>* trace = nullptr);

// Exhaustive reference for the nonnegative problem: enumerates every support,
// solves the stationarity system 2 Ds'(Ds a - x) + lambda ws = 0, keeps
// candidates that are strictly positive on the support and first-order
// feasible off it, and returns the best objective (a = 0 is always a
// candidate). Refuses size > 12.
SparseCode brute_force_oracle(std::span<const double> x, const Dictionary& dict,
                              const WeightVector& weights, double lambda);

}  // namespace nnsc
