// SPDX-License-Identifier: Apache-2.0
#include "core/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nnsc {

namespace {

void check_problem(std::span<const double> x, const Dictionary& dict, const WeightVector& weights,
                   const SolverConfig& cfg) {
  if (x.size() != dict.dim) throw std::invalid_argument("descriptor dim does not match dictionary");
  if (weights.size() != dict.size)
    throw std::invalid_argument("weight vector length does not match dictionary size");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(cfg.beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  if (!(cfg.inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
  if (cfg.inner_max_iter == 0) throw std::invalid_argument("inner_max_iter must be positive");
  for (const auto w : weights)
    if (w > 1) throw std::invalid_argument("weights must be 0 or 1");
}

double weighted_objective(std::span<const double> residual, std::span<const double> alpha,
                          const WeightVector& weights, double lambda) {
  double fit = 0.0;
  for (const double r : residual) fit += r * r;
  double pen = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k)
    if (weights[k]) pen += std::abs(alpha[k]);
  return fit + lambda * pen;
}

double kkt_residual_nonneg(const Dictionary& dict, std::span<const double> residual,
                           std::span<const double> alpha, const WeightVector& weights,
                           double lambda) {
  const std::uint32_t p = dict.size, L = dict.dim;
  double worst = 0.0;
  for (std::uint32_t k = 0; k < p; ++k) {
    const double* d = dict.atoms.data() + std::size_t(k) * L;
    double dot = 0.0;
    for (std::uint32_t i = 0; i < L; ++i) dot += d[i] * residual[i];
    const double g = -2.0 * dot + lambda * (weights[k] ? 1.0 : 0.0);
    worst = std::max(worst, alpha[k] > 0.0 ? std::abs(g) : std::max(0.0, -g));
  }
  return worst;
}

// Active-set polish for the nonnegative problem. Coordinate descent can crawl
// when more atoms are active than the dictionary rank: the optimum then lies
// far along a near-null ridge that tiny coordinate steps climb slowly.
//
// This is a Lawson-Hanson-style loop generalised for the linear penalty term,
// seeded with the coordinate-descent iterate. Per round, with S the current
// support, eigendecompose Gs = Ds'Ds and split b = Ds'x - (lambda/2) ws into
// range and null components:
//   - b has a null component: the restricted objective decreases linearly
//     along that null direction; walk the feasible ray until a coordinate
//     hits zero and drop it.
//   - stationary solution z (min-norm) is strictly positive: adopt it.
//   - z has nonpositive entries: move along the segment towards z until the
//     first coordinate hits zero, drop it (inner Lawson-Hanson step).
// With a positive stationary point in hand, grow S by the worst off-support
// violation, or stop. Each step strictly decreases the objective, so supports
// cannot cycle. A result is only accepted if it passes the full KKT
// certificate, so the polish can only accelerate the solver, never change
// what it converges to.
bool try_active_set_polish(std::span<const double> x, const Dictionary& dict,
                           const WeightVector& weights, double lambda, double tol,
                           std::vector<double>& alpha, std::vector<double>& residual,
                           double& kkt_out) {
  const std::uint32_t p = dict.size, L = dict.dim;
  constexpr std::size_t kMaxSupport = 64;
  std::vector<std::uint32_t> support;
  for (std::uint32_t k = 0; k < p; ++k)
    if (alpha[k] > 0.0) support.push_back(k);
  if (support.empty() || support.size() > kMaxSupport) return false;

  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), L);
  std::vector<double> current(alpha);  // feasible iterate, full length

  const auto drop_zeros = [&](double floor_value) {
    std::vector<std::uint32_t> kept;
    for (const auto k : support) {
      if (current[k] > floor_value) {
        kept.push_back(k);
      } else {
        current[k] = 0.0;
      }
    }
    support = std::move(kept);
  };

  for (std::uint32_t round = 0; round < 8 * p + 32; ++round) {
    if (support.empty() || support.size() > kMaxSupport) return false;

    const int s = int(support.size());
    Eigen::MatrixXd sub(L, s);
    Eigen::VectorXd b(s), a_cur(s);
    for (int i = 0; i < s; ++i) {
      sub.col(i) = Eigen::Map<const Eigen::VectorXd>(
          dict.atoms.data() + std::size_t(support[i]) * L, L);
      b[i] = sub.col(i).dot(xv) - 0.5 * lambda * (weights[support[i]] ? 1.0 : 0.0);
      a_cur[i] = current[support[i]];
    }
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) return false;
    const double rank_eps = std::max(1e-12, 1e-12 * eig.eigenvalues().maxCoeff());

    // Null component of b drives an unbounded descent ray of the restricted
    // objective; the nonnegativity boundary cuts it off.
    Eigen::VectorXd b_null = Eigen::VectorXd::Zero(s);
    for (int i = 0; i < s; ++i)
      if (eig.eigenvalues()[i] <= rank_eps)
        b_null += eig.eigenvectors().col(i).dot(b) * eig.eigenvectors().col(i);
    if (b_null.norm() > 1e-10 * (1.0 + b.norm())) {
      double theta = std::numeric_limits<double>::infinity();
      for (int i = 0; i < s; ++i)
        if (b_null[i] < 0.0) theta = std::min(theta, a_cur[i] / -b_null[i]);
      if (!std::isfinite(theta)) return false;  // cannot happen for w >= 0
      for (int i = 0; i < s; ++i) current[support[i]] = a_cur[i] + theta * b_null[i];
      drop_zeros(1e-14);
      continue;
    }

    // Min-norm stationary solution on the support.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(s);
    for (int i = 0; i < s; ++i)
      if (eig.eigenvalues()[i] > rank_eps)
        z += (eig.eigenvectors().col(i).dot(b) / eig.eigenvalues()[i]) *
             eig.eigenvectors().col(i);

    int blocking = -1;
    double theta = 1.0;
    for (int i = 0; i < s; ++i)
      if (z[i] <= 0.0) {
        const double t = a_cur[i] / (a_cur[i] - z[i]);
        if (t < theta) {
          theta = t;
          blocking = i;
        }
      }
    if (blocking >= 0) {
      for (int i = 0; i < s; ++i) current[support[i]] = a_cur[i] + theta * (z[i] - a_cur[i]);
      current[support[blocking]] = 0.0;
      drop_zeros(1e-14);
      continue;
    }

    for (int i = 0; i < s; ++i) current[support[i]] = z[i];
    std::vector<double> r(x.begin(), x.end());
    Eigen::Map<Eigen::VectorXd>(r.data(), L) -= sub * z;
    const double kkt = kkt_residual_nonneg(dict, r, current, weights, lambda);
    if (kkt <= tol) {
      alpha = std::move(current);
      residual = std::move(r);
      kkt_out = kkt;
      return true;
    }

    // Grow by the worst off-support violation.
    int grow = -1;
    double worst = tol;
    for (std::uint32_t k = 0; k < p; ++k) {
      if (current[k] > 0.0) continue;
      const double* d = dict.atoms.data() + std::size_t(k) * L;
      double dot = 0.0;
      for (std::uint32_t i = 0; i < L; ++i) dot += d[i] * r[i];
      const double viol = 2.0 * dot - lambda * (weights[k] ? 1.0 : 0.0);  // = -gradient
      if (viol > worst) {
        worst = viol;
        grow = int(k);
      }
    }
    if (grow < 0) return false;  // violation sits on-support; give up
    support.insert(std::lower_bound(support.begin(), support.end(), std::uint32_t(grow)),
                   std::uint32_t(grow));
  }
  return false;
}

}  // namespace

WeightVector weights_from_support(std::uint32_t size, const SupportSet& support) {
  WeightVector w(size, 1);
  for (const auto k : support) {
    if (k >= size) throw std::invalid_argument("support index out of range");
    w[k] = 0;
  }
  return w;
}

SparseCode weighted_l1_solve(std::span<const double> x, const Dictionary& dict,
                             const WeightVector& weights, const SolverConfig& cfg) {
  check_problem(x, dict, weights, cfg);
  const std::uint32_t p = dict.size;
  const std::uint32_t L = dict.dim;

  SparseCode code;
  code.alpha.assign(p, 0.0);
  std::vector<double> residual(x.begin(), x.end());

  // Column energies; ~1 by the dictionary invariant but dividing keeps every
  // coordinate step an exact minimiser for float-reloaded codebooks too.
  std::vector<double> col_norm2(p);
  for (std::uint32_t k = 0; k < p; ++k) {
    double s = 0.0;
    for (const double v : dict.atom(k)) s += v * v;
    col_norm2[k] = s;
  }

  code.converged = false;
  for (std::uint32_t sweep = 0; sweep < cfg.inner_max_iter; ++sweep) {
    for (std::uint32_t k = 0; k < p; ++k) {
      const double* d = dict.atoms.data() + std::size_t(k) * L;
      double dot = 0.0;
      for (std::uint32_t i = 0; i < L; ++i) dot += d[i] * residual[i];
      const double rho = dot + col_norm2[k] * code.alpha[k];
      const double shift = 0.5 * cfg.lambda * (weights[k] ? 1.0 : 0.0);
      double next;
      if (cfg.nonnegative) {
        next = std::max(0.0, (rho - shift) / col_norm2[k]);
      } else {
        const double mag = std::abs(rho) - shift;
        next = mag > 0.0 ? std::copysign(mag, rho) / col_norm2[k] : 0.0;
      }
      if (next != code.alpha[k]) {
        const double delta = next - code.alpha[k];
        for (std::uint32_t i = 0; i < L; ++i) residual[i] -= delta * d[i];
        code.alpha[k] = next;
      }
    }

    // KKT residual; gradient of the fit term is -2 D' r.
    double worst = 0.0;
    for (std::uint32_t k = 0; k < p; ++k) {
      const double* d = dict.atoms.data() + std::size_t(k) * L;
      double dot = 0.0;
      for (std::uint32_t i = 0; i < L; ++i) dot += d[i] * residual[i];
      const double g = -2.0 * dot;
      const double lw = cfg.lambda * (weights[k] ? 1.0 : 0.0);
      double viol;
      if (cfg.nonnegative) {
        viol = code.alpha[k] > 0.0 ? std::abs(g + lw) : std::max(0.0, -(g + lw));
      } else {
        viol = code.alpha[k] != 0.0 ? std::abs(g + lw * (code.alpha[k] > 0.0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g) - lw);
      }
      worst = std::max(worst, viol);
    }
    code.kkt_residual = worst;
    if (worst <= cfg.inner_tol) {
      code.converged = true;
      break;
    }

    if (cfg.nonnegative && (sweep + 1) % 64 == 0 &&
        try_active_set_polish(x, dict, weights, cfg.lambda, cfg.inner_tol, code.alpha, residual,
                              code.kkt_residual)) {
      code.converged = true;
      break;
    }
  }

  code.objective = weighted_objective(residual, code.alpha, weights, cfg.lambda);
  return code;
}

double support_threshold(double alpha_max, std::uint32_t itr, double beta) {
  return alpha_max / std::pow(beta, double(itr) + 1.0);
}

SupportSet support_detect(const SparseCode& code, std::uint32_t itr, const SolverConfig& cfg) {
  if (!(cfg.beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  double alpha_max = 0.0;
  for (const double a : code.alpha) alpha_max = std::max(alpha_max, a);
  SupportSet support;
  if (alpha_max <= 0.0) return support;  // all-zero code detects nothing
  const double eps = support_threshold(alpha_max, itr, cfg.beta);
  for (std::uint32_t k = 0; k < code.alpha.size(); ++k)
    if (code.alpha[k] > eps) support.push_back(k);
  return support;
}

SparseCode isd_solve(std::span<const double> x, const Dictionary& dict, const SolverConfig& cfg,
                     std::vector<IsdIteration>* trace) {
  if (trace) trace->clear();
  SupportSet detected;
  SparseCode code;
  bool all_converged = true;
  for (std::uint32_t itr = 0;; ++itr) {
    const WeightVector w = weights_from_support(dict.size, detected);
    code = weighted_l1_solve(x, dict, w, cfg);
    all_converged = all_converged && code.converged;
    SupportSet next = support_detect(code, itr, cfg);
    if (trace) {
      double alpha_max = 0.0;
      for (const double a : code.alpha) alpha_max = std::max(alpha_max, a);
      trace->push_back({code, next, alpha_max > 0.0 ? support_threshold(alpha_max, itr, cfg.beta)
                                                    : 0.0});
    }
    if (next == detected || itr >= cfg.outer_max_iter) break;
    detected = std::move(next);
  }
  // A non-converged round taints the whole alternation: its support guess fed
  // the rounds after it.
  code.converged = all_converged;
  return code;
}

SparseCode brute_force_oracle(std::span<const double> x, const Dictionary& dict,
                              const WeightVector& weights, double lambda) {
  SolverConfig probe;
  probe.lambda = lambda;
  check_problem(x, dict, weights, probe);
  const std::uint32_t p = dict.size;
  if (p > 12) throw std::invalid_argument("brute force oracle refuses size > 12");
  const std::uint32_t L = dict.dim;

  const Eigen::Map<const Eigen::MatrixXd> D(dict.atoms.data(), L, p);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), L);
  const Eigen::MatrixXd gram = D.transpose() * D;
  const Eigen::VectorXd dtx = D.transpose() * xv;
  Eigen::VectorXd lw(p);
  for (std::uint32_t k = 0; k < p; ++k) lw[k] = lambda * (weights[k] ? 1.0 : 0.0);

  const auto objective_of = [&](const Eigen::VectorXd& a) {
    return (xv - D * a).squaredNorm() + lw.dot(a.cwiseAbs());
  };

  Eigen::VectorXd best = Eigen::VectorXd::Zero(p);
  double best_obj = objective_of(best);

  std::vector<int> idx;
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    idx.clear();
    for (std::uint32_t k = 0; k < p; ++k)
      if (mask & (1u << k)) idx.push_back(int(k));
    const int s = int(idx.size());

    Eigen::MatrixXd G(s, s);
    Eigen::VectorXd b(s);
    for (int i = 0; i < s; ++i) {
      b[i] = dtx[idx[i]] - 0.5 * lw[idx[i]];
      for (int j = 0; j < s; ++j) G(i, j) = gram(idx[i], idx[j]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) continue;  // degenerate sub-dictionary
    const Eigen::VectorXd as = lu.solve(b);
    if ((as.array() <= 0.0).any()) continue;

    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < s; ++i) full[idx[i]] = as[i];

    // Off-support first-order feasibility, with float slack.
    const Eigen::VectorXd grad = 2.0 * (gram * full - dtx) + lw;
    bool feasible = true;
    for (std::uint32_t k = 0; k < p && feasible; ++k)
      if (!(mask & (1u << k)) && grad[k] < -1e-9) feasible = false;
    if (!feasible) continue;

    const double obj = objective_of(full);
    if (obj < best_obj) {
      best_obj = obj;
      best = full;
    }
  }

  SparseCode code;
  code.alpha.assign(best.data(), best.data() + p);
  code.objective = best_obj;
  const Eigen::VectorXd grad = 2.0 * (gram * best - dtx) + lw;
  double worst = 0.0;
  for (std::uint32_t k = 0; k < p; ++k)
    worst = std::max(worst, best[k] > 0.0 ? std::abs(grad[k]) : std::max(0.0, -grad[k]));
  code.kkt_residual = worst;
  code.converged = true;
  return code;
}

}  // namespace nnsc
