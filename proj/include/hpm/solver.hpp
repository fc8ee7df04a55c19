#pragma once

// Projected-gradient solver for the tensor-cone relaxation of balanced
// two-group partitioning, plus the exhaustive oracle, label extraction and
// the diagonal dual certificate.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hpm/error.hpp"
#include "hpm/model.hpp"
#include "hpm/spectra.hpp"
#include "hpm/tensor.hpp"

namespace hpm {

struct SolverConfig {
  /// Gradient step applied to W each outer iteration.
  double zeta = 0.05;
  int outer_iters = 100;
  int inner_iters = 40;
  /// Iterations of each negative-eigenvector descent; overrides ascent.max_iters.
  int descent_iters = 20;
  /// Negative-eigenvector search settings; its seed is derived from `seed`.
  AscentConfig ascent{};
  /// Pin every sigma2 entry to 1 instead of only the pure diagonal.
  bool enforce_full_sigma2 = false;
  /// Re-balance after every inner iteration, not only after a PSD correction.
  bool always_balance = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) throw DataError("zeta must be a positive finite number");
    if (outer_iters < 1 || inner_iters < 1 || descent_iters < 1) {
      throw DataError("iteration counts must be >= 1");
    }
    ascent.validate();
  }
};

struct OuterDiagnostics {
  double objective = 0.0;
  int psd_corrections = 0;
};

struct SolveResult {
  SymmetricTensor Y;
  std::optional<Assignment> y_hat;
  std::optional<double> h;
  /// <W, Y>
  double objective = 0.0;
  int psd_corrections = 0;
  std::vector<OuterDiagnostics> trace;
};

enum class Verdict { supports_optimality, refutes, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::supports_optimality: return "supports_optimality";
    case Verdict::refutes: return "refutes";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct Certificate {
  /// Diagonal dual tensor V*.
  SymmetricTensor v_star;
  /// Estimate of the constrained minimum of <V* - W, u^m>; an upper bound.
  double lambda1_estimate = 0.0;
  /// Unit vector, orthogonal to 1 and y, attaining lambda1_estimate.
  Vector witness;
  /// Always true: the estimate comes from multistart local search.
  bool heuristic = true;
  Verdict verdict = Verdict::inconclusive;
};

struct CertifyConfig {
  AscentConfig ascent{};
  /// lambda1 above +threshold supports optimality, below -threshold refutes it.
  double threshold = 1e-8;
};

/// 64-bit mix used to derive independent seeds from (base, counter).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t counter) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// <W, y^m> for balanced labels y.
inline double objective(const SymmetricTensor& w, const Assignment& y) {
  require_balanced(y, "objective");
  if (y.size() != w.dim()) throw DataError("objective: label count does not match tensor dimension");
  return form(w, y.as_vector());
}

struct BruteForceResult {
  Assignment y_opt;
  double value = 0.0;
  bool tie = false;
};

inline constexpr int kBruteForceMaxN = 16;

/// Exhaustive maximization of <W, y^m> over balanced y with y_0 = +1.
inline BruteForceResult brute_force(const SymmetricTensor& w) {
  const int n = w.dim();
  if (n % 2 != 0) throw DataError("brute_force: n must be even");
  if (n > kBruteForceMaxN) {
    throw DataError("brute_force: n=" + std::to_string(n) + " exceeds the limit of " +
                    std::to_string(kBruteForceMaxN));
  }
  if (w.order() % 2 != 0) throw DataError("brute_force: m must be even");
  BruteForceResult best;
  bool have = false;
  Vector y(n);
  for (std::uint32_t mask = 1; mask < (1u << n); mask += 2) {
    if (std::popcount(mask) != n / 2) continue;
    for (int i = 0; i < n; ++i) y[i] = ((mask >> i) & 1u) ? 1.0 : -1.0;
    const double v = form(w, y);
    const double tol = 1e-12 * std::max(1.0, std::abs(have ? best.value : v));
    if (!have || v > best.value + tol) {
      if (have) best.tie = std::abs(v - best.value) <= tol;
      best.value = v;
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(y[i]);
      best.y_opt = Assignment(std::move(labels));
      have = true;
    } else if (std::abs(v - best.value) <= tol) {
      best.tie = true;
    }
  }
  return best;
}

/// Subtracts the dense mean times the all-one tensor, then pins the pure
/// diagonal (or every sigma2 entry) to 1.
inline void project_balance_inplace(SymmetricTensor& y, bool full_sigma2 = false,
                                    const std::vector<std::size_t>* sigma2 = nullptr) {
  const double mean = dense_mean(y);
  for (double& v : y.values()) v -= mean;
  if (full_sigma2) {
    std::vector<std::size_t> local;
    if (!sigma2) {
      local = sigma2_positions(y.layout());
      sigma2 = &local;
    }
    for (std::size_t pos : *sigma2) y.values()[pos] = 1.0;
  } else {
    for (int i = 0; i < y.dim(); ++i) y.set_diagonal(i, 1.0);
  }
}

inline SymmetricTensor project_balance(SymmetricTensor y, bool full_sigma2 = false) {
  project_balance_inplace(y, full_sigma2);
  return y;
}

/// If c_v = <Y, v^m> < 0, removes the offending rank-one component:
/// Y - c_v v^m. Returns whether a correction was applied.
inline bool project_psd_step_inplace(SymmetricTensor& y, const Vector& v) {
  if (v.size() != y.dim()) throw DataError("project_psd_step: vector length mismatch");
  if (!(v.squaredNorm() > 0.0)) return false;
  const double c = form(y, v);
  if (!(c < 0.0)) return false;
  const int m = y.order();
  const Layout& lay = y.layout();
  const int* idx = lay.raw_indices();
  auto vals = y.values();
  for (std::size_t pos = 0; pos < vals.size(); ++pos, idx += m) {
    double p = c;
    for (int k = 0; k < m; ++k) p *= v[idx[k]];
    vals[pos] -= p;
  }
  return true;
}

inline SymmetricTensor project_psd_step(SymmetricTensor y, const EigenEstimate& estimate) {
  project_psd_step_inplace(y, estimate.vector);
  return y;
}

/// h(Y) = <Y, y*^m> / <y*^m, y*^m>.
inline double agreement(const SymmetricTensor& y, const Assignment& truth) {
  if (truth.size() != y.dim()) throw DataError("agreement: label count does not match tensor dimension");
  return form(y, truth.as_vector()) / std::pow(static_cast<double>(y.dim()), y.order());
}

/// Projected gradient iteration Y <- P(Y + zeta W) starting from the identity
/// tensor. P alternates negative-eigenvector corrections with the balance /
/// diagonal projection.
inline SolveResult pgd_solve(const SymmetricTensor& w, const SolverConfig& cfg) {
  cfg.validate();
  const int n = w.dim();
  const int m = w.order();
  if (m % 2 != 0) throw DataError("pgd_solve requires an even order m");
  if (n % 2 != 0) throw DataError("pgd_solve requires an even number of entities");

  SolveResult result{identity_tensor(n, m), std::nullopt, std::nullopt, 0.0, 0, {}};
  SymmetricTensor& y = result.Y;
  const std::vector<std::size_t> sigma2 =
      cfg.enforce_full_sigma2 ? sigma2_positions(y.layout()) : std::vector<std::size_t>{};
  AscentConfig ascent = cfg.ascent;
  ascent.max_iters = cfg.descent_iters;
  std::uint64_t call = 0;
  result.trace.reserve(static_cast<std::size_t>(cfg.outer_iters));

  for (int outer = 0; outer < cfg.outer_iters; ++outer) {
    y.axpy(cfg.zeta, w);
    int corrections = 0;
    for (int it = 0; it < cfg.inner_iters; ++it) {
      ascent.seed = mix_seed(cfg.seed, call++);
      const EigenEstimate est = min_eig_f1(y, ascent);
      bool corrected = false;
      if (est.certified_negative) {
        corrected = project_psd_step_inplace(y, est.vector.normalized());
        corrections += corrected;
      }
      if (corrected || cfg.always_balance) {
        project_balance_inplace(y, cfg.enforce_full_sigma2, &sigma2);
      }
    }
    // Re-pinning the diagonal shifts the mean by a factor n^{1-m}; repeat until it vanishes.
    for (int rep = 0; rep < 50; ++rep) {
      project_balance_inplace(y, cfg.enforce_full_sigma2, &sigma2);
      if (std::abs(dense_mean(y)) <= 1e-12) break;
    }
    for (double v : y.values()) {
      if (!std::isfinite(v)) {
        throw NumericalError("pgd_solve diverged at outer iteration " + std::to_string(outer));
      }
    }
    const double obj = inner(w, y);
    result.trace.push_back({obj, corrections});
    result.psd_corrections += corrections;
  }
  result.objective = inner(w, y);
  return result;
}

/// Rounds Y to balanced labels: signs of the top variational witness,
/// balance repaired by flipping the smallest-magnitude majority labels
/// (lowest index first), global sign fixed so label 0 is +1.
inline Assignment extract_assignment(const SymmetricTensor& y, const AscentConfig& cfg = {}) {
  const int n = y.dim();
  if (n % 2 != 0) throw DataError("extract_assignment requires an even number of entities");
  const Vector u = lambda_tmax(y, cfg).vector;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = u[i] < 0.0 ? -1 : 1;
  int sum = std::accumulate(labels.begin(), labels.end(), 0);
  if (sum != 0) {
    const int majority = sum > 0 ? 1 : -1;
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == majority) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });
    for (int i : order) {
      if (sum == 0) break;
      labels[static_cast<std::size_t>(i)] = -majority;
      sum -= 2 * majority;
    }
  }
  return Assignment(std::move(labels)).normalized();
}

/// Diagonal dual tensor with V*_{i..i} = y_i (W y^{m-1})_i.
inline SymmetricTensor build_dual(const SymmetricTensor& w, const Assignment& y) {
  require_balanced(y, "build_dual");
  if (y.size() != w.dim()) throw DataError("build_dual: label count does not match tensor dimension");
  const Vector yv = y.as_vector();
  const Vector g = contract(w, yv);
  SymmetricTensor v(w.dim(), w.order());
  for (int i = 0; i < w.dim(); ++i) v.set_diagonal(i, yv[i] * g[i]);
  return v;
}

/// Estimates min <V* - W, u^m> over unit u orthogonal to 1 and y.
inline Certificate certify(const SymmetricTensor& w, const Assignment& y,
                           const CertifyConfig& cfg = {}) {
  Certificate cert{build_dual(w, y), 0.0, Vector(), true, Verdict::inconclusive};
  const SymmetricTensor gap = cert.v_star - w;
  const std::vector<Vector> forbidden{Vector::Ones(w.dim()), y.as_vector()};
  const EigenEstimate est = lambda1_constrained(gap, forbidden, cfg.ascent);
  cert.lambda1_estimate = est.value;
  cert.witness = est.vector;
  if (est.value < -cfg.threshold) {
    cert.verdict = Verdict::refutes;
  } else if (est.value > cfg.threshold) {
    cert.verdict = Verdict::supports_optimality;
  }
  return cert;
}

}  // namespace hpm
