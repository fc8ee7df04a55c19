#pragma once

// Variational tensor-eigenvalue estimators.
//
// All routines return the witness vector they evaluated, so every reported
// value can be re-checked with hpm::form. None of them is exact: maximizers
// return lower bounds on the supremum, minimizers upper bounds on the infimum.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hpm/error.hpp"
#include "hpm/tensor.hpp"

namespace hpm {

struct AscentConfig {
  /// Gradient step of the negative-eigenvalue descent.
  double step_gamma = 0.05;
  int max_iters = 500;
  int num_starts = 8;
  std::uint64_t seed = 0;
  /// An increase of f1 beyond this counts as "f1 started to grow".
  double stall_tol = 1e-12;

  void validate() const {
    if (!(step_gamma > 0.0) || !std::isfinite(step_gamma)) {
      throw DataError("step_gamma must be a positive finite number");
    }
    if (max_iters < 1) throw DataError("max_iters must be >= 1");
    if (num_starts < 1) throw DataError("num_starts must be >= 1");
    if (!(stall_tol >= 0.0)) throw DataError("stall_tol must be nonnegative");
  }
};

struct EigenEstimate {
  /// <A, x^{(x)m}> at the returned unit vector (0 for the zero vector).
  double value = 0.0;
  Vector vector;
  bool certified_negative = false;
};

/// Uniform point on the unit sphere in R^d (normalized Gaussian).
inline Vector random_unit_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-300);
  return v / norm;
}

enum class DescentStop { certified, stalled, exhausted };

/// Outcome of one negative-eigenvalue descent run from a fixed start.
struct DescentRun {
  Vector x;
  double form = 0.0;
  double f1 = 0.0;
  DescentStop stop = DescentStop::exhausted;
  /// f1 at every evaluated iterate, in order.
  std::vector<double> f1_history;
};

/// One run of the unconstrained descent on
///   f1(x) = <I, x^m>^2 / (2m) + <A, x^m> / m,
///   grad f1(x) = <I, x^m> I x^{m-1} + A x^{m-1},
/// stopping when f1 < 0 or <A, x^m> < 0, when f1 grows, or after max_iters steps.
inline DescentRun f1_descent(const SymmetricTensor& a, Vector x, const AscentConfig& cfg) {
  const int m = a.order();
  if (m % 2 != 0) throw DataError("negative-eigenvalue search requires even order");
  DescentRun run;
  run.f1_history.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
  double f1_prev = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const Vector& at, Vector& grad_a, double& ix, double& ax) {
    grad_a = contract(a, at);
    ax = at.dot(grad_a);
    ix = at.array().pow(m).sum();
    return ix * ix / (2.0 * m) + ax / m;
  };
  Vector g;
  double ix = 0.0;
  double ax = 0.0;
  for (int it = 0; it <= cfg.max_iters; ++it) {
    const double f1 = evaluate(x, g, ix, ax);
    if (std::isnan(f1) || !x.allFinite()) {
      throw NumericalError("negative-eigenvalue descent produced NaN at iteration " +
                           std::to_string(it));
    }
    run.f1_history.push_back(f1);
    run.f1 = f1;
    run.form = ax;
    if (f1 < 0.0 || ax < 0.0) {
      run.stop = DescentStop::certified;
      break;
    }
    if (f1 > f1_prev + cfg.stall_tol) {
      run.stop = DescentStop::stalled;
      break;
    }
    if (it == cfg.max_iters) break;
    f1_prev = f1;
    const Vector grad = ix * x.array().pow(m - 1).matrix() + g;
    x -= cfg.step_gamma * grad;
  }
  run.x = std::move(x);
  return run;
}

/// Negative tensor eigenvector search by multistart f1 descent. Returns the
/// most negative normalized witness, or the zero vector when no start found
/// <A, x^m> < 0.
inline EigenEstimate min_eig_f1(const SymmetricTensor& a, const AscentConfig& cfg) {
  cfg.validate();
  if (a.order() % 2 != 0) throw DataError("min_eig_f1 requires even order");
  EigenEstimate best;
  best.vector = Vector::Zero(a.dim());
  for (int s = 0; s < cfg.num_starts; ++s) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
    DescentRun run = f1_descent(a, random_unit_vector(a.dim(), rng), cfg);
    if (!(run.form < 0.0)) continue;
    const double norm = run.x.norm();
    if (!(norm > 0.0)) continue;
    const Vector unit = run.x / norm;
    const double value = form(a, unit);
    if (value < 0.0 && (!best.certified_negative || value < best.value)) {
      best.value = value;
      best.vector = unit;
      best.certified_negative = true;
    }
  }
  return best;
}

/// Orthonormal basis (as columns) of the orthogonal complement of span(forbidden).
/// Gram-Schmidt over the standard basis, lowest index first.
inline Eigen::MatrixXd complement_basis(int n, std::span<const Vector> forbidden) {
  std::vector<Vector> basis;
  auto orthogonalize = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
    return v;
  };
  for (const auto& f : forbidden) {
    if (f.size() != n) throw DataError("forbidden vector has wrong length");
    const double scale = f.norm();
    Vector v = orthogonalize(f);
    if (!(scale > 0.0) || v.norm() <= 1e-10 * scale) {
      throw DataError("forbidden vectors must be linearly independent and nonzero");
    }
    basis.push_back(v / v.norm());
  }
  const std::size_t k = basis.size();
  if (static_cast<int>(k) >= n) throw DataError("forbidden vectors span the whole space");
  for (int i = 0; i < n && static_cast<int>(basis.size()) < n; ++i) {
    Vector v = orthogonalize(Vector::Unit(n, i));
    const double norm = v.norm();
    if (norm > 1e-8) basis.push_back(v / norm);
  }
  Eigen::MatrixXd q(n, n - static_cast<int>(k));
  for (int c = 0; c < q.cols(); ++c) q.col(c) = basis[k + static_cast<std::size_t>(c)];
  return q;
}

namespace detail {

// Multistart projected-gradient ascent of sign * <A, (Q w)^m> over unit w.
// An empty `basis` means Q = I. Steps adapt: doubled on success, halved
// until the Armijo condition holds.
inline EigenEstimate sphere_extremum(const SymmetricTensor& a, const Eigen::MatrixXd* basis,
                                     double sign, const AscentConfig& cfg) {
  cfg.validate();
  const int n = a.dim();
  const int m = a.order();
  const int d = basis ? static_cast<int>(basis->cols()) : n;
  auto lift = [&](const Vector& w) -> Vector { return basis ? Vector(*basis * w) : w; };
  const double scale = frobenius(a);
  EigenEstimate best;
  best.vector = Vector::Zero(n);
  bool have_best = false;
  for (int s = 0; s < cfg.num_starts; ++s) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
    Vector w = random_unit_vector(d, rng);
    Vector u = lift(w);
    double val = sign * form(a, u);
    double eta = scale > 0.0 ? 1.0 / (m * scale) : 1.0;
    for (int it = 0; it < cfg.max_iters && scale > 0.0; ++it) {
      Vector g = contract(a, u);
      Vector grad = sign * m * (basis ? Vector(basis->transpose() * g) : g);
      grad -= grad.dot(w) * w;
      const double gnorm = grad.norm();
      if (!std::isfinite(gnorm)) {
        throw NumericalError("sphere ascent produced a non-finite gradient at iteration " +
                             std::to_string(it));
      }
      if (gnorm <= 1e-13 * m * scale) break;
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving) {
        Vector cand = w + eta * grad;
        cand.normalize();
        const Vector cu = lift(cand);
        const double cval = sign * form(a, cu);
        if (cval >= val + 0.1 * eta * gnorm * gnorm) {
          accepted = true;
          w = cand;
          u = cu;
          val = cval;
          eta *= 2.0;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
    }
    if (!std::isfinite(val)) throw NumericalError("sphere ascent produced a non-finite value");
    if (!have_best || val > sign * best.value) {
      best.value = sign * val;
      best.vector = u;
      have_best = true;
    }
  }
  best.certified_negative = best.value < 0.0;
  return best;
}

}  // namespace detail

/// Estimate of sup_{|u|=1} <A, u^m>. A lower bound: the value is attained at
/// the returned unit vector.
inline EigenEstimate lambda_tmax(const SymmetricTensor& a, const AscentConfig& cfg = {}) {
  return detail::sphere_extremum(a, nullptr, 1.0, cfg);
}

/// Estimate of inf_{|u|=1} <A, u^m>. An upper bound on the true minimum.
inline EigenEstimate lambda_tmin(const SymmetricTensor& a, const AscentConfig& cfg = {}) {
  return detail::sphere_extremum(a, nullptr, -1.0, cfg);
}

/// Estimate of inf <A, u^m> over unit u orthogonal to every forbidden vector.
/// An upper bound on the infimum, so a positive result is evidence, not proof.
inline EigenEstimate lambda1_constrained(const SymmetricTensor& a,
                                         std::span<const Vector> forbidden,
                                         const AscentConfig& cfg = {}) {
  const Eigen::MatrixXd q = complement_basis(a.dim(), forbidden);
  return detail::sphere_extremum(a, &q, -1.0, cfg);
}

}  // namespace hpm
