#pragma once

// Homogeneous polynomial model calculus: labels, model records, the
// combinatorial coefficient functions and the alpha <-> p transform.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hpm/combinatorics.hpp"
#include "hpm/error.hpp"
#include "hpm/tensor.hpp"

namespace hpm {

/// Group labels in {+1, -1}.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<int> labels) : labels_(std::move(labels)) {
    for (int v : labels_) {
      if (v != 1 && v != -1) throw DataError("labels must be +1 or -1");
    }
  }

  int size() const { return static_cast<int>(labels_.size()); }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& labels() const { return labels_; }

  int positives() const {
    return static_cast<int>(std::count(labels_.begin(), labels_.end(), 1));
  }
  int sum() const { return std::accumulate(labels_.begin(), labels_.end(), 0); }
  bool is_balanced() const { return !labels_.empty() && sum() == 0; }

  Vector as_vector() const {
    Vector v(size());
    for (int i = 0; i < size(); ++i) v[i] = labels_[static_cast<std::size_t>(i)];
    return v;
  }

  Assignment flipped() const {
    std::vector<int> out(labels_);
    for (int& v : out) v = -v;
    return Assignment(std::move(out));
  }

  /// Global sign chosen so that label 0 is +1.
  Assignment normalized() const {
    return (!labels_.empty() && labels_.front() == -1) ? flipped() : *this;
  }

  bool equal_up_to_sign(const Assignment& other) const {
    return normalized().labels_ == other.normalized().labels_;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> labels_;
};

inline void require_balanced(const Assignment& y, const std::string& where) {
  if (y.size() % 2 != 0) throw DataError(where + ": number of entities must be even");
  if (!y.is_balanced()) throw DataError(where + ": labels must be balanced (sum to zero)");
}

/// Uniformly random balanced assignment of n (even) entities.
inline Assignment random_balanced_assignment(int n, std::mt19937_64& rng) {
  if (n < 2 || n % 2 != 0) throw DataError("balanced assignment needs an even n >= 2");
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::fill(labels.begin(), labels.begin() + n / 2, 1);
  // Fisher-Yates with explicit draws so the permutation is fixed by the seed.
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(pick(rng))]);
  }
  return Assignment(std::move(labels));
}

/// Parameters of an m-HPM(n, p, sigma^2, B) instance.
struct HpmSpec {
  int n = 0;
  int m = 0;
  std::vector<double> p;
  double sigma2_bound = 0.0;
  double entry_bound = 0.0;

  void validate() const {
    if (n < 1) throw DataError("HpmSpec: n must be positive");
    if (m < 2 || m % 2 != 0) throw DataError("HpmSpec: m must be a positive even integer");
    if (p.size() != static_cast<std::size_t>(m) + 1) {
      throw DataError("HpmSpec: p must have m+1 entries");
    }
    if (!(sigma2_bound >= 0.0)) throw DataError("HpmSpec: sigma2_bound must be nonnegative");
    if (!(entry_bound >= 0.0)) throw DataError("HpmSpec: entry_bound must be nonnegative");
  }
};

/// Expected entry value indexed by the number l of +1 labels in the entry's tuple.
struct ExpectationWeights {
  std::vector<double> alpha;

  int order() const { return static_cast<int>(alpha.size()) - 1; }
  double operator[](int l) const { return alpha[static_cast<std::size_t>(l)]; }

  /// Accepts either the full form (m+1 values) or the compact form (m/2+1
  /// values, alpha_l = alpha_{m-l}).
  static ExpectationWeights expand(const std::vector<double>& given, int m) {
    if (m < 1) throw DataError("expectation weights need m >= 1");
    const auto full = static_cast<std::size_t>(m) + 1;
    if (given.size() == full) return {given};
    if (m % 2 == 0 && given.size() == static_cast<std::size_t>(m / 2) + 1) {
      std::vector<double> a(full);
      for (int l = 0; l <= m; ++l) a[static_cast<std::size_t>(l)] = given[static_cast<std::size_t>(std::min(l, m - l))];
      return {a};
    }
    throw DataError("alpha must have m+1 (full) or m/2+1 (compact) entries; got " +
                    std::to_string(given.size()) + " for m=" + std::to_string(m));
  }
};

/// f(m, l, k) = sum_{s=max(0,k-l)}^{min(k,m-l)} (-1)^s C(l, k-s) C(m-l, s).
inline std::int64_t f_comb(int m, int l, int k) {
  if (m < 0 || l < 0 || l > m || k < 0 || k > m) {
    throw DataError("f_comb requires 0 <= l, k <= m");
  }
  std::int64_t total = 0;
  for (int s = std::max(0, k - l); s <= std::min(k, m - l); ++s) {
    const std::int64_t term = signed_binomial(l, k - s) * signed_binomial(m - l, s);
    total += (s % 2 == 0) ? term : -term;
  }
  return total;
}

/// sum_k p_k f(m, l, k)
inline double signed_weight(int m, const std::vector<double>& p, int l) {
  double s = 0.0;
  for (int k = 0; k <= m; ++k) s += p[static_cast<std::size_t>(k)] * static_cast<double>(f_comb(m, l, k));
  return s;
}

/// The two sums whose minimum is F(m, p): first over l = 1..m (entities
/// labelled +1), second over l = 0..m-1 (entities labelled -1).
inline std::pair<double, double> big_f_sums(int m, const std::vector<double>& p) {
  if (p.size() != static_cast<std::size_t>(m) + 1) throw DataError("big_f: p must have m+1 entries");
  double positive = 0.0;
  double negative = 0.0;
  for (int l = 1; l <= m; ++l) positive += static_cast<double>(binomial(m - 1, l - 1)) * signed_weight(m, p, l);
  for (int l = 0; l <= m - 1; ++l) negative += static_cast<double>(binomial(m - 1, l)) * signed_weight(m, p, l);
  return {positive, negative};
}

inline double big_f(int m, const std::vector<double>& p) {
  const auto [a, b] = big_f_sums(m, p);
  return std::min(a, b);
}

/// F in terms of expectation weights: alternating-sign binomial row (m-1)
/// applied to (alpha_0..alpha_{m-1}) and (alpha_1..alpha_m).
inline double big_f_from_alpha(const ExpectationWeights& w) {
  const int m = w.order();
  double lower = 0.0;
  double upper = 0.0;
  for (int l = 0; l <= m - 1; ++l) {
    const double c = static_cast<double>(binomial(m - 1, l)) * (l % 2 == 0 ? 1.0 : -1.0);
    lower += c * w[l];
    upper -= c * w[l + 1];
  }
  return std::min(lower, upper);
}

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// (m+1)x(m+1) map from coefficient parameters p to expectation weights alpha:
/// L_ij = sum_{s=max(0,j-i)}^{min(j-1,m-i+1)} (-1)^{i+s-1} C(i-1, j-s-1) C(m-i+1, s), 1-based.
inline IntMatrix l_matrix(int m) {
  if (m < 1) throw DataError("l_matrix requires m >= 1");
  IntMatrix out(m + 1, m + 1);
  for (int i = 1; i <= m + 1; ++i) {
    for (int j = 1; j <= m + 1; ++j) {
      std::int64_t total = 0;
      for (int s = std::max(0, j - i); s <= std::min(j - 1, m - i + 1); ++s) {
        const std::int64_t term = signed_binomial(i - 1, j - s - 1) * signed_binomial(m - i + 1, s);
        total += ((i + s - 1) % 2 == 0) ? term : -term;
      }
      out(i - 1, j - 1) = total;
    }
  }
  return out;
}

inline std::vector<double> alpha_from_p(const std::vector<double>& p, int m) {
  if (p.size() != static_cast<std::size_t>(m) + 1) throw DataError("alpha_from_p: p must have m+1 entries");
  const Eigen::MatrixXd l = l_matrix(m).cast<double>();
  const Eigen::VectorXd a = l * Eigen::Map<const Eigen::VectorXd>(p.data(), m + 1);
  return {a.data(), a.data() + a.size()};
}

/// Solves L p = alpha by partial-pivot LU, rejecting singular systems and
/// residuals above 1e-10 (relative to max(1, |alpha|_inf)).
inline std::vector<double> p_from_alpha(const ExpectationWeights& w) {
  const int m = w.order();
  if (m < 1) throw DataError("p_from_alpha: alpha must have at least two entries");
  const Eigen::MatrixXd l = l_matrix(m).cast<double>();
  const Eigen::Map<const Eigen::VectorXd> alpha(w.alpha.data(), m + 1);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(l);
  if (!(std::abs(lu.determinant()) > 1e-12)) throw NumericalError("L matrix is singular");
  const Eigen::VectorXd p = lu.solve(alpha);
  const double residual = (l * p - alpha).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, alpha.lpNorm<Eigen::Infinity>());
  if (!(residual <= 1e-10 * scale)) {
    throw NumericalError("p_from_alpha: residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return {p.data(), p.data() + p.size()};
}

/// Number of +1 labels among the tuple's entities, counted with multiplicity.
inline int positive_count(std::span<const int> tuple, const Assignment& y) {
  int l = 0;
  for (int i : tuple) l += (y[i] == 1);
  return l;
}

/// E[W] for labels y: the entry at a tuple with l positive labels is alpha_l.
inline SymmetricTensor expected_tensor(const Assignment& y, const ExpectationWeights& w) {
  const int m = w.order();
  SymmetricTensor t(y.size(), m);
  const Layout& lay = t.layout();
  auto vals = t.values();
  for (std::size_t pos = 0; pos < vals.size(); ++pos) vals[pos] = w[positive_count(lay.index(pos), y)];
  return t;
}

/// Closed-form E[V*_{i..i}] for entities labelled +1 and -1 respectively:
/// (n/2)^{m-1} times the two sums of big_f_sums.
inline std::pair<double, double> expected_dual_diagonal(const Assignment& y,
                                                        const ExpectationWeights& w) {
  require_balanced(y, "expected_dual_diagonal");
  const int m = w.order();
  const auto p = p_from_alpha(w);
  const auto [positive, negative] = big_f_sums(m, p);
  const double scale = std::pow(y.size() / 2.0, m - 1);
  return {scale * positive, scale * negative};
}

/// Sufficient-condition arithmetic for exact recovery with failure
/// probability at most (c0 + c1)/n.
struct Theorem1Report {
  double F = 0.0;
  bool F_positive = false;
  /// 2^{1-m} F - p_0
  double margin = 0.0;
  double lhs_B = 0.0;
  double rhs_B = 0.0;
  double lhs_sigma = 0.0;
  double rhs_sigma = 0.0;
  bool satisfied = false;
};

inline Theorem1Report theorem1_check(double F, double p0, int m, int n, double entry_bound,
                                     double sigma2_bound, double c0 = 1.0, double c1 = 1.0) {
  if (!(c0 > 0.0) || !(c1 > 0.0)) throw DataError("theorem1_check: c0 and c1 must be positive");
  if (n < 2) throw DataError("theorem1_check: n must be at least 2");
  Theorem1Report r;
  r.F = F;
  r.F_positive = F > 0.0;
  r.margin = std::ldexp(F, 1 - m) - p0;
  const double numerator = r.margin * r.margin;
  auto ratio = [numerator](double denom) {
    if (denom > 0.0) return numerator / denom;
    return numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  r.lhs_B = ratio(entry_bound * entry_bound);
  r.rhs_B = 16.0 * std::log(static_cast<double>(n)) / n - 8.0 * std::log(c0) / n;
  r.lhs_sigma = ratio(sigma2_bound);
  r.rhs_sigma = (4.0 / c1) * std::pow(static_cast<double>(n), 1 - m);
  r.satisfied = r.F_positive && r.lhs_B >= r.rhs_B && r.lhs_sigma >= r.rhs_sigma;
  return r;
}

inline Theorem1Report theorem1_check(const HpmSpec& spec, double c0 = 1.0, double c1 = 1.0) {
  spec.validate();
  return theorem1_check(big_f(spec.m, spec.p), spec.p.front(), spec.m, spec.n, spec.entry_bound,
                        spec.sigma2_bound, c0, c1);
}

}  // namespace hpm
