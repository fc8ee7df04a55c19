#pragma once

// Symmetric tensors in canonical compressed storage.
//
// An order-m, dimension-n symmetric tensor is stored as one value per sorted
// multi-index (i_1 <= ... <= i_m). Positions follow the colexicographic rank of
// the associated strictly increasing combination (i_j + j), so lookups are a
// table-driven sum. Dense n^m arrays only appear through to_dense/from_dense.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpm/combinatorics.hpp"
#include "hpm/error.hpp"

namespace hpm {

using Vector = Eigen::VectorXd;

/// Largest dimension supported by tensor storage and the samplers.
inline constexpr int kMaxDimension = 64;
/// Upper limit on stored canonical entries for a single tensor.
inline constexpr std::uint64_t kMaxStoredEntries = 20'000'000;

/// Sorted tuple of m entity indices.
class MultiIndex {
 public:
  MultiIndex() = default;

  /// Canonicalizes (sorts) an arbitrary index tuple.
  explicit MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
  }
  MultiIndex(std::initializer_list<int> indices) : MultiIndex(std::vector<int>(indices)) {}

  int order() const { return static_cast<int>(indices_.size()); }
  std::span<const int> indices() const { return indices_; }
  int operator[](std::size_t k) const { return indices_[k]; }

  int multiplicity(int i) const {
    return static_cast<int>(std::count(indices_.begin(), indices_.end(), i));
  }

  /// (index, multiplicity) pairs in increasing index order.
  std::vector<std::pair<int, int>> profile() const {
    std::vector<std::pair<int, int>> out;
    for (int i : indices_) {
      if (!out.empty() && out.back().first == i) {
        ++out.back().second;
      } else {
        out.emplace_back(i, 1);
      }
    }
    return out;
  }

  /// Number of dense tuples that collapse onto this canonical index: m! / prod mu_j!.
  double weight() const {
    double w = factorial(order());
    for (const auto& [i, mu] : profile()) w /= factorial(mu);
    return w;
  }

  bool is_pure_diagonal() const {
    return !indices_.empty() && indices_.front() == indices_.back();
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(indices_[k]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> indices_;
};

/// True iff every distinct index occurs an even number of times.
inline bool is_sigma2(const MultiIndex& idx) {
  if (idx.order() % 2 != 0) throw DataError("sigma2 index set requires even order");
  for (const auto& [i, mu] : idx.profile()) {
    if (mu % 2 != 0) return false;
  }
  return true;
}

/// Shared, immutable index tables for one (n, m) pair.
class Layout {
 public:
  static std::shared_ptr<const Layout> get(int n, int m) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const Layout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, m}];
    if (!slot) slot = std::shared_ptr<const Layout>(new Layout(n, m));
    return slot;
  }

  int dim() const { return n_; }
  int order() const { return m_; }
  std::size_t size() const { return size_; }

  /// Sorted indices of the entry stored at `pos` (m ints).
  std::span<const int> index(std::size_t pos) const {
    return {indices_.data() + pos * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }
  const int* raw_indices() const { return indices_.data(); }

  MultiIndex multi_index(std::size_t pos) const {
    auto s = index(pos);
    return MultiIndex(std::vector<int>(s.begin(), s.end()));
  }

  double weight(std::size_t pos) const { return weights_[pos]; }
  std::span<const double> weights() const { return weights_; }

  /// Position of a sorted, in-range index tuple.
  std::size_t position(std::span<const int> sorted) const {
    std::size_t pos = 0;
    for (int j = 0; j < m_; ++j) pos += rank_table_[j * n_ + sorted[j]];
    return pos;
  }
  std::size_t position(const MultiIndex& idx) const {
    check_index(idx);
    return position(idx.indices());
  }

  std::size_t diagonal_position(int i) const { return diagonal_[i]; }

  /// Storage positions listed in lexicographic order of their multi-indices.
  std::span<const std::size_t> lex_order() const { return lex_order_; }

  void check_index(const MultiIndex& idx) const {
    if (idx.order() != m_) {
      throw DataError("multi-index " + idx.to_string() + " has order " +
                      std::to_string(idx.order()) + ", expected " + std::to_string(m_));
    }
    for (int i : idx.indices()) {
      if (i < 0 || i >= n_) {
        throw DataError("multi-index " + idx.to_string() + " out of range for n=" +
                        std::to_string(n_));
      }
    }
  }

 private:
  Layout(int n, int m) : n_(n), m_(m) {
    if (n < 1 || n > kMaxDimension) {
      throw DataError("tensor dimension must lie in [1, " + std::to_string(kMaxDimension) +
                      "], got " + std::to_string(n));
    }
    if (m < 1) throw DataError("tensor order must be positive");
    const auto d = sym_dim(n, m);
    if (d > kMaxStoredEntries) {
      throw DataError("tensor with n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                      " has " + std::to_string(d) + " canonical entries; limit is " +
                      std::to_string(kMaxStoredEntries));
    }
    size_ = static_cast<std::size_t>(d);

    // rank_table_[j][v] = C(v + j, j + 1): colex contribution of sorted entry v at slot j.
    rank_table_.resize(static_cast<std::size_t>(m) * n);
    for (int j = 0; j < m; ++j) {
      for (int v = 0; v < n; ++v) rank_table_[j * n + v] = binomial(v + j, j + 1);
    }

    indices_.resize(size_ * m);
    weights_.resize(size_);
    lex_order_.reserve(size_);
    std::vector<int> cur(m, 0);
    const double mfact = factorial(m);
    while (true) {
      const std::size_t pos = position(cur);
      std::copy(cur.begin(), cur.end(), indices_.begin() + static_cast<std::ptrdiff_t>(pos * m));
      double w = mfact;
      for (int k = 0; k < m;) {
        int run = 1;
        while (k + run < m && cur[k + run] == cur[k]) ++run;
        w /= factorial(run);
        k += run;
      }
      weights_[pos] = w;
      lex_order_.push_back(pos);
      // next non-decreasing tuple in lexicographic order
      int k = m - 1;
      while (k >= 0 && cur[k] == n - 1) --k;
      if (k < 0) break;
      const int v = cur[k] + 1;
      for (int t = k; t < m; ++t) cur[t] = v;
    }
    diagonal_.resize(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> diag(m, i);
      diagonal_[i] = position(diag);
    }
  }

  int n_;
  int m_;
  std::size_t size_ = 0;
  std::vector<std::size_t> rank_table_;
  std::vector<int> indices_;
  std::vector<double> weights_;
  std::vector<std::size_t> lex_order_;
  std::vector<std::size_t> diagonal_;
};

/// Order-m, dimension-n symmetric tensor with one stored value per canonical index.
class SymmetricTensor {
 public:
  SymmetricTensor(int n, int m) : layout_(Layout::get(n, m)), values_(layout_->size(), 0.0) {}

  int dim() const { return layout_->dim(); }
  int order() const { return layout_->order(); }
  std::size_t size() const { return values_.size(); }
  const Layout& layout() const { return *layout_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double at(const MultiIndex& idx) const { return values_[layout_->position(idx)]; }
  double operator[](const MultiIndex& idx) const { return at(idx); }
  void set(const MultiIndex& idx, double v) { values_[layout_->position(idx)] = v; }

  double diagonal(int i) const { return values_[layout_->diagonal_position(i)]; }
  void set_diagonal(int i, double v) { values_[layout_->diagonal_position(i)] = v; }

  /// Number of stored entries that are exactly nonzero.
  std::size_t nonzeros() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
  }

  bool same_shape(const SymmetricTensor& other) const {
    return dim() == other.dim() && order() == other.order();
  }

  SymmetricTensor& operator+=(const SymmetricTensor& other) {
    require_same_shape(other, "operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
  }
  SymmetricTensor& operator-=(const SymmetricTensor& other) {
    require_same_shape(other, "operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
  }
  SymmetricTensor& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  /// this += s * other
  void axpy(double s, const SymmetricTensor& other) {
    require_same_shape(other, "axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  }

  void require_same_shape(const SymmetricTensor& other, const char* op) const {
    if (!same_shape(other)) {
      throw DataError(std::string(op) + ": shape mismatch (n=" + std::to_string(dim()) +
                      ", m=" + std::to_string(order()) + ") vs (n=" +
                      std::to_string(other.dim()) + ", m=" + std::to_string(other.order()) +
                      ")");
    }
  }

 private:
  std::shared_ptr<const Layout> layout_;
  std::vector<double> values_;
};

inline SymmetricTensor operator+(SymmetricTensor a, const SymmetricTensor& b) { return a += b; }
inline SymmetricTensor operator-(SymmetricTensor a, const SymmetricTensor& b) { return a -= b; }
inline SymmetricTensor operator*(double s, SymmetricTensor a) { return a *= s; }
inline SymmetricTensor operator-(SymmetricTensor a) { return a *= -1.0; }

/// A + s * B entrywise.
inline SymmetricTensor add_scaled(const SymmetricTensor& a, const SymmetricTensor& b, double s) {
  SymmetricTensor out = a;
  out.axpy(s, b);
  return out;
}

inline SymmetricTensor zero_tensor(int n, int m) { return SymmetricTensor(n, m); }

/// Tensor with every entry equal to `value` (value = 1 gives the all-one tensor).
inline SymmetricTensor constant_tensor(int n, int m, double value) {
  SymmetricTensor t(n, m);
  for (double& v : t.values()) v = value;
  return t;
}

inline SymmetricTensor identity_tensor(int n, int m) {
  SymmetricTensor t(n, m);
  for (int i = 0; i < n; ++i) t.set_diagonal(i, 1.0);
  return t;
}

/// u^{(x)m}
inline SymmetricTensor rank_one(const Vector& u, int m) {
  SymmetricTensor t(static_cast<int>(u.size()), m);
  const Layout& lay = t.layout();
  auto vals = t.values();
  const int* idx = lay.raw_indices();
  for (std::size_t pos = 0; pos < vals.size(); ++pos, idx += m) {
    double p = 1.0;
    for (int k = 0; k < m; ++k) p *= u[idx[k]];
    vals[pos] = p;
  }
  return t;
}

/// Sum over all n^m dense tuples of A*B.
inline double inner(const SymmetricTensor& a, const SymmetricTensor& b) {
  a.require_same_shape(b, "inner");
  const auto w = a.layout().weights();
  const auto av = a.values();
  const auto bv = b.values();
  double s = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) s += w[k] * av[k] * bv[k];
  return s;
}

inline double frobenius(const SymmetricTensor& a) { return std::sqrt(inner(a, a)); }

inline double trace(const SymmetricTensor& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a.diagonal(i);
  return s;
}

/// Sum of all n^m dense entries, i.e. <A, 1^{(x)m}>.
inline double dense_sum(const SymmetricTensor& a) {
  const auto w = a.layout().weights();
  const auto av = a.values();
  double s = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) s += w[k] * av[k];
  return s;
}

inline double dense_mean(const SymmetricTensor& a) {
  return dense_sum(a) / std::pow(static_cast<double>(a.dim()), a.order());
}

namespace detail {

// out_i += sum_c A_c * (w_c / m) * prod_{k != position} x_{c_k}, accumulated per position.
template <int M>
inline void contract_fixed(const int* idx, const double* w, const double* a, std::size_t size,
                           const double* x, double* out) {
  constexpr double inv_m = 1.0 / M;
  for (std::size_t pos = 0; pos < size; ++pos, idx += M) {
    const double coef = a[pos] * w[pos] * inv_m;
    if (coef == 0.0) continue;
    std::array<double, M + 1> pre;
    pre[0] = 1.0;
    for (int k = 0; k < M; ++k) pre[k + 1] = pre[k] * x[idx[k]];
    double suf = coef;
    for (int k = M - 1; k >= 0; --k) {
      out[idx[k]] += pre[k] * suf;
      suf *= x[idx[k]];
    }
  }
}

inline void contract_generic(int m, const int* idx, const double* w, const double* a,
                             std::size_t size, const double* x, double* out) {
  std::vector<double> pre(m + 1);
  const double inv_m = 1.0 / m;
  for (std::size_t pos = 0; pos < size; ++pos, idx += m) {
    const double coef = a[pos] * w[pos] * inv_m;
    if (coef == 0.0) continue;
    pre[0] = 1.0;
    for (int k = 0; k < m; ++k) pre[k + 1] = pre[k] * x[idx[k]];
    double suf = coef;
    for (int k = m - 1; k >= 0; --k) {
      out[idx[k]] += pre[k] * suf;
      suf *= x[idx[k]];
    }
  }
}

}  // namespace detail

/// (A x^{(x)m-1})_i = sum_{i_2..i_m} A_{i,i_2,...,i_m} x_{i_2} ... x_{i_m}.
inline Vector contract(const SymmetricTensor& a, const Vector& x) {
  if (x.size() != a.dim()) {
    throw DataError("contract: vector length " + std::to_string(x.size()) +
                    " does not match tensor dimension " + std::to_string(a.dim()));
  }
  Vector out = Vector::Zero(a.dim());
  const Layout& lay = a.layout();
  const int* idx = lay.raw_indices();
  const double* w = lay.weights().data();
  const double* av = a.values().data();
  const std::size_t size = a.size();
  switch (a.order()) {
    case 2: detail::contract_fixed<2>(idx, w, av, size, x.data(), out.data()); break;
    case 4: detail::contract_fixed<4>(idx, w, av, size, x.data(), out.data()); break;
    case 6: detail::contract_fixed<6>(idx, w, av, size, x.data(), out.data()); break;
    default: detail::contract_generic(a.order(), idx, w, av, size, x.data(), out.data());
  }
  return out;
}

/// <A, x^{(x)m}>, the homogeneous form of A evaluated at x.
inline double form(const SymmetricTensor& a, const Vector& x) {
  if (x.size() != a.dim()) throw DataError("form: vector length does not match tensor");
  const Layout& lay = a.layout();
  const int m = a.order();
  const int* idx = lay.raw_indices();
  const auto w = lay.weights();
  const auto av = a.values();
  double s = 0.0;
  for (std::size_t pos = 0; pos < av.size(); ++pos, idx += m) {
    double p = w[pos] * av[pos];
    for (int k = 0; k < m; ++k) p *= x[idx[k]];
    s += p;
  }
  return s;
}

/// Canonical indices whose every distinct index has even multiplicity.
inline std::vector<MultiIndex> sigma2_canonical_indices(int n, int m) {
  if (m % 2 != 0) throw DataError("sigma2 index set requires even order");
  auto lay = Layout::get(n, m);
  std::vector<MultiIndex> out;
  for (std::size_t pos : lay->lex_order()) {
    auto s = lay->index(pos);
    bool even = true;
    for (int k = 0; k < m;) {
      int run = 1;
      while (k + run < m && s[k + run] == s[k]) ++run;
      if (run % 2) even = false;
      k += run;
    }
    if (even) out.push_back(lay->multi_index(pos));
  }
  return out;
}

/// Storage positions of the sigma2 canonical indices.
inline std::vector<std::size_t> sigma2_positions(const Layout& lay) {
  std::vector<std::size_t> out;
  for (const auto& idx : sigma2_canonical_indices(lay.dim(), lay.order())) {
    out.push_back(lay.position(idx));
  }
  return out;
}

/// Full n^m array in row-major order (last index fastest).
struct DenseTensor {
  int n = 0;
  int m = 0;
  std::vector<double> data;

  std::size_t flat(std::span<const int> tuple) const {
    std::size_t f = 0;
    for (int i : tuple) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    return f;
  }
  double at(std::span<const int> tuple) const { return data[flat(tuple)]; }

  /// Decodes a flat offset back into an index tuple.
  std::vector<int> tuple(std::size_t flat_index) const {
    std::vector<int> t(m);
    for (int k = m - 1; k >= 0; --k) {
      t[k] = static_cast<int>(flat_index % static_cast<std::size_t>(n));
      flat_index /= static_cast<std::size_t>(n);
    }
    return t;
  }
};

inline constexpr std::size_t kMaxDenseEntries = 1u << 24;

inline std::size_t dense_size(int n, int m) {
  double s = std::pow(static_cast<double>(n), m);
  if (s > static_cast<double>(kMaxDenseEntries)) {
    throw DataError("dense materialization of n=" + std::to_string(n) + ", m=" +
                    std::to_string(m) + " is too large");
  }
  return static_cast<std::size_t>(s);
}

inline DenseTensor to_dense(const SymmetricTensor& a) {
  DenseTensor d{a.dim(), a.order(), std::vector<double>(dense_size(a.dim(), a.order()))};
  const Layout& lay = a.layout();
  std::vector<int> t;
  for (std::size_t f = 0; f < d.data.size(); ++f) {
    t = d.tuple(f);
    std::sort(t.begin(), t.end());
    d.data[f] = a.values()[lay.position(t)];
  }
  return d;
}

/// Rejects inputs whose permuted entries differ by more than `tol`.
inline SymmetricTensor from_dense(const DenseTensor& d, double tol = 1e-9) {
  if (d.data.size() != dense_size(d.n, d.m)) {
    throw DataError("dense tensor has " + std::to_string(d.data.size()) + " entries, expected " +
                    std::to_string(dense_size(d.n, d.m)));
  }
  SymmetricTensor a(d.n, d.m);
  const Layout& lay = a.layout();
  std::vector<bool> seen(a.size(), false);
  auto vals = a.values();
  std::vector<int> t;
  for (std::size_t f = 0; f < d.data.size(); ++f) {
    t = d.tuple(f);
    std::sort(t.begin(), t.end());
    const std::size_t pos = lay.position(t);
    if (!seen[pos]) {
      vals[pos] = d.data[f];
      seen[pos] = true;
    } else if (std::abs(vals[pos] - d.data[f]) > tol) {
      throw DataError("dense tensor is not symmetric at " + lay.multi_index(pos).to_string() +
                      ": " + std::to_string(vals[pos]) + " vs " + std::to_string(d.data[f]));
    }
  }
  // keep the value stored at the sorted tuple itself
  for (std::size_t pos = 0; pos < a.size(); ++pos) vals[pos] = d.at(lay.index(pos));
  return a;
}

}  // namespace hpm
