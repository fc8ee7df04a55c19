#pragma once

// Generators for the four example model families and their exact
// expectation oracles. Every sampler takes an explicit RNG and draws in
// lexicographic order of canonical indices, so a seed fixes the output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hpm/combinatorics.hpp"
#include "hpm/error.hpp"
#include "hpm/model.hpp"
#include "hpm/tensor.hpp"

namespace hpm {

/// What to do with entries whose tuple repeats an entity.
enum class RepeatsMode { sample, zero };

inline bool is_distinct(std::span<const int> sorted) {
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k] == sorted[k - 1]) return false;
  }
  return true;
}

inline void require_probability(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw DataError(what + " must lie in [0, 1]");
}

// ---------------------------------------------------------------------------
// High-order counts

struct CountsParams {
  int m = 4;
  /// Compact (m/2+1) or full (m+1) success probabilities.
  std::vector<double> alpha;
  int T = 1;
  RepeatsMode repeats = RepeatsMode::sample;
};

/// Per canonical tuple with l positive labels: BIN(T, alpha_l).
inline SymmetricTensor sample_counts(const CountsParams& params, const Assignment& y,
                                     std::mt19937_64& rng) {
  require_balanced(y, "sample_counts");
  if (params.m < 2 || params.m % 2 != 0) throw DataError("sample_counts: m must be even");
  if (params.T < 1) throw DataError("sample_counts: T must be a positive integer");
  const auto w = ExpectationWeights::expand(params.alpha, params.m);
  for (double a : w.alpha) require_probability(a, "counts alpha");
  SymmetricTensor t(y.size(), params.m);
  const Layout& lay = t.layout();
  auto vals = t.values();
  for (std::size_t pos : lay.lex_order()) {
    const auto idx = lay.index(pos);
    if (params.repeats == RepeatsMode::zero && !is_distinct(idx)) continue;
    std::binomial_distribution<int> draw(params.T, w[positive_count(idx, y)]);
    vals[pos] = draw(rng);
  }
  return t;
}

inline double max_bernoulli_variance(const std::vector<double>& alpha) {
  double v = 0.0;
  for (double a : alpha) v = std::max(v, a * (1.0 - a));
  return v;
}

/// Model record: p from T*alpha, B = T, sigma^2 = n^m T max_l alpha_l(1 - alpha_l).
inline HpmSpec hpm_of_counts(const CountsParams& params, int n) {
  const auto w = ExpectationWeights::expand(params.alpha, params.m);
  ExpectationWeights scaled = w;
  for (double& a : scaled.alpha) a *= params.T;
  HpmSpec spec;
  spec.n = n;
  spec.m = params.m;
  spec.p = p_from_alpha(scaled);
  spec.entry_bound = params.T;
  spec.sigma2_bound = std::pow(static_cast<double>(n), params.m) * params.T *
                      max_bernoulli_variance(w.alpha);
  return spec;
}

// ---------------------------------------------------------------------------
// Minimum bisection (activation vectors)

struct BisectionParams {
  double q = 0.1;
  RepeatsMode repeats = RepeatsMode::sample;
};

/// Each b_j equals the entity's label with probability 1-q and is flipped
/// with probability q; the hyperedge is present iff all b_j agree.
inline SymmetricTensor sample_bisection(const BisectionParams& params, const Assignment& y,
                                        std::mt19937_64& rng, int m) {
  require_balanced(y, "sample_bisection");
  if (!(params.q > 0.0 && params.q < 1.0)) throw DataError("bisection q must lie in (0, 1)");
  if (m < 1) throw DataError("sample_bisection: m must be positive");
  SymmetricTensor t(y.size(), m);
  const Layout& lay = t.layout();
  auto vals = t.values();
  std::bernoulli_distribution flip(params.q);
  for (std::size_t pos : lay.lex_order()) {
    const auto idx = lay.index(pos);
    if (params.repeats == RepeatsMode::zero && !is_distinct(idx)) continue;
    int first = 0;
    bool all_equal = true;
    for (int k = 0; k < m; ++k) {
      const int b = flip(rng) ? -y[idx[k]] : y[idx[k]];
      if (k == 0) first = b;
      all_equal = all_equal && (b == first);
    }
    vals[pos] = all_equal ? 1.0 : 0.0;
  }
  return t;
}

/// Expectation weights by enumerating all 2^m flip patterns of a tuple with
/// l positive labels.
inline ExpectationWeights bisection_alpha(double q, int m) {
  if (m < 1 || m > 20) throw DataError("bisection_alpha: m must lie in [1, 20]");
  ExpectationWeights w{std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0)};
  for (int l = 0; l <= m; ++l) {
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      int first = 0;
      bool all_equal = true;
      int flips = 0;
      for (int k = 0; k < m; ++k) {
        const int label = k < l ? 1 : -1;
        const bool flipped = (mask >> k) & 1u;
        flips += flipped;
        const int b = flipped ? -label : label;
        if (k == 0) first = b;
        all_equal = all_equal && (b == first);
      }
      if (all_equal) total += std::pow(q, flips) * std::pow(1.0 - q, m - flips);
    }
    w.alpha[static_cast<std::size_t>(l)] = total;
  }
  return w;
}

inline HpmSpec hpm_of_bisection(const BisectionParams& params, int m, int n) {
  const auto w = bisection_alpha(params.q, m);
  HpmSpec spec;
  spec.n = n;
  spec.m = m;
  spec.p = p_from_alpha(w);
  spec.entry_bound = 1.0;
  spec.sigma2_bound = std::pow(static_cast<double>(n), m) * max_bernoulli_variance(w.alpha);
  return spec;
}

// ---------------------------------------------------------------------------
// Hypergraph cuts (order 4)

struct CutsParams {
  /// Hyperedge probabilities, compact (3) or full (5).
  std::vector<double> alpha;
};

/// Samples a 4-uniform hypergraph H (one Bernoulli per 4-subset of distinct
/// entities), then sets W_S = |{e in H : e meets S}| - [S in H] for every
/// 4-subset S. Entries with repeated entities are 0.
inline SymmetricTensor sample_cuts(const CutsParams& params, const Assignment& y,
                                   std::mt19937_64& rng, int m = 4) {
  if (m != 4) throw DataError("hypergraph cut model is defined for m = 4 only");
  require_balanced(y, "sample_cuts");
  const auto w = ExpectationWeights::expand(params.alpha, 4);
  for (double a : w.alpha) require_probability(a, "cuts alpha");
  const int n = y.size();
  SymmetricTensor t(n, 4);
  const Layout& lay = t.layout();

  std::vector<char> in_h(t.size(), 0);
  // co-degree tables: d1[v], d2[u*n+v], d3[(u*n+v)*n+x] over sorted subsets
  std::vector<std::int64_t> d1(n, 0), d2(static_cast<std::size_t>(n) * n, 0),
      d3(static_cast<std::size_t>(n) * n * n, 0);
  auto i2 = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
  auto i3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
  for (std::size_t pos : lay.lex_order()) {
    const auto s = lay.index(pos);
    if (!is_distinct(s)) continue;
    std::bernoulli_distribution draw(w[positive_count(s, y)]);
    if (!draw(rng)) continue;
    in_h[pos] = 1;
    for (int a = 0; a < 4; ++a) {
      ++d1[s[a]];
      for (int b = a + 1; b < 4; ++b) {
        ++d2[i2(s[a], s[b])];
        for (int c = b + 1; c < 4; ++c) ++d3[i3(s[a], s[b], s[c])];
      }
    }
  }
  auto vals = t.values();
  for (std::size_t pos : lay.lex_order()) {
    const auto s = lay.index(pos);
    if (!is_distinct(s)) continue;
    // inclusion-exclusion over the vertices of S
    std::int64_t touching = 0;
    for (int a = 0; a < 4; ++a) {
      touching += d1[s[a]];
      for (int b = a + 1; b < 4; ++b) {
        touching -= d2[i2(s[a], s[b])];
        for (int c = b + 1; c < 4; ++c) touching += d3[i3(s[a], s[b], s[c])];
      }
    }
    touching -= in_h[pos];  // quadruple term: S itself
    vals[pos] = static_cast<double>(touching - in_h[pos]);
  }
  return t;
}

/// E[W_S] for a 4-subset S of distinct entities with the given labels, when
/// n_pos and n_neg entities carry each label:
///   sum_j alpha_j [C(n+,j)C(n-,4-j) - C(n+-s+,j)C(n- - s-,4-j)] - alpha_{l_S}.
inline double expected_cut(const std::vector<double>& alpha, std::span<const int> tuple_labels,
                           int n_pos, int n_neg) {
  if (tuple_labels.size() != 4) throw DataError("expected_cut: tuple must have 4 labels");
  const auto w = ExpectationWeights::expand(alpha, 4);
  int s_pos = 0;
  for (int v : tuple_labels) {
    if (v != 1 && v != -1) throw DataError("expected_cut: labels must be +1 or -1");
    s_pos += (v == 1);
  }
  const int s_neg = 4 - s_pos;
  if (n_pos < s_pos || n_neg < s_neg) throw DataError("expected_cut: invalid label counts");
  double total = 0.0;
  for (int j = 0; j <= 4; ++j) {
    const double all = static_cast<double>(binomial(n_pos, j) * binomial(n_neg, 4 - j));
    const double avoiding =
        static_cast<double>(binomial(n_pos - s_pos, j) * binomial(n_neg - s_neg, 4 - j));
    total += w[j] * (all - avoiding);
  }
  return total - w[s_pos];
}

/// Expected cut sizes per number of positive labels, for balanced groups of n.
inline ExpectationWeights cuts_alpha(const CutsParams& params, int n) {
  ExpectationWeights out{std::vector<double>(5)};
  for (int l = 0; l <= 4; ++l) {
    std::array<int, 4> labels{};
    for (int k = 0; k < 4; ++k) labels[static_cast<std::size_t>(k)] = k < l ? 1 : -1;
    out.alpha[static_cast<std::size_t>(l)] = expected_cut(params.alpha, labels, n / 2, n / 2);
  }
  return out;
}

/// B = C(n, 4) bounds every cut size; sigma^2 = n^4 B^2 / 4.
inline HpmSpec hpm_of_cuts(const CutsParams& params, int n) {
  HpmSpec spec;
  spec.n = n;
  spec.m = 4;
  spec.p = p_from_alpha(cuts_alpha(params, n));
  spec.entry_bound = static_cast<double>(binomial(n, 4));
  spec.sigma2_bound = std::pow(static_cast<double>(n), 4) * spec.entry_bound * spec.entry_bound / 4.0;
  return spec;
}

// ---------------------------------------------------------------------------
// Motifs

/// Directed graph on `size` nodes without self-loops (row-major adjacency).
class Motif {
 public:
  Motif() = default;
  explicit Motif(int size) : size_(size), adj_(static_cast<std::size_t>(size) * size, 0) {
    if (size < 1) throw DataError("motif size must be positive");
  }

  static Motif from_edges(int size, const std::vector<std::pair<int, int>>& edges) {
    Motif g(size);
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
  }

  int size() const { return size_; }
  bool edge(int a, int b) const { return adj_[static_cast<std::size_t>(a) * size_ + b] != 0; }
  void add_edge(int a, int b) {
    if (a < 0 || b < 0 || a >= size_ || b >= size_) throw DataError("motif edge out of range");
    if (a == b) throw DataError("motif edges must not be self-loops");
    adj_[static_cast<std::size_t>(a) * size_ + b] = 1;
  }
  int edge_count() const { return static_cast<int>(std::count(adj_.begin(), adj_.end(), 1)); }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < size_; ++a) {
      for (int b = 0; b < size_; ++b) {
        if (edge(a, b)) out.emplace_back(a, b);
      }
    }
    return out;
  }

  friend bool operator==(const Motif&, const Motif&) = default;

 private:
  int size_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// Directed cycle 0 -> 1 -> ... -> size-1 -> 0.
inline Motif cycle_motif(int size = 4) {
  Motif g(size);
  for (int a = 0; a < size; ++a) g.add_edge(a, (a + 1) % size);
  return g;
}

/// Four-species food chain: two mutually linked predators (0, 1) that both
/// feed on two mutually linked prey (2, 3). Eight edges, four automorphisms.
inline Motif food_chain_motif() {
  return Motif::from_edges(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

/// True iff some relabelling of the motif equals the induced graph exactly.
inline bool motif_match(const Motif& induced, const Motif& motif) {
  if (induced.size() != motif.size()) throw DataError("motif_match: size mismatch");
  if (induced.edge_count() != motif.edge_count()) return false;
  const int m = motif.size();
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) {
      for (int b = 0; b < m && ok; ++b) {
        if (a != b && induced.edge(perm[a], perm[b]) != motif.edge(a, b)) ok = false;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

struct MotifParams {
  Motif motif;
  /// (alpha_11, alpha_22, alpha_12, alpha_21): edge probabilities for
  /// (+,+), (-,-), (+,-), (-,+) endpoint labels.
  std::array<double, 4> alpha4{};
};

inline double edge_probability(const std::array<double, 4>& alpha4, int from_label, int to_label) {
  if (from_label == 1 && to_label == 1) return alpha4[0];
  if (from_label == -1 && to_label == -1) return alpha4[1];
  if (from_label == 1) return alpha4[2];
  return alpha4[3];
}

/// P(the induced graph on a tuple with these labels matches the motif),
/// summing over the distinct relabelled images of the motif.
inline double motif_probability(const Motif& motif, std::span<const int> tuple_labels,
                                const std::array<double, 4>& alpha4) {
  const int m = motif.size();
  if (m > 5) throw DataError("motif_probability enumerates m! images; m must be <= 5");
  if (static_cast<int>(tuple_labels.size()) != m) throw DataError("motif_probability: label count mismatch");
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::uint32_t> images;
  do {
    std::uint32_t bits = 0;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (a != b && motif.edge(a, b)) bits |= 1u << (perm[a] * m + perm[b]);
      }
    }
    images.insert(bits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  double total = 0.0;
  for (std::uint32_t bits : images) {
    double pr = 1.0;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        const double pe = edge_probability(alpha4, tuple_labels[a], tuple_labels[b]);
        pr *= ((bits >> (a * m + b)) & 1u) ? pe : 1.0 - pe;
      }
    }
    total += pr;
  }
  return total;
}

/// Samples the directed graph once, then marks every m-subset of distinct
/// entities whose induced subgraph forms the motif. Repeated-entity entries are 0.
inline SymmetricTensor sample_motif(const MotifParams& params, const Assignment& y,
                                    std::mt19937_64& rng) {
  require_balanced(y, "sample_motif");
  for (double a : params.alpha4) require_probability(a, "motif alpha");
  const int n = y.size();
  const int m = params.motif.size();
  std::vector<char> adj(static_cast<std::size_t>(n) * n, 0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      std::bernoulli_distribution draw(edge_probability(params.alpha4, y[u], y[v]));
      adj[static_cast<std::size_t>(u) * n + v] = draw(rng) ? 1 : 0;
    }
  }
  SymmetricTensor t(n, m);
  const Layout& lay = t.layout();
  auto vals = t.values();
  for (std::size_t pos : lay.lex_order()) {
    const auto s = lay.index(pos);
    if (!is_distinct(s)) continue;
    Motif induced(m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (a != b && adj[static_cast<std::size_t>(s[a]) * n + s[b]]) induced.add_edge(a, b);
      }
    }
    vals[pos] = motif_match(induced, params.motif) ? 1.0 : 0.0;
  }
  return t;
}

inline ExpectationWeights motif_alpha(const MotifParams& params) {
  const int m = params.motif.size();
  ExpectationWeights out{std::vector<double>(static_cast<std::size_t>(m) + 1)};
  for (int l = 0; l <= m; ++l) {
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) labels[static_cast<std::size_t>(k)] = k < l ? 1 : -1;
    out.alpha[static_cast<std::size_t>(l)] = motif_probability(params.motif, labels, params.alpha4);
  }
  return out;
}

inline HpmSpec hpm_of_motif(const MotifParams& params, int n) {
  const auto w = motif_alpha(params);
  HpmSpec spec;
  spec.n = n;
  spec.m = params.motif.size();
  spec.p = p_from_alpha(w);
  spec.entry_bound = 1.0;
  spec.sigma2_bound = std::pow(static_cast<double>(n), spec.m) * max_bernoulli_variance(w.alpha);
  return spec;
}

}  // namespace hpm
