#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "hpm/error.hpp"

namespace hpm {

/// Exact binomial coefficient. Throws NumericalError instead of wrapping.
inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step
    const auto factor = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw NumericalError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                           ") overflows 64-bit arithmetic");
    }
    result = result * factor / static_cast<std::uint64_t>(i);
  }
  return result;
}

inline std::int64_t signed_binomial(std::int64_t n, std::int64_t k) {
  const auto b = binomial(n, k);
  if (b > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw NumericalError("binomial does not fit a signed 64-bit integer");
  }
  return static_cast<std::int64_t>(b);
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Dimension of the space of order-m, dimension-n symmetric tensors: C(m+n-1, m).
inline std::uint64_t sym_dim(int n, int m) {
  if (n < 1 || m < 1) throw DataError("sym_dim requires n >= 1 and m >= 1");
  return binomial(static_cast<std::int64_t>(m) + n - 1, m);
}

/// Number of rank-one terms in the Caratheodory cone: sym_dim + 1.
inline std::uint64_t caratheodory_count(int n, int m) {
  const auto d = sym_dim(n, m);
  if (d == std::numeric_limits<std::uint64_t>::max()) {
    throw NumericalError("caratheodory_count overflows");
  }
  return d + 1;
}

}  // namespace hpm
