#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hpm/combinatorics.hpp"
#include "hpm/tensor.hpp"
#include "hpm/tensor_io.hpp"
#include "oracles.hpp"

using namespace hpm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(SymDim, SmallCases) {
  EXPECT_EQ(sym_dim(2, 4), 5u);
  EXPECT_EQ(sym_dim(20, 4), 8855u);
  EXPECT_EQ(sym_dim(1, 6), 1u);
}

TEST(SymDim, CaratheodoryCount) {
  EXPECT_EQ(caratheodory_count(2, 4), 6u);
  EXPECT_EQ(caratheodory_count(20, 4), 8856u);
  EXPECT_EQ(caratheodory_count(1, 2), 2u);
}

TEST(SymDim, RejectsBadArgumentsAndOverflow) {
  EXPECT_THROW(sym_dim(0, 4), DataError);
  EXPECT_THROW(sym_dim(3, 0), DataError);
  EXPECT_EQ(sym_dim(64, 8), binomial(71, 8));
  EXPECT_THROW(binomial(200, 100), NumericalError);
}

TEST(MultiIndexTest, SortsAndCountsMultiplicities) {
  MultiIndex idx({2, 0, 2, 1});
  const auto ix = idx.indices();
  EXPECT_EQ(std::vector<int>(ix.begin(), ix.end()), (std::vector<int>{0, 1, 2, 2}));
  EXPECT_EQ(idx.multiplicity(2), 2);
  EXPECT_DOUBLE_EQ(idx.weight(), 12.0);
  EXPECT_DOUBLE_EQ(MultiIndex({1, 1, 1, 1}).weight(), 1.0);
}

TEST(Multiplicity, WeightsSumToDenseCount) {
  for (int n = 1; n <= 5; ++n) {
    for (int m = 1; m <= 4; ++m) {
      const auto lay = Layout::get(n, m);
      double s = 0.0;
      for (double w : lay->weights()) s += w;
      EXPECT_DOUBLE_EQ(s, std::pow(n, m)) << "n=" << n << " m=" << m;
      EXPECT_EQ(lay->size(), sym_dim(n, m));
    }
  }
}

TEST(RankOne, UnitAxis) {
  const auto a = rank_one(vec({1, 0}), 4);
  EXPECT_EQ(a.at(MultiIndex({0, 0, 0, 0})), 1.0);
  EXPECT_EQ(a.nonzeros(), 1u);
}

TEST(RankOne, AllOnesMatrix) {
  const auto d = to_dense(rank_one(vec({1, 1}), 2));
  for (double v : d.data) EXPECT_EQ(v, 1.0);
}

TEST(RankOne, SignVectorIsOneOnSigma2) {
  const auto a = rank_one(vec({1, -1, 1, -1}), 4);
  for (const auto& idx : sigma2_canonical_indices(4, 4)) EXPECT_EQ(a.at(idx), 1.0) << idx.to_string();
}

TEST(RankOne, DenseOuterProduct) {
  std::mt19937_64 rng(5);
  const Vector u = oracle::random_gaussian(3, rng);
  const auto d = to_dense(rank_one(u, 3));
  oracle::for_each_tuple(3, 3, [&](const oracle::Tuple& t) {
    EXPECT_NEAR(d.at(t), u[t[0]] * u[t[1]] * u[t[2]], 1e-14);
  });
}

TEST(Inner, OrthogonalRankOnes) {
  EXPECT_EQ(inner(rank_one(vec({1, 0}), 4), rank_one(vec({0, 1}), 4)), 0.0);
}

TEST(Inner, OnesVector) {
  const auto a = rank_one(Vector::Ones(2), 4);
  EXPECT_DOUBLE_EQ(inner(a, a), 16.0);
}

TEST(Inner, ShapeMismatchThrows) {
  EXPECT_THROW(inner(SymmetricTensor(2, 4), SymmetricTensor(3, 4)), DataError);
  EXPECT_THROW(inner(SymmetricTensor(2, 4), SymmetricTensor(2, 2)), DataError);
}

TEST(Frobenius, Examples) {
  std::mt19937_64 rng(1);
  const Vector u = oracle::random_gaussian(4, rng).normalized();
  EXPECT_NEAR(frobenius(rank_one(u, 4)), 1.0, 1e-14);
  EXPECT_EQ(frobenius(zero_tensor(3, 4)), 0.0);
}

TEST(Trace, Examples) {
  EXPECT_EQ(trace(identity_tensor(5, 4)), 5.0);
  EXPECT_EQ(trace(rank_one(Vector::Ones(6), 4)), 6.0);
  EXPECT_EQ(trace(zero_tensor(3, 2)), 0.0);
}

TEST(Contract, IdentityPowers) {
  const Vector g = contract(identity_tensor(2, 4), vec({1, 2}));
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 8.0);
}

TEST(Contract, RankOneFactorizes) {
  std::mt19937_64 rng(2);
  for (int m : {2, 3, 4, 5, 6}) {
    const Vector u = oracle::random_gaussian(4, rng);
    const Vector x = oracle::random_gaussian(4, rng);
    const Vector g = contract(rank_one(u, m), x);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(g[i], u[i] * std::pow(u.dot(x), m - 1), 1e-10 * (1 + std::abs(g[i]))) << "m=" << m;
    }
  }
}

TEST(Contract, LengthMismatchThrows) {
  EXPECT_THROW(contract(identity_tensor(3, 4), Vector::Ones(2)), DataError);
}

TEST(Identity, Entries) {
  const auto i = identity_tensor(2, 4);
  EXPECT_EQ(i.at(MultiIndex({0, 0, 0, 0})), 1.0);
  EXPECT_EQ(i.at(MultiIndex({1, 1, 1, 1})), 1.0);
  EXPECT_EQ(i.nonzeros(), 2u);
  const Vector x = vec({0.5, -2.0});
  EXPECT_DOUBLE_EQ(inner(i, rank_one(x, 4)), 0.0625 + 16.0);
}

TEST(Sigma2, Membership) {
  EXPECT_TRUE(is_sigma2(MultiIndex({1, 2, 1, 2})));
  EXPECT_FALSE(is_sigma2(MultiIndex({1, 1, 1, 2})));
  EXPECT_THROW(is_sigma2(MultiIndex({0, 1, 1})), DataError);
}

TEST(Sigma2, DenseTupleCount) {
  int count = 0;
  oracle::for_each_tuple(2, 4, [&](const oracle::Tuple& t) { count += is_sigma2(MultiIndex(t)); });
  EXPECT_EQ(count, 8);
}

TEST(Sigma2, CanonicalIndices) {
  EXPECT_EQ(sigma2_canonical_indices(2, 4),
            (std::vector<MultiIndex>{MultiIndex({0, 0, 0, 0}), MultiIndex({0, 0, 1, 1}), MultiIndex({1, 1, 1, 1})}));
  EXPECT_EQ(sigma2_canonical_indices(1, 2), (std::vector<MultiIndex>{MultiIndex({0, 0})}));
  EXPECT_EQ(sigma2_canonical_indices(3, 2),
            (std::vector<MultiIndex>{MultiIndex({0, 0}), MultiIndex({1, 1}), MultiIndex({2, 2})}));
  EXPECT_THROW(sigma2_canonical_indices(3, 3), DataError);
}

TEST(Sigma2, SignVectorsAreOneEverywhereOnSigma2) {
  std::mt19937_64 rng(3);
  for (int m : {2, 4, 6}) {
    Vector y(5);
    for (int i = 0; i < 5; ++i) y[i] = (rng() & 1) ? 1.0 : -1.0;
    const auto a = rank_one(y, m);
    for (const auto& idx : sigma2_canonical_indices(5, m)) EXPECT_EQ(a.at(idx), 1.0);
  }
}

TEST(Plumbing, AddScaledSelfIsZero) {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_tensor(3, 4, rng).to_lib();
  const auto z = add_scaled(a, a, -1.0);
  EXPECT_EQ(z.nonzeros(), 0u);
}

TEST(Plumbing, DenseRoundTripIsExact) {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_tensor(4, 3, rng).to_lib();
  const auto b = from_dense(to_dense(a));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
}

TEST(Plumbing, DenseIsSymmetric) {
  std::mt19937_64 rng(7);
  const auto ref = oracle::random_tensor(3, 4, rng);
  const auto d = to_dense(ref.to_lib());
  oracle::for_each_tuple(3, 4, [&](const oracle::Tuple& t) { EXPECT_EQ(d.at(t), ref.at(t)); });
}

TEST(Plumbing, FromDenseRejectsAsymmetry) {
  auto d = to_dense(identity_tensor(2, 2));
  d.data[1] = 0.5;  // (0,1) but not (1,0)
  EXPECT_THROW(from_dense(d), DataError);
}

TEST(RankOneAlgebra, InnerProductIsPowerOfDot) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    for (int m : {2, 4}) {
      const int n = 1 + static_cast<int>(rng() % 6);
      const Vector x = oracle::random_gaussian(n, rng);
      const Vector y = oracle::random_gaussian(n, rng);
      const double want = std::pow(x.dot(y), m);
      EXPECT_LE(oracle::rel_err(inner(rank_one(x, m), rank_one(y, m)), want), 1e-10);
    }
  }
}

TEST(DenseOracle, CanonicalOpsAgree) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    for (int m : {2, 4}) {
      const int n = 1 + static_cast<int>(rng() % 5);
      const auto ra = oracle::random_tensor(n, m, rng);
      const auto rb = oracle::random_tensor(n, m, rng);
      const auto a = ra.to_lib();
      const auto b = rb.to_lib();
      EXPECT_LE(oracle::rel_err(inner(a, b), oracle::inner(ra, rb)), 1e-10);
      EXPECT_LE(oracle::rel_err(frobenius(a), oracle::frobenius(ra)), 1e-10);
      EXPECT_LE(oracle::rel_err(trace(a), oracle::trace(ra)), 1e-10);
      const Vector x = oracle::random_gaussian(n, rng);
      const Vector g = contract(a, x);
      const auto want = oracle::contract(ra, oracle::to_std(x));
      for (int i = 0; i < n; ++i) EXPECT_LE(oracle::rel_err(g[i], want[static_cast<std::size_t>(i)]), 1e-10);
      EXPECT_LE(oracle::rel_err(form(a, x), oracle::form(ra, oracle::to_std(x))), 1e-10);
    }
  }
}

TEST(DenseOracle, OddOrdersToo) {
  std::mt19937_64 rng(10);
  for (int m : {1, 3, 5}) {
    const auto ra = oracle::random_tensor(3, m, rng);
    const Vector x = oracle::random_gaussian(3, rng);
    const Vector g = contract(ra.to_lib(), x);
    const auto want = oracle::contract(ra, oracle::to_std(x));
    for (int i = 0; i < 3; ++i) EXPECT_LE(oracle::rel_err(g[i], want[static_cast<std::size_t>(i)]), 1e-10);
  }
}

TEST(ConeSanity, SumsOfRankOnesArePsdOnProbes) {
  std::mt19937_64 rng(11);
  for (int m : {2, 4}) {
    const int n = 3;
    SymmetricTensor a(n, m);
    const auto count = static_cast<int>(caratheodory_count(n, m));
    for (int i = 0; i < count; ++i) a += rank_one(oracle::random_gaussian(n, rng), m);
    for (int probe = 0; probe < 500; ++probe) {
      const Vector v = oracle::random_gaussian(n, rng).normalized();
      EXPECT_GE(inner(a, rank_one(v, m)), -1e-9);
    }
  }
}

TEST(DenseMean, MatchesOracle) {
  std::mt19937_64 rng(12);
  const auto ra = oracle::random_tensor(4, 4, rng);
  double s = 0.0;
  oracle::for_each_tuple(4, 4, [&](const oracle::Tuple& t) { s += ra.at(t); });
  EXPECT_NEAR(dense_sum(ra.to_lib()), s, 1e-12);
  EXPECT_NEAR(dense_mean(ra.to_lib()), s / 256.0, 1e-14);
}

// ---------------------------------------------------------------------------
// Text format

TEST(SymtensorFormat, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(13);
  const auto a = oracle::random_tensor(5, 4, rng).to_lib();
  const std::string text = io::to_symtensor_string(a);
  const auto b = io::parse_symtensor(text);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
  EXPECT_EQ(io::to_symtensor_string(b), text);
}

TEST(SymtensorFormat, HeaderAndLayout) {
  SymmetricTensor a(3, 2);
  a.set(MultiIndex({2, 0}), 0.1);
  a.set(MultiIndex({1, 1}), -3.0);
  EXPECT_EQ(io::to_symtensor_string(a), "SYMTENSOR v1 n=3 m=2\n0 2 0.1\n1 1 -3\n");
}

TEST(SymtensorFormat, AcceptsUnorderedLines) {
  const auto a = io::parse_symtensor("SYMTENSOR v1 n=2 m=2\n1 1 2\n0 0 1\n\n0 1 0.5\n");
  EXPECT_EQ(a.at(MultiIndex({0, 0})), 1.0);
  EXPECT_EQ(a.at(MultiIndex({0, 1})), 0.5);
  EXPECT_EQ(a.at(MultiIndex({1, 1})), 2.0);
}

TEST(SymtensorFormat, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      io::parse_symtensor(text);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("SYMTENSOR v1 n=2 m=2\n0 0 1\n0 0 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("SYMTENSOR v1 n=2 m=2\n1 0 1\n").find("non-decreasing"), std::string::npos);
  EXPECT_NE(message("SYMTENSOR v1 n=2 m=2\n0 2 1\n").find("out of range"), std::string::npos);
  EXPECT_NE(message("SYMTENSOR v1 n=2 m=2\n0 1 abc\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("SYMTENSOR v1 n=2 m=2\n0 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("TENSOR v1 n=2 m=2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("").find("line 1"), std::string::npos);
}

TEST(DenseFormat, RoundTrip) {
  std::mt19937_64 rng(14);
  const auto a = oracle::random_tensor(3, 3, rng).to_lib();
  std::stringstream ss;
  io::write_dense(ss, to_dense(a));
  const auto b = from_dense(io::read_dense(ss));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
}

TEST(DenseFormat, MissingTupleIsError) {
  std::stringstream ss("DENSETENSOR v1 n=2 m=1\n0 1.5\n");
  EXPECT_THROW(io::read_dense(ss), DataError);
}

TEST(Labels, ParseAndFormat) {
  EXPECT_EQ(io::parse_labels("1 -1 +1  -1"), (std::vector<int>{1, -1, 1, -1}));
  EXPECT_EQ(io::format_labels({1, -1}), "1 -1");
  EXPECT_THROW(io::parse_labels("1 0"), DataError);
}
