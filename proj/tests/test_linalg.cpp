#include <random>
#include <set>

#include <gtest/gtest.h>

#include "khoflow/linalg.hpp"

using namespace khoflow;

namespace {

F2Matrix random_f2(std::mt19937& rng, std::size_t rows, std::size_t cols, double density = 0.5) {
  std::bernoulli_distribution bit(density);
  F2Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (bit(rng)) m.set(r, c);
  return m;
}

// Exhaustive span of the rows of a matrix with <= 16 columns.
std::set<unsigned> span_oracle(const F2Matrix& m) {
  std::set<unsigned> span{0};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    unsigned v = 0;
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.get(r, c)) v |= 1u << c;
    std::set<unsigned> next = span;
    for (auto s : span) next.insert(s ^ v);
    span = std::move(next);
  }
  return span;
}

std::size_t log2_size(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

TEST(RankF2, SmallExamples) {
  EXPECT_EQ(rank_f2(F2Matrix::identity(3)), 3u);
  EXPECT_EQ(rank_f2(F2Matrix(4, 2)), 0u);
  EXPECT_EQ(rank_f2(F2Matrix::from_rows({{1, 1}, {1, 1}})), 1u);
  EXPECT_EQ(rank_f2(F2Matrix(0, 0)), 0u);
}

TEST(RankF2, TransposeInvariantOnRandomMatrices) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = random_f2(rng, dim(rng), dim(rng), trial % 3 == 0 ? 0.1 : 0.5);
    EXPECT_EQ(rank_f2(m), rank_f2(m.transpose()));
  }
}

TEST(RankF2, AgreesWithSpanOracle) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = random_f2(rng, 1 + trial % 9, 1 + trial % 11, 0.3);
    EXPECT_EQ(rank_f2(m), log2_size(span_oracle(m).size()));
  }
}

TEST(KernelBasisF2, Examples) {
  EXPECT_EQ(kernel_basis_f2(F2Matrix::identity(2)).rows(), 0u);
  EXPECT_EQ(kernel_basis_f2(F2Matrix(1, 3)).rows(), 3u);

  const auto m = F2Matrix::from_rows({{1, 1, 0}});
  const auto k = kernel_basis_f2(m);
  ASSERT_EQ(k.rows(), 2u);
  EXPECT_EQ(rank_f2(k), 2u);
  EXPECT_TRUE((m * k.transpose()).is_zero());
}

TEST(KernelBasisF2, RankNullityOnRandomMatrices) {
  std::mt19937 rng(23);
  std::uniform_int_distribution<std::size_t> dim(1, 70);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_f2(rng, dim(rng), dim(rng), 0.4);
    const auto k = kernel_basis_f2(m);
    EXPECT_EQ(m.cols(), rank_f2(m) + k.rows());
    EXPECT_EQ(rank_f2(k), k.rows());
    if (k.rows() > 0) {
      EXPECT_TRUE((m * k.transpose()).is_zero());
    }
  }
}

TEST(QuotientDimF2, Examples) {
  F2Matrix space = F2Matrix::identity(5);
  F2Matrix sub(2, 5);
  sub.set(0, 0);
  sub.set(0, 1);
  sub.set(1, 4);
  EXPECT_EQ(quotient_dim_f2(space, sub), 3u);
  EXPECT_EQ(quotient_dim_f2(space, space), 0u);

  F2Matrix line(1, 3);
  line.set(0, 0);
  F2Matrix outside(1, 3);
  outside.set(0, 2);
  try {
    quotient_dim_f2(line, outside);
    FAIL() << "expected NotASubspace";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotASubspace);
  }
}

TEST(QuotientDimF2, RandomSixBySixAgainstSpanEnumeration) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto space = random_f2(rng, 6, 6);
    // subspace: random combinations of the space rows
    F2Matrix sub(3, 6);
    std::bernoulli_distribution pick(0.5);
    for (std::size_t s = 0; s < 3; ++s) {
      F2Vector v(6);
      for (std::size_t r = 0; r < 6; ++r)
        if (pick(rng)) v ^= space.row(r);
      sub.set_row(s, v);
    }
    const auto whole = span_oracle(space);
    const auto part = span_oracle(sub);
    for (auto v : part) ASSERT_TRUE(whole.count(v));
    EXPECT_EQ(quotient_dim_f2(space, sub), log2_size(whole.size() / part.size()));
  }
}

TEST(F2SpanBasis, CoordinatesReproduceVector) {
  std::mt19937 rng(2);
  const auto m = random_f2(rng, 12, 20);
  F2SpanBasis basis(20);
  std::vector<F2Vector> accepted;
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (basis.insert(m.row(r))) accepted.push_back(m.row(r));
  EXPECT_EQ(basis.dim(), rank_f2(m));
  for (int trial = 0; trial < 20; ++trial) {
    F2Vector v(20);
    std::bernoulli_distribution pick(0.5);
    for (const auto& a : accepted)
      if (pick(rng)) v ^= a;
    const auto red = basis.reduce(v);
    ASSERT_TRUE(red.residual.is_zero());
    F2Vector rebuilt(20);
    for (std::size_t i = 0; i < accepted.size(); ++i)
      if (red.combination.get(i)) rebuilt ^= accepted[i];
    EXPECT_EQ(rebuilt, v);
  }
}

TEST(SmithNormalForm, Examples) {
  EXPECT_EQ(smith_normal_form(IntMatrix::from_rows({{2}})), std::vector<BigInt>{2});
  EXPECT_EQ(smith_normal_form(IntMatrix::from_rows({{2, 1}, {1, 2}})), (std::vector<BigInt>{1, 3}));
  EXPECT_TRUE(smith_normal_form(IntMatrix(0, 0)).empty());
  EXPECT_EQ(smith_normal_form(IntMatrix::from_rows({{2, 4}, {4, 8}})), (std::vector<BigInt>{2, 0}));
  EXPECT_EQ(smith_normal_form(IntMatrix::from_rows({{6, 0}, {0, 4}})), (std::vector<BigInt>{2, 12}));
}

TEST(SmithNormalForm, InvariantUnderUnimodularTransforms) {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> entry(-6, 6);
  std::uniform_int_distribution<int> mult(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + static_cast<std::size_t>(trial % 5);
    const std::size_t cols = 1 + static_cast<std::size_t>((trial / 5) % 5);
    IntMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry(rng);
    const auto base = smith_normal_form(m);
    for (std::size_t i = 1; i < base.size(); ++i)
      if (base[i - 1] != 0) {
        EXPECT_EQ(base[i] % base[i - 1], 0);
      }

    IntMatrix t = m;
    std::uniform_int_distribution<std::size_t> pick_r(0, rows - 1), pick_c(0, cols - 1);
    for (int op = 0; op < 12; ++op) {
      if (rows > 1) {
        const auto a = pick_r(rng), b = pick_r(rng);
        if (a != b) t.add_row(a, b, mult(rng));
      }
      if (cols > 1) {
        const auto a = pick_c(rng), b = pick_c(rng);
        if (a != b) t.add_col(a, b, mult(rng));
      }
    }
    EXPECT_EQ(smith_normal_form(t), base);
  }
}

TEST(SmithNormalForm, ProductMatchesBareissDeterminant) {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> entry(-9, 9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 7);
    IntMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = entry(rng);
    BigInt product = 1;
    for (const auto& d : smith_normal_form(m)) product *= d;
    EXPECT_EQ(product, abs(determinant_bareiss(m)));
  }
}

TEST(Determinant, SmallExamples) {
  EXPECT_EQ(determinant_bareiss(IntMatrix(0, 0)), 1);
  EXPECT_EQ(determinant_bareiss(IntMatrix::from_rows({{2, 1}, {1, 2}})), 3);
  EXPECT_EQ(determinant_bareiss(IntMatrix::from_rows({{0, 1}, {1, 0}})), -1);
  EXPECT_EQ(determinant_bareiss(IntMatrix::from_rows({{1, 2}, {2, 4}})), 0);
}
