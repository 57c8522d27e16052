#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "wce/multiindex.hpp"

using namespace wce;

TEST(MultiIndex, CanonicalFormDropsZerosAndSorts) {
  const MultiIndex a{{{2, 1}, 1}, {{1, 2}, 0}, {{1, 1}, 2}};
  ASSERT_EQ(a.entries().size(), 2u);
  EXPECT_EQ(a.entries()[0].first, (Slot{1, 1}));
  EXPECT_EQ(a.order(), 3);
  EXPECT_EQ(a.at(1, 1), 2);
  EXPECT_EQ(a.at(1, 2), 0);
  EXPECT_EQ(a.max_time_mode(), 2);
}

TEST(MultiIndex, RaiseLowerRoundTrip) {
  const MultiIndex a = MultiIndex::unit(3, 2);
  EXPECT_EQ(lower(raise(a, 1, 1), 1, 1), a);
  EXPECT_EQ(lower(a, 1, 1), a);  // absent entries stay at zero
  EXPECT_THROW(a - MultiIndex::unit(1), std::invalid_argument);
}

TEST(MultiIndex, FactorialIsExact) {
  const MultiIndex a{{{1, 1}, 20}, {{2, 1}, 5}};
  EXPECT_EQ(factorial(a), big_factorial(20) * 120);
  EXPECT_NEAR(log_factorial(a), std::lgamma(21.0) + std::log(120.0), 1e-10);
  EXPECT_EQ(big_binomial(36, 4), 58905);
}

TEST(MultiIndex, CharacteristicSetRoundTrip) {
  const MultiIndex a{{{1, 1}, 2}, {{3, 2}, 1}};
  const auto k = characteristic_set(a);
  ASSERT_EQ(k.size(), 3u);
  EXPECT_EQ(k[0], (Slot{1, 1}));
  EXPECT_EQ(k[1], (Slot{1, 1}));
  EXPECT_EQ(k[2], (Slot{3, 2}));
  EXPECT_EQ(from_characteristic_set(k), a);
}

TEST(Enumerate, SizesMatchBinomial) {
  for (int N = 0; N <= 4; ++N) {
    for (int n = 1; n <= 4; ++n) {
      for (int r = 1; r <= 2; ++r) {
        const TruncationSpec s{N, n, r};
        EXPECT_EQ(enumerate(s).size(), truncation_size(s));
      }
    }
  }
  EXPECT_EQ(truncation_size({3, 2, 2}), 35u);
  EXPECT_EQ(truncation_size({4, 32, 1}), 58905u);
}

TEST(Enumerate, CanonicalOrderAndUniqueness) {
  const auto all = enumerate({3, 3, 2});
  EXPECT_TRUE(all.front().empty());
  std::set<std::string> seen;
  for (std::size_t j = 0; j < all.size(); ++j) {
    EXPECT_TRUE(seen.insert(all[j].to_string()).second);
    if (j > 0) EXPECT_TRUE(canonical_compare(all[j - 1], all[j]) < 0);
  }
  EXPECT_TRUE(canonical_compare(MultiIndex::unit(1, 1), MultiIndex::unit(1, 2)) < 0);
  EXPECT_TRUE(canonical_compare(MultiIndex::unit(1, 2), MultiIndex::unit(2, 1)) < 0);
}

TEST(IndexSet, EdgesPointToLoweredIndices) {
  const IndexSet set({3, 2, 2});
  for (std::size_t p = 0; p < set.size(); ++p) {
    int count = 0;
    for (const auto& e : set.edges(p)) {
      EXPECT_EQ(set[e.lower], lower(set[p], e.i, e.k));
      EXPECT_DOUBLE_EQ(e.weight, std::sqrt(static_cast<double>(set[p].at(e.i, e.k))));
      ++count;
    }
    EXPECT_EQ(count, static_cast<int>(set[p].entries().size()));
  }
  EXPECT_EQ(set.find(MultiIndex::unit(5)), set.size());
  EXPECT_EQ(set.level(0).size(), 1u);
  EXPECT_EQ(set.level(1).size(), 4u);
}

TEST(Psi, CompletenessRules) {
  const auto e1 = MultiIndex::unit(1);
  EXPECT_TRUE(is_complete(e1, e1, MultiIndex{}));
  EXPECT_FALSE(is_complete(e1, e1, e1));                                // odd sum
  EXPECT_FALSE(is_complete(e1.scaled(4), e1, e1));                      // triangle fails
  EXPECT_TRUE(is_complete(MultiIndex{}, MultiIndex{}, MultiIndex{}));
  EXPECT_THROW(psi(e1, e1, e1), IncompleteTripleError);
}

TEST(Psi, FrozenValues) {
  const auto e1 = MultiIndex::unit(1);
  // E[xi_1 xi_1 xi_2] with xi_2 = (x^2 - 1) / sqrt 2: (3 - 1) / sqrt 2.
  EXPECT_NEAR(psi(e1, e1, e1.scaled(2)), std::sqrt(2.0), 1e-15);
  // E[xi_2^3] = E[(x^2 - 1)^3] / 2^{3/2} = 2 sqrt 2.
  EXPECT_NEAR(psi(e1.scaled(2), e1.scaled(2), e1.scaled(2)), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_DOUBLE_EQ(psi(MultiIndex{}, e1, e1), 1.0);
  // Two slots multiply.
  const MultiIndex a{{{1, 1}, 2}, {{2, 1}, 1}}, b{{{1, 1}, 1}, {{2, 1}, 1}};
  EXPECT_NEAR(psi(a, b, e1), std::sqrt(2.0), 1e-14);
  const auto [num, den] = psi_squared_exact(e1.scaled(2), e1.scaled(2), e1.scaled(2));
  EXPECT_EQ(num, 8 * den);
}

TEST(Product, SingleSlotExpansion) {
  const auto e1 = MultiIndex::unit(1);
  // x * x = sqrt 2 xi_2 + 1.
  const auto terms = product_expand(e1, e1);
  ASSERT_EQ(terms.size(), 2u);
  double c0 = 0.0, c2 = 0.0;
  for (const auto& t : terms) (t.index.empty() ? c0 : c2) = t.coefficient;
  EXPECT_DOUBLE_EQ(c0, 1.0);
  EXPECT_NEAR(c2, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c_coeff(e1, e1, MultiIndex{}), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(c_coeff(e1, e1, e1.scaled(2)), InvalidMuError);
}
