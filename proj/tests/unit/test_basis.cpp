#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wce/basis.hpp"

using namespace wce;

TEST(Hermite, FrozenValues) {
  EXPECT_DOUBLE_EQ(hermite(0, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(hermite(1, 3.0), 3.0);
  EXPECT_NEAR(hermite(5, 0.7), 7.23807, 1e-12);
  EXPECT_NEAR(hermite(4, -1.3), -4.2839, 1e-12);
}

TEST(TimeBasis, ValuesAndIntegrals) {
  const TimeBasis b(1.0, 4);
  EXPECT_DOUBLE_EQ(b.eval(1, 0.3), 1.0);
  EXPECT_NEAR(b.eval(2, 0.25), std::sqrt(2.0) * std::cos(std::numbers::pi / 4), 1e-15);
  EXPECT_NEAR(b.integral(2, 0.0, 0.5), std::sqrt(2.0) / std::numbers::pi, 1e-15);
  for (int i = 2; i <= 4; ++i) EXPECT_NEAR(b.antiderivative(i, 1.0), 0.0, 1e-15);
  EXPECT_THROW(b.eval(5, 0.1), std::out_of_range);

  const TimeBasis b2(2.0, 3);
  EXPECT_NEAR(b2.integral(3, 0.0, 0.3), 0.257518107400241925977905344485, 1e-14);
}

TEST(TimeBasis, HatWeightsFrozen) {
  const TimeBasis b(1.0, 2);
  const auto [w0, w1] = b.hat_weights(2, 0.1, 0.2);
  EXPECT_NEAR(w0, 0.0644216146035041311036827588895, 1e-14);
  EXPECT_NEAR(w1, 0.0610681909114162541018325252075, 1e-14);
  EXPECT_NEAR(w0 + w1, b.integral(2, 0.1, 0.2), 1e-15);
}

TEST(CounterNormal, ReproducibleAndStandard) {
  EXPECT_EQ(counter_normal(7, 1, 2), counter_normal(7, 1, 2));
  EXPECT_NE(counter_normal(7, 1, 2), counter_normal(8, 1, 2));
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int j = 0; j < n; ++j) {
    const double z = counter_normal(3, 0, static_cast<std::uint64_t>(j));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(GaussianCoordinates, TableExtensionIsStable) {
  const auto small = GaussianCoordinates::sample(3, 2, 42);
  const auto big = GaussianCoordinates::sample(8, 2, 42);
  for (int i = 1; i <= 3; ++i) {
    for (int k = 1; k <= 2; ++k) EXPECT_EQ(small.xi(i, k), big.xi(i, k));
  }
}

TEST(XiAlpha, ProductOfNormalizedHermite) {
  SlotMatrix x(2, 1);
  x(1, 1) = 0.7;
  x(2, 1) = -1.3;
  const MultiIndex a{{{1, 1}, 5}, {{2, 1}, 4}};
  EXPECT_NEAR(xi_alpha(a, x), 7.23807 / std::sqrt(120.0) * -4.2839 / std::sqrt(24.0), 1e-13);
  EXPECT_DOUBLE_EQ(xi_alpha(MultiIndex{}, x), 1.0);
}

TEST(Path, ReconstructsProjectedWiener) {
  const TimeBasis b(1.0, 3);
  SlotMatrix x(3, 1);
  x(1, 1) = 0.5;
  x(3, 1) = 2.0;
  // w(1) = xi_11 M_1(1) since M_i(T) = 0 for i > 1.
  EXPECT_NEAR(path_from_coords(x, b, 1, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(path_from_coords(x, b, 1, 0.25), 0.5 * 0.25 + 2.0 * b.antiderivative(3, 0.25), 1e-15);
}

TEST(STransform, StochasticExponential) {
  TestDirection h{SlotMatrix(2, 1)};
  h.h(1, 1) = 0.3;
  h.h(2, 1) = -0.2;
  EXPECT_NEAR(h.squared_norm(), 0.13, 1e-15);
  const MultiIndex a{{{1, 1}, 2}, {{2, 1}, 1}};
  EXPECT_NEAR(stoch_exp_coeff(h, a), 0.09 * -0.2 / std::sqrt(2.0), 1e-15);
  ScalarChaos c{{MultiIndex{}, 1.0}, {MultiIndex::unit(1), 2.0}};
  EXPECT_NEAR(s_transform_scalar(c, h), 1.0 + 0.6, 1e-15);
}
