#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wce/oracle.hpp"

using namespace wce;

TEST(Quadrature, GaussHermiteFrozenNodes) {
  const auto r3 = gauss_hermite(3);
  EXPECT_NEAR(r3.nodes[0], -std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(r3.nodes[1], 0.0, 1e-14);
  EXPECT_NEAR(r3.weights[0], 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(r3.weights[1], 2.0 / 3.0, 1e-14);
  const auto r5 = gauss_hermite(5);
  EXPECT_NEAR(r5.nodes[4], 2.8569700138728056541623042640061, 1e-13);
  EXPECT_NEAR(r5.nodes[3], 1.3556261799742658658305212908716, 1e-13);
  double m8 = 0.0;
  for (std::size_t j = 0; j < r5.nodes.size(); ++j) m8 += r5.weights[j] * std::pow(r5.nodes[j], 8);
  EXPECT_NEAR(m8, 105.0, 1e-10);
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
}

TEST(Quadrature, GaussLegendre) {
  const auto r = gauss_legendre(2);
  EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  const auto s = gauss_legendre(10, 0.0, std::numbers::pi);
  double v = 0.0;
  for (std::size_t j = 0; j < s.nodes.size(); ++j) v += s.weights[j] * std::sin(s.nodes[j]);
  EXPECT_NEAR(v, 2.0, 1e-14);
}

TEST(Quadrature, TensorExpectation) {
  const QuadratureSpec spec{{{1, 1}, {2, 1}}, 4};
  EXPECT_NEAR(gh_expectation([](const SlotMatrix& x) { return x(1, 1) * x(1, 1) * x(2, 1) * x(2, 1); }, spec), 1.0, 1e-14);
  EXPECT_NEAR(gh_expectation([](const SlotMatrix& x) { return std::pow(x(1, 1), 4); }, spec), 3.0, 1e-13);
}

TEST(LevelEnergy, ClosedFormAndQuadratureAgree) {
  EXPECT_NEAR(gaussian_level_energy(0.5, 1.0, 1.0, 2), 0.117498200373328148550738997726, 1e-15);
  EXPECT_NEAR(gaussian_level_energy(0.5, 1.0, 0.25, 3), 0.00396332729760601101334502876512, 1e-16);
  for (int n = 0; n <= 6; ++n) {
    const double q = spectral_level_energy(0.7, 1.1, 0.6, n, [](double y) { return std::exp(-y * y); }, 12.0);
    EXPECT_NEAR(q / gaussian_level_energy(0.7, 1.1, 0.6, n), 1.0, 1e-12) << n;
  }
  EXPECT_NEAR(gaussian_level_energy(0.5, 1.0, 0.0, 0), std::sqrt(std::numbers::pi), 1e-14);
}

TEST(ExactMode, ReducesToHeatSymbol) {
  const auto v = exact_mode_solution(1.0, 0.0, 0.0, 2.0, 0.5, 0.0);
  EXPECT_NEAR(v.real(), std::exp(-2.0), 1e-15);
  // a = sigma^2 / 2: the modulus stays one.
  EXPECT_NEAR(std::abs(exact_mode_solution(0.5, 0.3, 1.0, 3.0, 2.0, 0.7)), 1.0, 1e-14);
}

TEST(Kalman, RiccatiFixedPointFrozen) {
  const LinearGaussianModel m{-1.0, 0.5, 1.0 / 3.0, 0.0, 0.25};
  EXPECT_NEAR(riccati_fixed_point(m), 0.124143795447329102343993135783, 1e-14);
  std::vector<double> t, y;
  for (int j = 0; j <= 20000; ++j) {
    t.push_back(j * 1e-3);
    y.push_back(0.0);
  }
  const auto k = kalman_bucy(m, t, y);
  EXPECT_NEAR(k.variance.back(), riccati_fixed_point(m), 1e-10);
  EXPECT_NEAR(k.mean.back(), 0.0, 1e-15);
}

TEST(EulerMaruyama, PureTransportFollowsThePath) {
  ConstantCoefficients c;
  c.sigma = {1.0};
  c.nu = {0.0};
  const Grid g = Grid::interval(-1.0, 1.0, 21, Boundary::kExtrapolate);
  auto p = SpdeProblem::deterministic(make_finite_difference(g, {c}), {1, 4, 1}, {1.0, 10},
                                      g.sample([](double x) { return x; }));
  const auto co = GaussianCoordinates::sample(4, 1, 5);
  const auto traj = euler_maruyama(p, co.xi, 400);
  const double w = path_from_coords(co.xi, p.basis(), 1, 1.0);
  EXPECT_NEAR(traj.fields.back()[10], w, 1e-12);
}

TEST(KrylovVeretennikov, RequiresDegenerateSetting) {
  ConstantCoefficients c;
  c.a = 1.0;
  c.sigma = {1.0};
  c.nu = {0.0};
  const Grid g = Grid::periodic(20.0, 64);
  auto p = SpdeProblem::deterministic(make_spectral(g, {c}), {1, 1, 1}, {1.0, 10}, Field(64, 0.0));
  SlotMatrix x(1, 1);
  EXPECT_THROW(kv_check(solve(p), [](double) { return 0.0; }, 1.0, x), std::invalid_argument);
}
