#include "wce/basis.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace wce {

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < n; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

TimeBasis::TimeBasis(double horizon, int count) : horizon_(horizon), count_(count) {
  if (!(horizon > 0.0)) throw std::invalid_argument("time basis horizon must be positive");
  if (count < 1) throw std::invalid_argument("time basis needs at least one function");
}

void TimeBasis::check(int i, double t) const {
  if (i < 1 || i > count_) throw std::out_of_range("time basis index out of range");
  const double slack = 1e-12 * horizon_;
  if (t < -slack || t > horizon_ + slack) throw std::out_of_range("time outside [0, T]");
}

double TimeBasis::eval(int i, double t) const {
  check(i, t);
  if (i == 1) return 1.0 / std::sqrt(horizon_);
  const double w = std::numbers::pi * (i - 1) / horizon_;
  return std::sqrt(2.0 / horizon_) * std::cos(w * t);
}

double TimeBasis::derivative(int i, double t) const {
  check(i, t);
  if (i == 1) return 0.0;
  const double w = std::numbers::pi * (i - 1) / horizon_;
  return -std::sqrt(2.0 / horizon_) * w * std::sin(w * t);
}

double TimeBasis::integral(int i, double t0, double t1) const {
  check(i, t0);
  check(i, t1);
  if (t1 < t0) throw std::invalid_argument("integral bounds reversed");
  if (i == 1) return (t1 - t0) / std::sqrt(horizon_);
  const double w = std::numbers::pi * (i - 1) / horizon_;
  // sin(w t1) - sin(w t0) = 2 cos(w (t0+t1)/2) sin(w (t1-t0)/2)
  return std::sqrt(2.0 / horizon_) * 2.0 * std::cos(0.5 * w * (t0 + t1)) * std::sin(0.5 * w * (t1 - t0)) / w;
}

namespace {

// 10-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 10> kGLNodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472, -0.1488743389816312,
    0.1488743389816312,  0.4333953941292472,  0.6794095682990244,  0.8650633666889845,  0.9739065285171717};
constexpr std::array<double, 10> kGLWeights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963, 0.2955242247147529,
    0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806, 0.0666713443086881};

}  // namespace

std::pair<double, double> TimeBasis::hat_weights(int i, double t0, double t1) const {
  check(i, t0);
  check(i, t1);
  const double dt = t1 - t0;
  if (i == 1) {
    const double v = 0.5 * dt / std::sqrt(horizon_);
    return {v, v};
  }
  const double w = std::numbers::pi * (i - 1) / horizon_;
  const double c = std::sqrt(2.0 / horizon_);
  if (w * dt <= 2.0) {
    // Gauss-Legendre is accurate to roundoff here and avoids the cancellation
    // of the closed form at small w dt.
    double late = 0.0, total = 0.0;
    for (std::size_t q = 0; q < kGLNodes.size(); ++q) {
      const double theta = 0.5 * (kGLNodes[q] + 1.0);
      const double m = c * std::cos(w * (t0 + theta * dt));
      total += kGLWeights[q] * m;
      late += kGLWeights[q] * m * theta;
    }
    total *= 0.5 * dt;
    late *= 0.5 * dt;
    return {total - late, late};
  }
  const double total = integral(i, t0, t1);
  // integral of cos(w s)(s - t0) ds over [t0, t1]
  const double moment = dt * std::sin(w * t1) / w + (std::cos(w * t1) - std::cos(w * t0)) / (w * w);
  const double late = c * moment / dt;
  return {total - late, late};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit_open(std::uint64_t bits) {
  // 53 random bits mapped into (0, 1)
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t i, std::uint64_t k) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ i) ^ (k * 0xd1b54a32d192ed03ULL));
  const double u1 = to_unit_open(splitmix64(key));
  const double u2 = to_unit_open(splitmix64(key ^ 0x5851f42d4c957f2dULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

GaussianCoordinates GaussianCoordinates::sample(int time_modes, int channels, std::uint64_t seed) {
  GaussianCoordinates c{SlotMatrix(time_modes, channels), seed};
  for (int i = 1; i <= time_modes; ++i) {
    for (int k = 1; k <= channels; ++k) {
      c.xi(i, k) = counter_normal(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
    }
  }
  return c;
}

double TestDirection::squared_norm() const {
  double s = 0.0;
  for (int i = 1; i <= h.time_modes(); ++i) {
    for (int k = 1; k <= h.channels(); ++k) s += h(i, k) * h(i, k);
  }
  return s;
}

double xi_alpha(const MultiIndex& alpha, const SlotMatrix& coords) {
  if (!coords.covers(alpha)) throw std::out_of_range("xi_alpha: support of " + alpha.to_string() + " not covered");
  double v = 1.0;
  for (const auto& [slot, power] : alpha.entries()) {
    v *= hermite(power, coords(slot.i, slot.k)) / std::sqrt(std::tgamma(power + 1.0));
  }
  return v;
}

double path_from_coords(const SlotMatrix& coords, const TimeBasis& basis, int k, double t) {
  double w = 0.0;
  const int n = std::min(coords.time_modes(), basis.count());
  for (int i = 1; i <= n; ++i) w += coords(i, k) * basis.antiderivative(i, t);
  return w;
}

double stoch_exp_coeff(const TestDirection& h, const MultiIndex& alpha) {
  double v = 1.0;
  for (const auto& [slot, power] : alpha.entries()) {
    if (slot.i > h.h.time_modes() || slot.k > h.h.channels()) return 0.0;
    v *= std::pow(h.h(slot.i, slot.k), power) / std::sqrt(std::tgamma(power + 1.0));
  }
  return v;
}

double s_transform_scalar(const ScalarChaos& coeffs, const TestDirection& h) {
  double s = 0.0;
  for (const auto& [alpha, c] : coeffs) s += c * stoch_exp_coeff(h, alpha);
  return s;
}

}  // namespace wce
