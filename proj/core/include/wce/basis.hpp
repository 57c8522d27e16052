#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "wce/multiindex.hpp"

namespace wce {

/// Probabilists' Hermite polynomial H_n(x), H_{n+1} = x H_n - n H_{n-1}.
double hermite(int n, double x);

/// Fourier cosine basis on [0, T]:
///   m_1(t) = 1/sqrt(T),  m_i(t) = sqrt(2/T) cos(pi (i-1) t / T),  i > 1.
class TimeBasis {
 public:
  TimeBasis() = default;
  TimeBasis(double horizon, int count);

  double horizon() const { return horizon_; }
  int count() const { return count_; }

  double eval(int i, double t) const;
  double derivative(int i, double t) const;
  /// Closed-form integral of m_i over [t0, t1].
  double integral(int i, double t0, double t1) const;
  /// M_i(t) = integral of m_i over [0, t].
  double antiderivative(int i, double t) const { return integral(i, 0.0, t); }

  /// Integrals of m_i(s) (t1 - s)/dt and m_i(s) (s - t0)/dt over [t0, t1]:
  /// the weights of the linear-interpolation product rule.
  std::pair<double, double> hat_weights(int i, double t0, double t1) const;

 private:
  void check(int i, double t) const;

  double horizon_ = 1.0;
  int count_ = 1;
};

/// Dense (i, k) table, 1-based on both axes.
class SlotMatrix {
 public:
  SlotMatrix() = default;
  SlotMatrix(int time_modes, int channels, double fill = 0.0)
      : time_modes_(time_modes), channels_(channels),
        values_(static_cast<std::size_t>(time_modes) * static_cast<std::size_t>(channels), fill) {}

  int time_modes() const { return time_modes_; }
  int channels() const { return channels_; }

  double& operator()(int i, int k) { return values_[offset(i, k)]; }
  double operator()(int i, int k) const { return values_[offset(i, k)]; }
  bool covers(const MultiIndex& alpha) const {
    return alpha.max_time_mode() <= time_modes_ && alpha.max_channel() <= channels_;
  }

 private:
  std::size_t offset(int i, int k) const {
    if (i < 1 || i > time_modes_ || k < 1 || k > channels_) throw std::out_of_range("slot outside coordinate table");
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(k - 1);
  }

  int time_modes_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

/// Standard normal draw addressed by a counter; independent across
/// (seed, i, k) and stable when the table is extended.
double counter_normal(std::uint64_t seed, std::uint64_t i, std::uint64_t k);

/// Gaussian coordinates xi_ik = integral of m_i dw_k.
struct GaussianCoordinates {
  SlotMatrix xi;
  std::uint64_t seed = 0;

  static GaussianCoordinates sample(int time_modes, int channels, std::uint64_t seed);
};

/// Test direction h(t) = sum h_{k,i} m_i(t) y_k; stored as an (i, k) table.
struct TestDirection {
  SlotMatrix h;

  double squared_norm() const;
};

double xi_alpha(const MultiIndex& alpha, const SlotMatrix& coords);
inline double xi_alpha(const MultiIndex& alpha, const GaussianCoordinates& coords) {
  return xi_alpha(alpha, coords.xi);
}

/// w_k(t) = sum_i xi_ik M_i(t): the projection of the Wiener path onto span{m_i}.
double path_from_coords(const SlotMatrix& coords, const TimeBasis& basis, int k, double t);

/// (E(h))_alpha = h^alpha / sqrt(alpha!).
double stoch_exp_coeff(const TestDirection& h, const MultiIndex& alpha);

using ScalarChaos = std::map<MultiIndex, double, CanonicalLess>;

/// S-transform of a finitely supported scalar chaos: sum_alpha c_alpha h^alpha / sqrt(alpha!).
double s_transform_scalar(const ScalarChaos& coeffs, const TestDirection& h);

}  // namespace wce
