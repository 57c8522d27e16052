#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "wce/basis.hpp"
#include "wce/propagator.hpp"

namespace wce {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (weights sum to one).
QuadratureRule gauss_hermite(int points);
/// Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int points, double lo = -1.0, double hi = 1.0);

struct QuadratureSpec {
  std::vector<Slot> slots;
  int nodes_per_slot = 8;  // exact for degree <= 2 nodes - 1 in each slot
};

/// Tensor Gauss-Hermite expectation of f over iid standard normals placed in
/// the listed slots; every other slot of the table is zero.
double gh_expectation(const std::function<double(const SlotMatrix&)>& f, const QuadratureSpec& spec);

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> fields;
};

/// Semi-implicit Euler-Maruyama for an adapted problem; increments dW_k are
/// differences of path_from_coords so the path matches the chaos coordinates.
Trajectory euler_maruyama(const SpdeProblem& problem, const SlotMatrix& coords, int fine_steps);

/// Fourier mode of du = (a u'' + b u') dt + sigma u' dw:
///   u0hat exp((i b y - a y^2) t + i sigma y w(t) + sigma^2 y^2 t / 2).
std::complex<double> exact_mode_solution(double a, double b, double sigma, double y, double t, double w,
                                         std::complex<double> u0hat = 1.0);

/// F_n(t) for the single-channel constant-coefficient problem (b, c, nu = 0)
/// with u0(x) = exp(-x^2 / (2 s^2)):
///   ((sigma^2 t)^n / n!) s^2 Gamma(n + 1/2) / (2 a t + s^2)^(n + 1/2).
double gaussian_level_energy(double a, double sigma, double t, int n, double width = 1.0);
/// Same quantity by quadrature of ((sigma^2 t)^n / n!) int y^{2n} e^{-2 a y^2 t} S(y) dy,
/// where S(y) = |u0hat(y)|^2 / (2 pi).
double spectral_level_energy(double a, double sigma, double t, int n, const std::function<double(double)>& density,
                             double cutoff);

struct LinearGaussianModel {
  double beta = 0.0;   // dX = beta X dt + sigma dW
  double sigma = 1.0;
  double c = 1.0;      // dY = c X dt + dV
  double m0 = 0.0;     // prior mean and variance
  double p0 = 1.0;
};

struct KalmanPath {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Continuous-time Kalman-Bucy filter on the observation grid (Y sampled at
/// `times`, Y(0) = 0): Riccati by RK4, mean by the innovation increment.
KalmanPath kalman_bucy(const LinearGaussianModel& model, const std::vector<double>& times,
                       const std::vector<double>& y);
/// Positive root of 2 beta P + sigma^2 - c^2 P^2 = 0.
double riccati_fixed_point(const LinearGaussianModel& model);

/// Discrepancy between the sampled chaos field at t and u0(x + b t + sigma w(t))
/// with w reconstructed from the same coordinates. Requires a = sigma^2 / 2.
double kv_check(const PropagatorSolution& sol, const std::function<double(double)>& u0, double t,
                const SlotMatrix& coords);

}  // namespace wce
