#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wce/basis.hpp"
#include "wce/propagator.hpp"

namespace wce {

/// One-dimensional diffusion filtering model
///   dX = b(X) dt + sigma(X) dW + sum_k rho_k(X) dV_k,   dY_k = h_k(X) dt + dV_k,
/// with a Gaussian prior N(prior_mean, prior_var) unless `prior` overrides the density.
struct FilterModel {
  Coefficient drift = [](double) { return 0.0; };
  Coefficient diffusion = [](double) { return 1.0; };
  std::vector<Coefficient> correlation;  // rho_k; empty entries mean zero
  std::vector<Coefficient> observation;  // h_k
  double prior_mean = 0.0;
  double prior_var = 1.0;
  Coefficient prior;  // optional density override

  std::size_t channels() const { return observation.size(); }
  double prior_density(double x) const;
  /// Zakai operators in adjoint form:
  ///   L* u = ((sigma^2 + sum rho_k^2) u / 2)'' - (b u)',   M*_k u = h_k u - (rho_k u)'.
  OperatorSpec zakai_operator() const;
  /// max_k sup over the grid of |h_k|.
  double observation_bound(const Grid& grid) const;

  /// dX = beta X dt + sigma dW, dY = c X dt + dV.
  static FilterModel linear_gaussian(double beta, double sigma, double c, double m0, double p0);
};

struct FilterPath {
  std::vector<double> times;
  std::vector<double> state;
  std::vector<std::vector<double>> observations;  // [channel][time], Y_k(0) = 0
};

/// Euler-Maruyama for (X, Y) with independent W, V; reproducible by seed.
FilterPath simulate(const FilterModel& model, double horizon, int steps, std::uint64_t seed);
/// Observation path of a pure Wiener process (the reference-measure law of Y).
FilterPath wiener_observations(std::size_t channels, double horizon, int steps, std::uint64_t seed);

class ObservationRecord {
 public:
  ObservationRecord(std::vector<double> times, std::vector<std::vector<double>> y);
  explicit ObservationRecord(const FilterPath& path) : ObservationRecord(path.times, path.observations) {}

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& values() const { return y_; }
  std::size_t channels() const { return y_.size(); }

  /// xi_ik = m_i(T) Y_k(T) - integral of m_i' Y_k, with Y_k linear between samples.
  SlotMatrix coordinates(const TimeBasis& basis) const;
  /// Left-point sums of m_i(t_j) (Y_k(t_{j+1}) - Y_k(t_j)).
  SlotMatrix riemann_stieltjes_coordinates(const TimeBasis& basis) const;

 private:
  std::vector<double> times_;
  std::vector<std::vector<double>> y_;
};

/// Propagator of the Zakai equation on a Dirichlet interval grid.
PropagatorSolution zakai_solve(const FilterModel& model, const TruncationSpec& trunc, const TimeGrid& time,
                               const Grid& grid, std::vector<int> snapshots = {});

/// Unnormalized filtering density sum over alpha of u_alpha(t) xi_alpha(observations).
Field ufd(const PropagatorSolution& sol, const ObservationRecord& obs, double t);

struct FilterEstimate {
  double unnormalized = 0.0;
  double normalized = 0.0;
  bool small_normalizer = false;  // phi_t[1] < 1e-8 times the prior mass
};

FilterEstimate estimate(const PropagatorSolution& sol, const ObservationRecord& obs,
                        const std::function<double(double)>& f, double t);

struct StudyRow {
  int max_order = 0;
  int time_modes = 0;
  double mc_error = 0.0;      // replication mean of ||u_ref - u_N^n||^2 at T
  double mc_stderr = 0.0;
  double exact_error = 0.0;   // sum of ||u_alpha||^2 over the reference indices left out
  double ratio = 0.0;         // mc_error over the previous row's mc_error (NaN on the first row)
  double bound_ratio = 0.0;   // 4 h_inf T / (N + 2)
};

/// Reference-measure truncation error: one reference solve, ladder solutions
/// read off as sub-expansions, Y simulated as a Wiener process.
std::vector<StudyRow> truncation_error_study(const FilterModel& model, const TimeGrid& time, const Grid& grid,
                                             const TruncationSpec& reference,
                                             const std::vector<TruncationSpec>& ladder, int replications,
                                             std::uint64_t seed);

/// Level energies F_k(T), k = 0..N, with the full (untruncated) time basis,
/// from the covariance recursion C_k' = L C_k + C_k L^T + sum_l M_l C_{k-1} M_l^T.
/// Agrees with the propagator only up to O(dt^2).
std::vector<double> full_basis_level_energies(const FilterModel& model, const TimeGrid& time, const Grid& grid,
                                              int max_order);

struct TimeModeRow {
  int time_modes = 0;
  double error = 0.0;  // sum over k <= N of (F_k full basis - F_k with n modes)
};

struct TimeModeStudy {
  std::vector<TimeModeRow> rows;
  double fit_c = 0.0;          // least squares error ~ c / n
  double fit_r_squared = 0.0;
};

TimeModeStudy time_mode_error_study(const FilterModel& model, const TimeGrid& time, const Grid& grid, int max_order,
                                    const std::vector<int>& time_modes);
/// The same study on an existing solve whose time-mode count covers every requested n.
TimeModeStudy time_mode_error_study(const PropagatorSolution& sol, const std::vector<double>& full_energies,
                                    const std::vector<int>& time_modes);
/// Least-squares fit of e ~ c / n through the origin and its coefficient of determination.
std::pair<double, double> fit_inverse(const std::vector<int>& n, const std::vector<double>& e);

}  // namespace wce
