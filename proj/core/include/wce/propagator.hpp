#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "wce/basis.hpp"
#include "wce/multiindex.hpp"
#include "wce/spatial.hpp"

namespace wce {

/// Uniform grid t_s = s * T / steps on [0, T].
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1000;

  double dt() const { return horizon / steps; }
  double time(int s) const { return s == steps ? horizon : s * dt(); }
};

/// Field-valued function of time, returned as nodal values on the grid.
using TimeFunction = std::function<Field(double)>;
template <class V>
using ChaosMap = std::map<MultiIndex, V, CanonicalLess>;

/// du = (A u + f) dt + (M_k u + g_k) dw_k on [0, T], with data given by their
/// chaos coefficients. Adapted (deterministic) data live on the empty index
/// only; anticipating data may have any index in the truncation.
struct SpdeProblem {
  std::shared_ptr<const Discretization> space;
  TruncationSpec trunc;
  TimeGrid time;
  ChaosMap<Field> initial;
  ChaosMap<TimeFunction> drift;
  std::vector<ChaosMap<TimeFunction>> noise;  // one map per channel
  /// Steps at which coefficients are stored; empty means {0, steps}.
  std::vector<int> snapshots;

  TimeBasis basis() const { return {time.horizon, trunc.time_modes}; }
  void validate() const;

  static SpdeProblem deterministic(std::shared_ptr<const Discretization> space, TruncationSpec trunc, TimeGrid time,
                                   Field u0, TimeFunction f = {}, std::vector<TimeFunction> g = {});
  /// Snapshot every `stride` steps (always including 0 and the last step).
  void snapshot_every(int stride);
};

class NumericalInstability : public std::runtime_error {
 public:
  NumericalInstability(const MultiIndex& alpha, int step)
      : std::runtime_error("non-finite coefficient " + alpha.to_string() + " at time step " + std::to_string(step)),
        alpha_(alpha), step_(step) {}
  const MultiIndex& alpha() const { return alpha_; }
  int step() const { return step_; }

 private:
  MultiIndex alpha_;
  int step_;
};

/// Chaos coefficients u_alpha at the stored snapshot times.
class PropagatorSolution {
 public:
  PropagatorSolution(IndexSet indices, std::shared_ptr<const Discretization> space, TimeBasis basis,
                     std::vector<int> steps, std::vector<double> times);

  const IndexSet& indices() const { return indices_; }
  const Discretization& space() const { return *space_; }
  std::shared_ptr<const Discretization> space_ptr() const { return space_; }
  const TimeBasis& basis() const { return basis_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& steps() const { return steps_; }
  std::size_t snapshot_count() const { return times_.size(); }

  /// Snapshot whose time equals t (to 1e-9 T); throws otherwise.
  std::size_t snapshot_at(double t) const;

  const State& state(std::size_t snapshot, std::size_t pos) const { return states_.at(snapshot).at(pos); }
  State& state(std::size_t snapshot, std::size_t pos) { return states_.at(snapshot).at(pos); }
  /// Nodal values of u_alpha at time t; zero field for indices outside the truncation.
  Field coefficient(const MultiIndex& alpha, double t) const;

 private:
  IndexSet indices_;
  std::shared_ptr<const Discretization> space_;
  TimeBasis basis_;
  std::vector<int> steps_;
  std::vector<double> times_;
  std::vector<std::vector<State>> states_;  // [snapshot][index position]
};

/// Solves the propagator system level by level, marching all levels through
/// time together so that only endpoint values of lower levels are needed.
PropagatorSolution solve(const SpdeProblem& problem);

/// F_n(t) = sum over |alpha| = n of ||u_alpha(t)||^2.
double level_energy(const PropagatorSolution& sol, int n, double t);

struct ConvergenceRow {
  int n = 0;
  double energy = 0.0;
  double ratio = 0.0;            // F_{n+1} / F_n, NaN on the last row or when F_n = 0
  double factorial_bound = 0.0;  // NaN when not applicable
};

struct ConvergenceReport {
  double t = 0.0;
  Parabolicity classification = Parabolicity::kNonParabolic;
  double epsilon = 0.0;          // 2a - sum sigma_k^2
  double c_star = 0.0;           // sum sigma_k^2 (M_k measured in the gradient norm)
  double b = 0.0;                // epsilon / c_star when both are positive
  double geometric_bound = 0.0;  // 1 / (1 + b), NaN when unavailable
  bool bounded_noise = false;    // all sigma_k = 0
  double c1 = 0.0, c3 = 0.0;     // factorial-bound constants: 2c and sum nu_k^2
  double initial_energy = 0.0;
  double partial_sum = 0.0;      // sum over n <= N of F_n(t)
  std::vector<ConvergenceRow> rows;
};

ConvergenceReport convergence_report(const PropagatorSolution& sol, double t);

struct IteratedIntegralResult {
  double discrepancy = 0.0;     // root mean square over samples of the L2 distance
  double reference_norm = 0.0;  // root mean square of the quadrature value's norm
  int samples = 0;
};

/// Compares sum over |alpha| = n of u_alpha(T) xi_alpha with the n-fold
/// iterated integral computed by Euler quadrature on a fine Brownian path;
/// xi_ik are the discrete projections of the same path. n <= 2, deterministic data.
IteratedIntegralResult iterated_integral_check(const SpdeProblem& problem, const PropagatorSolution& sol, int n,
                                               int samples, int fine_steps, std::uint64_t seed);

}  // namespace wce
