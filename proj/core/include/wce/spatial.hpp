#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wce {

using Field = std::vector<double>;
/// Backend-specific state vector: nodal values for finite differences,
/// interleaved (re, im) half-spectrum for the spectral backend.
using State = std::vector<double>;
using Coefficient = std::function<double(double)>;

enum class Boundary {
  kPeriodic,
  kDirichlet,    // homogeneous Dirichlet on a truncated interval
  kExtrapolate,  // one-sided second-order closures at the ends; exact on quadratics
};

/// Uniform 1D grid. Periodic grids have nodes -L/2 + j L / N_x; interval grids
/// include both endpoints.
class Grid {
 public:
  static Grid periodic(double length, int points);
  static Grid interval(double lo, double hi, int points, Boundary boundary);

  Boundary boundary() const { return boundary_; }
  int points() const { return points_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  double spacing() const { return spacing_; }
  double node(int j) const { return lo_ + j * spacing_; }
  std::vector<double> nodes() const;
  /// Index of the node closest to x.
  int nearest(double x) const;
  /// Quadrature weights: uniform on periodic grids, trapezoid on intervals.
  std::vector<double> weights() const;

  Field sample(const std::function<double(double)>& f) const;
  double integrate(std::span<const double> values) const;
  double norm2(std::span<const double> values) const;

 private:
  Boundary boundary_ = Boundary::kPeriodic;
  int points_ = 0;
  double lo_ = 0.0, hi_ = 0.0, spacing_ = 0.0;
};

/// A u = a u'' + b u' + c u and M_k u = sigma_k u' + nu_k u with constant coefficients.
struct ConstantCoefficients {
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> sigma;
  std::vector<double> nu;
};

/// Variable coefficients. In kNonDivergence form the operators read as in
/// ConstantCoefficients; in kAdjoint form
///   A u = (a u)'' + (b u)' + c u,   M_k u = (sigma_k u)' + nu_k u,
/// which is how Fokker-Planck and Zakai operators are written.
struct VariableCoefficients {
  enum class Form { kNonDivergence, kAdjoint };
  Form form = Form::kNonDivergence;
  Coefficient a, b, c;
  std::vector<Coefficient> sigma;
  std::vector<Coefficient> nu;
};

struct OperatorSpec {
  std::variant<ConstantCoefficients, VariableCoefficients> coefficients;

  bool is_constant() const { return std::holds_alternative<ConstantCoefficients>(coefficients); }
  const ConstantCoefficients& constant() const { return std::get<ConstantCoefficients>(coefficients); }
  const VariableCoefficients& variable() const { return std::get<VariableCoefficients>(coefficients); }
  std::size_t channels() const;
  /// Throws std::invalid_argument when sigma/nu lists disagree or a
  /// coefficient function is missing.
  void validate() const;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Propagates u0 over one step of fixed size:
///   spectral:  u1 = E (u0 + early) + late,  E = exp(A dt) per mode;
///   FD:        (I - dt/2 A) u1 = (I + dt/2 A) u0 + early + late.
/// `early` and `late` are the quadrature contributions of the source term
/// attached to the step endpoints.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual double dt() const = 0;
  virtual void advance(const State& u0, const State& early, const State& late, State& u1) const = 0;
};

/// Spatial discretization of A and {M_k}.
class Discretization {
 public:
  virtual ~Discretization() = default;

  virtual const Grid& grid() const = 0;
  virtual const OperatorSpec& spec() const = 0;
  virtual std::size_t state_size() const = 0;
  virtual std::size_t channels() const = 0;

  virtual State encode(std::span<const double> field) const = 0;
  virtual Field decode(const State& state) const = 0;

  virtual void apply_A(const State& in, State& out) const = 0;
  virtual void apply_M(std::size_t k, const State& in, State& out) const = 0;

  virtual std::unique_ptr<Stepper> stepper(double dt) const = 0;
  /// Solves (I - alpha (A + sum_k w_k M_k)) x = rhs.
  virtual void solve_shifted(double alpha, std::span<const double> w, const State& rhs, State& x) const = 0;
  /// One step of v' = (A + sum_k h_k(t) M_k) v + source over [t0, t0 + dt].
  /// `h_mid` holds h_k at the midpoint, `h_increment` the integral of h_k over
  /// the step. Spectral backends integrate the homogeneous part exactly.
  virtual void advance_shifted(const State& v0, double dt, std::span<const double> h_mid,
                               std::span<const double> h_increment, const State& early, const State& late,
                               State& v1) const = 0;

  /// Squared L2 norm of the represented field.
  virtual double norm2(const State& s) const = 0;
  virtual double inner(const State& a, const State& b) const = 0;

  State zeros() const { return State(state_size(), 0.0); }
};

/// Spectral backend: constant coefficients on a periodic grid, N_x a power of two >= 8.
std::shared_ptr<const Discretization> make_spectral(const Grid& grid, const OperatorSpec& op);
/// Second-order finite differences on an interval grid (Dirichlet or extrapolated ends).
std::shared_ptr<const Discretization> make_finite_difference(const Grid& grid, const OperatorSpec& op);
/// Picks the spectral backend for periodic grids, finite differences otherwise.
std::shared_ptr<const Discretization> make_discretization(const Grid& grid, const OperatorSpec& op);

Field apply_A(const Discretization& d, std::span<const double> u);
Field apply_Mk(const Discretization& d, std::size_t k, std::span<const double> u);
/// One Crank-Nicolson / exponential step with a source held over the step
/// (trapezoid weights dt/2 at both ends).
Field imex_step(const Discretization& d, std::span<const double> u, double dt, std::span<const double> source);

/// Symbols of A and M_k at wavenumber y.
std::complex<double> symbol_A(const ConstantCoefficients& c, double y);
std::complex<double> symbol_M(const ConstantCoefficients& c, std::size_t k, double y);

enum class Parabolicity { kStrong, kWeak, kNonParabolic };
std::string to_string(Parabolicity p);

struct ParabolicityReport {
  double epsilon = 0.0;
  Parabolicity classification = Parabolicity::kNonParabolic;
};

/// epsilon = 2a - sum_k q_k^2 sigma_k^2 (pointwise minimum over the grid for
/// variable coefficients in non-divergence form).
ParabolicityReport parabolicity_report(const OperatorSpec& op, std::span<const double> q,
                                       const Grid* grid = nullptr);

/// Fraction of the L2 mass carried by the `cells` outermost nodes on each side.
double boundary_mass_fraction(const Grid& grid, std::span<const double> values, int cells = 3);

}  // namespace wce
