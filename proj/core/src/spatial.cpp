#include "wce/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wce {

Grid Grid::periodic(double length, int points) {
  if (!(length > 0.0)) throw std::invalid_argument("periodic grid length must be positive");
  if (points < 2) throw std::invalid_argument("periodic grid needs at least two points");
  Grid g;
  g.boundary_ = Boundary::kPeriodic;
  g.points_ = points;
  g.lo_ = -0.5 * length;
  g.hi_ = 0.5 * length;
  g.spacing_ = length / points;
  return g;
}

Grid Grid::interval(double lo, double hi, int points, Boundary boundary) {
  if (!(hi > lo)) throw std::invalid_argument("interval grid needs hi > lo");
  if (points < 4) throw std::invalid_argument("interval grid needs at least four points");
  if (boundary == Boundary::kPeriodic) throw std::invalid_argument("use Grid::periodic for periodic boundaries");
  Grid g;
  g.boundary_ = boundary;
  g.points_ = points;
  g.lo_ = lo;
  g.hi_ = hi;
  g.spacing_ = (hi - lo) / (points - 1);
  return g;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(points_));
  for (int j = 0; j < points_; ++j) x[static_cast<std::size_t>(j)] = node(j);
  return x;
}

int Grid::nearest(double x) const {
  const int j = static_cast<int>(std::lround((x - lo_) / spacing_));
  return std::clamp(j, 0, points_ - 1);
}

std::vector<double> Grid::weights() const {
  std::vector<double> w(static_cast<std::size_t>(points_), spacing_);
  if (boundary_ != Boundary::kPeriodic) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

Field Grid::sample(const std::function<double(double)>& f) const {
  Field v(static_cast<std::size_t>(points_));
  for (int j = 0; j < points_; ++j) v[static_cast<std::size_t>(j)] = f(node(j));
  return v;
}

double Grid::integrate(std::span<const double> values) const {
  if (values.size() != static_cast<std::size_t>(points_)) throw DimensionMismatch("field size does not match grid");
  const auto w = weights();
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += w[j] * values[j];
  return s;
}

double Grid::norm2(std::span<const double> values) const {
  if (values.size() != static_cast<std::size_t>(points_)) throw DimensionMismatch("field size does not match grid");
  const auto w = weights();
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += w[j] * values[j] * values[j];
  return s;
}

std::size_t OperatorSpec::channels() const {
  if (is_constant()) return constant().sigma.size();
  return variable().sigma.size();
}

void OperatorSpec::validate() const {
  if (is_constant()) {
    const auto& c = constant();
    if (c.sigma.size() != c.nu.size()) throw std::invalid_argument("sigma and nu must list the same number of channels");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(c.a) || !finite(c.b) || !finite(c.c) || !std::all_of(c.sigma.begin(), c.sigma.end(), finite) ||
        !std::all_of(c.nu.begin(), c.nu.end(), finite)) {
      throw std::invalid_argument("operator coefficients must be finite");
    }
    return;
  }
  const auto& v = variable();
  if (v.sigma.size() != v.nu.size()) throw std::invalid_argument("sigma and nu must list the same number of channels");
  if (!v.a || !v.b || !v.c) throw std::invalid_argument("variable coefficients a, b, c must all be set");
  for (std::size_t k = 0; k < v.sigma.size(); ++k) {
    if (!v.sigma[k] || !v.nu[k]) throw std::invalid_argument("missing sigma/nu coefficient for a channel");
  }
}

std::shared_ptr<const Discretization> make_discretization(const Grid& grid, const OperatorSpec& op) {
  if (grid.boundary() == Boundary::kPeriodic) return make_spectral(grid, op);
  return make_finite_difference(grid, op);
}

Field apply_A(const Discretization& d, std::span<const double> u) {
  State out;
  d.apply_A(d.encode(u), out);
  return d.decode(out);
}

Field apply_Mk(const Discretization& d, std::size_t k, std::span<const double> u) {
  if (k >= d.channels()) throw std::out_of_range("channel index out of range");
  State out;
  d.apply_M(k, d.encode(u), out);
  return d.decode(out);
}

Field imex_step(const Discretization& d, std::span<const double> u, double dt, std::span<const double> source) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const State u0 = d.encode(u);
  State half = d.encode(source);
  for (double& v : half) v *= 0.5 * dt;
  State u1;
  d.stepper(dt)->advance(u0, half, half, u1);
  return d.decode(u1);
}

std::complex<double> symbol_A(const ConstantCoefficients& c, double y) {
  return {-c.a * y * y + c.c, c.b * y};
}

std::complex<double> symbol_M(const ConstantCoefficients& c, std::size_t k, double y) {
  return {c.nu.at(k), c.sigma.at(k) * y};
}

std::string to_string(Parabolicity p) {
  switch (p) {
    case Parabolicity::kStrong: return "strong";
    case Parabolicity::kWeak: return "weak";
    case Parabolicity::kNonParabolic: return "non-parabolic";
  }
  return "unknown";
}

namespace {

double q_at(std::span<const double> q, std::size_t k) { return k < q.size() ? q[k] : 1.0; }

Parabolicity classify(double eps) {
  if (std::abs(eps) <= 1e-12) return Parabolicity::kWeak;
  return eps > 0.0 ? Parabolicity::kStrong : Parabolicity::kNonParabolic;
}

}  // namespace

ParabolicityReport parabolicity_report(const OperatorSpec& op, std::span<const double> q, const Grid* grid) {
  op.validate();
  ParabolicityReport r;
  if (op.is_constant()) {
    const auto& c = op.constant();
    double eps = 2.0 * c.a;
    for (std::size_t k = 0; k < c.sigma.size(); ++k) eps -= q_at(q, k) * q_at(q, k) * c.sigma[k] * c.sigma[k];
    r.epsilon = eps;
  } else {
    if (grid == nullptr) throw std::invalid_argument("variable-coefficient parabolicity needs a grid");
    const auto& v = op.variable();
    double eps = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid->points(); ++j) {
      const double x = grid->node(j);
      double e = 2.0 * v.a(x);
      for (std::size_t k = 0; k < v.sigma.size(); ++k) {
        const double s = v.sigma[k](x);
        e -= q_at(q, k) * q_at(q, k) * s * s;
      }
      eps = std::min(eps, e);
    }
    r.epsilon = eps;
  }
  r.classification = classify(r.epsilon);
  return r;
}

double boundary_mass_fraction(const Grid& grid, std::span<const double> values, int cells) {
  const double total = grid.norm2(values);
  if (total <= 0.0) return 0.0;
  const auto w = grid.weights();
  const int n = grid.points();
  const int m = std::min(cells, n / 2);
  double edge = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto lo = static_cast<std::size_t>(j);
    const auto hi = static_cast<std::size_t>(n - 1 - j);
    edge += w[lo] * values[lo] * values[lo] + w[hi] * values[hi] * values[hi];
  }
  return edge / total;
}

}  // namespace wce
