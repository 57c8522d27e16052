#include "wce/oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "wce/chaos_field.hpp"

namespace wce {
namespace {

/// Golub-Welsch: nodes and weights from the Jacobi matrix of a three-term recurrence.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, int points, double mass) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(points, points);
  for (int j = 0; j + 1 < points; ++j) J(j, j + 1) = J(j + 1, j) = off_diagonal(j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule r;
  for (int j = 0; j < points; ++j) {
    r.nodes.push_back(es.eigenvalues()(j));
    const double v = es.eigenvectors()(0, j);
    r.weights.push_back(mass * v * v);
  }
  return r;
}

}  // namespace

QuadratureRule gauss_hermite(int points) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
  Eigen::VectorXd off(std::max(points - 1, 1));
  for (int j = 0; j + 1 < points; ++j) off(j) = std::sqrt(j + 1.0);
  return golub_welsch(off, points, 1.0);
}

QuadratureRule gauss_legendre(int points, double lo, double hi) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
  Eigen::VectorXd off(std::max(points - 1, 1));
  for (int j = 0; j + 1 < points; ++j) {
    const double n = j + 1.0;
    off(j) = n / std::sqrt(4.0 * n * n - 1.0);
  }
  QuadratureRule r = golub_welsch(off, points, 2.0);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (auto& x : r.nodes) x = mid + half * x;
  for (auto& w : r.weights) w *= half;
  return r;
}

double gh_expectation(const std::function<double(const SlotMatrix&)>& f, const QuadratureSpec& spec) {
  int max_i = 1, max_k = 1;
  for (const auto& s : spec.slots) {
    max_i = std::max(max_i, s.i);
    max_k = std::max(max_k, s.k);
  }
  const QuadratureRule rule = gauss_hermite(spec.nodes_per_slot);
  const std::size_t d = spec.slots.size();
  const std::size_t m = rule.nodes.size();
  SlotMatrix x(max_i, max_k);
  std::vector<std::size_t> counter(d, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      x(spec.slots[j].i, spec.slots[j].k) = rule.nodes[counter[j]];
      w *= rule.weights[counter[j]];
    }
    total += w * f(x);
    std::size_t j = 0;
    while (j < d && ++counter[j] == m) counter[j++] = 0;
    if (j == d) break;
  }
  return total;
}

Trajectory euler_maruyama(const SpdeProblem& problem, const SlotMatrix& coords, int fine_steps) {
  problem.validate();
  if (fine_steps < 1) throw std::invalid_argument("need at least one step");
  for (const auto& [alpha, _] : problem.initial) {
    if (!alpha.empty()) throw std::invalid_argument("Euler-Maruyama needs adapted (deterministic) initial data");
  }
  const Discretization& d = *problem.space;
  const double T = problem.time.horizon;
  const double h = T / fine_steps;
  const TimeBasis basis = problem.basis();
  const std::size_t channels = static_cast<std::size_t>(problem.trunc.channels);
  auto at = [&](const ChaosMap<TimeFunction>& m, double t) {
    auto it = m.find(MultiIndex{});
    return it == m.end() ? d.zeros() : d.encode(it->second(t));
  };

  State u = d.zeros();
  if (auto it = problem.initial.find(MultiIndex{}); it != problem.initial.end()) u = d.encode(it->second);
  const auto stepper = d.stepper(h);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.fields.push_back(d.decode(u));
  std::vector<double> w_prev(channels, 0.0);
  State scratch;
  for (int s = 0; s < fine_steps; ++s) {
    const double t0 = s * h, t1 = (s + 1 == fine_steps) ? T : (s + 1) * h;
    State early = at(problem.drift, t0), late = at(problem.drift, t1);
    for (double& v : early) v *= 0.5 * h;
    for (double& v : late) v *= 0.5 * h;
    for (std::size_t k = 0; k < channels; ++k) {
      const double w1 = path_from_coords(coords, basis, static_cast<int>(k) + 1, t1);
      const double dW = w1 - w_prev[k];
      w_prev[k] = w1;
      d.apply_M(k, u, scratch);
      if (k < problem.noise.size()) {
        const State g = at(problem.noise[k], t0);
        for (std::size_t j = 0; j < scratch.size(); ++j) scratch[j] += g[j];
      }
      for (std::size_t j = 0; j < early.size(); ++j) early[j] += dW * scratch[j];
    }
    State next;
    stepper->advance(u, early, late, next);
    for (double v : next) {
      if (!std::isfinite(v)) throw NumericalInstability(MultiIndex{}, s + 1);
    }
    u = std::move(next);
    traj.times.push_back(t1);
    traj.fields.push_back(d.decode(u));
  }
  return traj;
}

std::complex<double> exact_mode_solution(double a, double b, double sigma, double y, double t, double w,
                                         std::complex<double> u0hat) {
  const std::complex<double> exponent((-a * y * y + 0.5 * sigma * sigma * y * y) * t, b * y * t + sigma * y * w);
  return u0hat * std::exp(exponent);
}

double gaussian_level_energy(double a, double sigma, double t, int n, double width) {
  const double s2 = width * width;
  const double kappa = 2.0 * a * t + s2;
  double log_v = std::lgamma(n + 0.5) - (n + 0.5) * std::log(kappa) + std::log(s2) - log_factorial(n);
  if (n > 0) log_v += n * std::log(sigma * sigma * t);
  return std::exp(log_v);
}

double spectral_level_energy(double a, double sigma, double t, int n, const std::function<double(double)>& density,
                             double cutoff) {
  const int panels = 400;
  const QuadratureRule rule = gauss_legendre(12);
  const double width = 2.0 * cutoff / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = -cutoff + p * width;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double y = lo + 0.5 * width * (rule.nodes[q] + 1.0);
      s += 0.5 * width * rule.weights[q] * std::pow(y, 2 * n) * std::exp(-2.0 * a * y * y * t) * density(y);
    }
  }
  return std::exp(n * std::log(sigma * sigma * t) - log_factorial(n)) * s;
}

KalmanPath kalman_bucy(const LinearGaussianModel& model, const std::vector<double>& times, const std::vector<double>& y) {
  if (times.size() != y.size() || times.empty()) throw std::invalid_argument("observation times and values differ in length");
  KalmanPath k;
  k.times = times;
  k.mean.push_back(model.m0);
  k.variance.push_back(model.p0);
  auto riccati = [&](double p) { return 2.0 * model.beta * p + model.sigma * model.sigma - model.c * model.c * p * p; };
  for (std::size_t s = 0; s + 1 < times.size(); ++s) {
    const double dt = times[s + 1] - times[s];
    const double m = k.mean.back(), p = k.variance.back();
    const double dy = y[s + 1] - y[s];
    // Euler step for the mean with the gain evaluated at the left end.
    const double m_next = m + model.beta * m * dt + p * model.c * (dy - model.c * m * dt);
    const double k1 = riccati(p), k2 = riccati(p + 0.5 * dt * k1), k3 = riccati(p + 0.5 * dt * k2),
                 k4 = riccati(p + dt * k3);
    k.mean.push_back(m_next);
    k.variance.push_back(p + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
  }
  return k;
}

double riccati_fixed_point(const LinearGaussianModel& model) {
  const double c2 = model.c * model.c;
  if (c2 == 0.0) throw std::invalid_argument("no fixed point without observations");
  return (model.beta + std::sqrt(model.beta * model.beta + c2 * model.sigma * model.sigma)) / c2;
}

double kv_check(const PropagatorSolution& sol, const std::function<double(double)>& u0, double t,
                const SlotMatrix& coords) {
  const auto& op = sol.space().spec();
  if (!op.is_constant() || op.channels() != 1) throw std::invalid_argument("kv_check needs one constant-coefficient channel");
  const auto& c = op.constant();
  const double sigma = c.sigma[0];
  if (std::abs(c.a - 0.5 * sigma * sigma) > 1e-14 * std::max(1.0, c.a) || c.c != 0.0 || c.nu[0] != 0.0) {
    throw std::invalid_argument("kv_check requires a = sigma^2 / 2 and no zero-order terms");
  }
  const double w = path_from_coords(coords, sol.basis(), 1, t);
  const Field chaos = sample_field(sol, coords, t);
  const Grid& g = sol.space().grid();
  Field diff(chaos.size());
  for (int j = 0; j < g.points(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    diff[jj] = chaos[jj] - u0(g.node(j) + c.b * t + sigma * w);
  }
  return std::sqrt(g.norm2(diff));
}

}  // namespace wce
