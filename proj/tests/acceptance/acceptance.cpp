// Acceptance gate: one PASS/FAIL line per criterion.
//   wce_acceptance            runs all twelve
//   wce_acceptance 3 7        runs a subset
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "wce/basis.hpp"
#include "wce/chaos_field.hpp"
#include "wce/filtering.hpp"
#include "wce/multiindex.hpp"
#include "wce/oracle.hpp"
#include "wce/propagator.hpp"
#include "wce/spatial.hpp"

using namespace wce;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double gaussian(double x, double s = 1.0) { return std::exp(-x * x / (2.0 * s * s)); }

double max_abs(const State& s) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

// Constant-coefficient heat problem with one time mode, evaluated at the horizon:
// M_i(T) = 0 for i > 1, so with commuting operators only alpha = k e_1 survive at T.
PropagatorSolution horizon_solve(const ConstantCoefficients& c, double T, int N, int steps, double width = 1.0,
                                 int points = 256, double length = 40.0) {
  const Grid g = Grid::periodic(length, points);
  auto d = make_spectral(g, {c});
  auto p = SpdeProblem::deterministic(d, {N, 1, 1}, {T, steps}, g.sample([&](double x) { return gaussian(x, width); }));
  return solve(p);
}

// ---------------------------------------------------------------------------

Outcome exact_transport() {
  Stopwatch sw;
  ConstantCoefficients c;
  c.sigma = {1.0};
  c.nu = {0.0};
  // u0 = x is not periodic; one-sided closures at the ends reproduce linear data exactly.
  const Grid g = Grid::interval(-1.0, 1.0, 21, Boundary::kExtrapolate);
  auto d = make_finite_difference(g, {c});
  auto p = SpdeProblem::deterministic(d, {3, 16, 1}, {1.0, 1000}, g.sample([](double x) { return x; }));
  p.snapshot_every(250);
  const auto sol = solve(p);

  double high = 0.0;
  for (std::size_t s = 0; s < sol.snapshot_count(); ++s) {
    for (std::size_t a = 0; a < sol.indices().size(); ++a) {
      if (sol.indices()[a].order() > 1) high = std::max(high, std::sqrt(d->norm2(sol.state(s, a))));
    }
  }
  double sample_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto co = GaussianCoordinates::sample(16, 1, seed);
    for (double t : sol.times()) {
      const Field f = sample_field(sol, co, t);
      const double w = path_from_coords(co.xi, sol.basis(), 1, t);
      for (int j = 0; j < g.points(); ++j) {
        sample_err = std::max(sample_err, std::abs(f[static_cast<std::size_t>(j)] - g.node(j) - w));
      }
    }
  }
  const double secs = sw.seconds();
  return {high <= 1e-10 && sample_err <= 1e-8 && secs < 5.0,
          fmt::format("max ||u_a||, |a|>1 = {:.2e} (<= 1e-10); max |sample - x - w| = {:.2e} (<= 1e-8); {:.2f} s (< 5)",
                      high, sample_err, secs)};
}

Outcome anticipating() {
  Stopwatch sw;
  const double T = 1.0;
  const int n = 4;
  ConstantCoefficients c;
  c.a = 0.5;
  c.sigma = {1.0};
  c.nu = {0.0};
  const Grid g = Grid::interval(-1.0, 1.0, 21, Boundary::kExtrapolate);
  auto d = make_finite_difference(g, {c});
  SpdeProblem p;
  p.space = d;
  p.trunc = {3, n, 1};
  p.time = {T, 10000};
  p.initial[MultiIndex::unit(1)] = g.sample([&](double x) { return std::sqrt(T) * x * x; });
  p.snapshot_every(500);
  const auto sol = solve(p);

  const TimeBasis b(T, n);
  auto M = [&](int i, double t) { return b.antiderivative(i, t); };
  auto closed_form = [&](const MultiIndex& al, double t, double x) {
    const int o = al.order(), a1 = al.at(1, 1);
    std::vector<int> others;
    for (const auto& [slot, power] : al.entries()) {
      for (int q = 0; q < power && slot.i > 1; ++q) others.push_back(slot.i);
    }
    if (a1 == 0) return 0.0;
    if (o == 1) return (t + x * x) * std::sqrt(T);
    if (o == 2 && a1 == 2) return 2.0 * std::sqrt(2.0) * x * t;
    if (o == 2) return 2.0 * std::sqrt(T) * x * M(others[0], t);
    if (o == 3 && a1 == 3) return std::sqrt(6.0 / T) * t * t;
    if (o == 3 && a1 == 2) return 2.0 * std::sqrt(2.0 * T) * M(1, t) * M(others[0], t);
    if (o == 3 && others[0] == others[1]) return std::sqrt(2.0 * T) * M(others[0], t) * M(others[0], t);
    return 2.0 * std::sqrt(T) * M(others[0], t) * M(others[1], t);
  };
  double worst_rel = 0.0, worst_zero = 0.0;
  int families = 0;
  for (std::size_t a = 0; a < sol.indices().size(); ++a) {
    const auto& al = sol.indices()[a];
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < sol.snapshot_count(); ++s) {
      const double t = sol.times()[s];
      const Field u = d->decode(sol.state(s, a));
      for (int j = 0; j < g.points(); ++j) {
        const double ex = closed_form(al, t, g.node(j));
        num = std::max(num, std::abs(u[static_cast<std::size_t>(j)] - ex));
        den = std::max(den, std::abs(ex));
      }
    }
    if (den > 0.0) {
      worst_rel = std::max(worst_rel, num / den);
      ++families;
    } else {
      worst_zero = std::max(worst_zero, num);
    }
  }
  const double secs = sw.seconds();
  return {worst_rel <= 1e-6 && worst_zero <= 1e-6 && secs < 30.0,
          fmt::format("{} nonzero coefficients, worst relative error {:.2e} (<= 1e-6); vanishing ones <= {:.1e}; {:.2f} s",
                      families, worst_rel, worst_zero, secs)};
}

Outcome level_energy_closed_form() {
  Stopwatch sw;
  ConstantCoefficients c;
  c.a = 0.5;
  c.sigma = {1.0};
  c.nu = {0.0};
  double worst = 0.0, worst_closed = 0.0;
  for (double t : {0.25, 1.0}) {
    const auto sol = horizon_solve(c, t, 6, 2000);
    for (int n = 0; n <= 6; ++n) {
      const double F = level_energy(sol, n, t);
      // |u0hat|^2 / (2 pi) for u0 = exp(-x^2 / 2).
      const double oracle = spectral_level_energy(0.5, 1.0, t, n, [](double y) { return std::exp(-y * y); }, 12.0);
      worst = std::max(worst, std::abs(F / oracle - 1.0));
      worst_closed = std::max(worst_closed, std::abs(oracle / gaussian_level_energy(0.5, 1.0, t, n) - 1.0));
    }
  }
  const double secs = sw.seconds();
  return {worst <= 1e-4 && secs < 30.0,
          fmt::format("worst relative error {:.2e} (<= 1e-4) over n <= 6, t in {{0.25, 1}}; quadrature vs Gamma form {:.1e}; {:.2f} s",
                      worst, worst_closed, secs)};
}

Outcome convergence_rates() {
  ConstantCoefficients c;
  c.a = 1.0;
  c.sigma = {1.0};
  c.nu = {0.0};
  double worst_ratio = 0.0, b = 0.0, bound = 0.0;
  bool ok = true;
  for (double t : {0.5, 1.0}) {
    const auto sol = horizon_solve(c, t, 9, 2000);
    const auto rep = convergence_report(sol, t);
    b = rep.b;
    bound = rep.geometric_bound;
    ok = ok && rep.classification == Parabolicity::kStrong && std::abs(rep.b - 1.0) < 1e-12;
    for (const auto& row : rep.rows) {
      if (row.n > 8) continue;
      worst_ratio = std::max(worst_ratio, row.ratio);
      ok = ok && row.ratio <= rep.geometric_bound;
    }
  }
  // Factorial bound: sigma = 0, nu = (nu_1), zero-order term c.
  ConstantCoefficients f;
  f.a = 1.0;
  f.c = 0.25;
  f.sigma = {0.0};
  f.nu = {1.2};
  double worst_fact = 0.0;
  for (double t : {0.5, 1.0}) {
    const auto sol = horizon_solve(f, t, 8, 2000);
    const auto rep = convergence_report(sol, t);
    for (const auto& row : rep.rows) {
      worst_fact = std::max(worst_fact, row.energy / row.factorial_bound);
      ok = ok && std::isfinite(row.factorial_bound) && row.energy <= row.factorial_bound;
    }
  }
  return {ok, fmt::format("b = {:.3f}, max F_(n+1)/F_n = {:.4f} (<= {:.3f}); max F_n / factorial bound = {:.4f} (<= 1)",
                          b, worst_ratio, bound, worst_fact)};
}

Outcome energy_conservation() {
  ConstantCoefficients c;
  c.a = 0.5;
  c.sigma = {1.0};
  c.nu = {0.0};
  const auto sol = horizon_solve(c, 1.0, 20, 2000);
  const auto rep = convergence_report(sol, 1.0);
  double partial = 0.0, prev = -1.0;
  bool monotone = true;
  for (const auto& row : rep.rows) {
    partial += row.energy;
    monotone = monotone && partial >= prev;
    prev = partial;
  }
  const double frac = partial / rep.initial_energy;
  return {monotone && frac >= 0.999,
          fmt::format("partial sums nondecreasing: {}; sum_(n<=20) F_n(1) / ||u0||^2 = {:.8f} (>= 0.999)",
                      monotone ? "yes" : "no", frac)};
}

Outcome moments() {
  Stopwatch sw;
  ConstantCoefficients c;
  c.a = 1.0;
  c.sigma = {0.5, 0.3};
  c.nu = {0.2, 0.4};
  const Grid g = Grid::periodic(20.0, 64);
  auto d = make_spectral(g, {c});
  auto p = SpdeProblem::deterministic(d, {3, 2, 2}, {1.0, 200}, g.sample([](double x) { return gaussian(x); }));
  const auto sol = solve(p);
  const auto& set = sol.indices();

  const std::vector<double> xs = {-1.0, 0.0, 1.5};
  std::vector<std::vector<double>> u;
  for (double x : xs) u.push_back(point_coefficients(sol, {1.0, x}));
  const QuadratureSpec spec{{{1, 1}, {1, 2}, {2, 1}, {2, 2}}, 7};
  auto theta = [&](std::size_t p, const SlotMatrix& x) {
    double v = 0.0;
    for (std::size_t a = 0; a < set.size(); ++a) v += u[p][a] * xi_alpha(set[a], x);
    return v;
  };
  double worst = 0.0;
  int checked = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double m3 = third_moment(set, u[i], u[j], u[k]);
        const double o3 = gh_expectation([&](const SlotMatrix& x) { return theta(i, x) * theta(j, x) * theta(k, x); }, spec);
        worst = std::max(worst, std::abs(m3 - o3) / std::max(1.0, std::abs(o3)));
        ++checked;
        for (std::size_t l = 0; l < 3; ++l) {
          const double m4 = fourth_moment(set, u[i], u[j], u[k], u[l]);
          const double o4 = gh_expectation(
              [&](const SlotMatrix& x) { return theta(i, x) * theta(j, x) * theta(k, x) * theta(l, x); }, spec);
          worst = std::max(worst, std::abs(m4 - o4) / std::max(1.0, std::abs(o4)));
          ++checked;
        }
      }
    }
  }
  const double secs = sw.seconds();
  return {worst <= 1e-10 && secs < 10.0,
          fmt::format("{} third/fourth moments, worst deviation from Gauss-Hermite {:.2e} (<= 1e-10); {:.2f} s",
                      checked, worst, secs)};
}

Outcome s_transform_duality() {
  ConstantCoefficients c;
  c.a = 5.0;
  c.sigma = {3.0};
  c.nu = {0.0};
  const Grid g = Grid::periodic(40.0, 256);
  auto d = make_spectral(g, {c});
  TestDirection h{SlotMatrix(2, 1)};
  h.h(1, 1) = 0.19;
  h.h(2, 1) = 0.06;
  std::vector<double> res;
  for (int N : {4, 6, 8, 10}) {
    auto p = SpdeProblem::deterministic(d, {N, 2, 1}, {1.0, 1000}, g.sample([](double x) { return gaussian(x); }));
    res.push_back(s_check(p, solve(p), h).residual);
  }
  bool decreasing = true;
  for (std::size_t j = 1; j < res.size(); ++j) decreasing = decreasing && res[j] < res[j - 1];
  return {std::sqrt(h.squared_norm()) <= 0.2 && res.back() <= 1e-5 && decreasing,
          fmt::format("||h|| = {:.4f}; residuals N=4,6,8,10: {:.3e} {:.3e} {:.3e} {:.3e} (last <= 1e-5, decreasing: {})",
                      std::sqrt(h.squared_norm()), res[0], res[1], res[2], res[3], decreasing ? "yes" : "no")};
}

Outcome q_equivariance() {
  auto make = [](double q) {
    ConstantCoefficients c;
    c.a = 1.0;
    c.sigma = {0.4 * q, 0.3 * q};
    c.nu = {0.2 * q, -0.1 * q};
    return c;
  };
  const Grid g = Grid::periodic(20.0, 64);
  auto run = [&](double q) {
    auto d = make_spectral(g, {make(q)});
    auto p = SpdeProblem::deterministic(d, {4, 2, 2}, {0.5, 500}, g.sample([](double x) { return gaussian(x); }));
    return solve(p);
  };
  const auto base = run(1.0);
  double worst = 0.0;
  for (double q : {0.5, 2.0}) {
    const auto scaled = run(q);
    const auto weighted = apply_weights(base, WeightSequence{QWeights{{q, q}}});
    double diff = 0.0, scale = 0.0;
    for (std::size_t s = 0; s < base.snapshot_count(); ++s) {
      for (std::size_t a = 0; a < base.indices().size(); ++a) {
        State e = scaled.state(s, a);
        const State& w = weighted.state(s, a);
        for (std::size_t j = 0; j < e.size(); ++j) e[j] -= w[j];
        diff = std::max(diff, max_abs(e));
        scale = std::max(scale, max_abs(w));
      }
    }
    worst = std::max(worst, diff / scale);
  }
  return {worst <= 1e-12, fmt::format("max |u^(q)_a - q^a u_a| / max |q^a u_a| = {:.2e} over q in {{0.5, 2}} (<= 1e-12)", worst)};
}

Outcome krylov_veretennikov() {
  const double T = 0.5;
  ConstantCoefficients c;
  c.a = 0.5;
  c.b = 0.3;
  c.sigma = {1.0};
  c.nu = {0.0};
  const Grid g = Grid::periodic(40.0, 512);
  auto d = make_spectral(g, {c});
  auto u0 = [](double x) { return gaussian(x); };

  // Time modes beyond the first vanish at the horizon; confirm on a small solve.
  auto wide = SpdeProblem::deterministic(d, {3, 8, 1}, {T, 2000}, g.sample(u0));
  const auto wsol = solve(wide);
  double beyond = 0.0, scale = 0.0;
  for (std::size_t a = 0; a < wsol.indices().size(); ++a) {
    double& slot = wsol.indices()[a].max_time_mode() > 1 ? beyond : scale;
    slot = std::max(slot, std::sqrt(d->norm2(wsol.state(1, a))));
  }

  std::vector<double> d12, d16;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto co = GaussianCoordinates::sample(32, 1, seed);
    SlotMatrix first(1, 1);
    first(1, 1) = co.xi(1, 1);
    for (int N : {12, 16}) {
      auto p = SpdeProblem::deterministic(d, {N, 1, 1}, {T, 2000}, g.sample(u0));
      (N == 12 ? d12 : d16).push_back(kv_check(solve(p), u0, T, first));
    }
  }
  const double worst12 = *std::max_element(d12.begin(), d12.end());
  double lo = 1e300, hi = 0.0;
  for (std::size_t j = 0; j < d12.size(); ++j) {
    lo = std::min(lo, d16[j] / d12[j]);
    hi = std::max(hi, d16[j] / d12[j]);
  }
  const bool small = worst12 <= 1e-3, halves = lo >= 0.4 && hi <= 0.6, reduced = beyond <= 1e-6 * scale;
  return {small && halves && reduced,
          fmt::format("discrepancy at N=12: max {:.2e} (<= 1e-3: {}); ratio N=16/N=12 in [{:.3f}, {:.3f}] (required 0.5 +- 20%: {}); "
                      "modes > 1 at T: {:.1e} of scale",
                      worst12, small ? "yes" : "no", lo, hi, halves ? "yes" : "no", beyond / scale)};
}

Outcome first_order_identity() {
  ConstantCoefficients c;
  c.sigma = {1.0};
  c.nu = {0.0};
  const Grid g = Grid::periodic(40.0, 256);
  auto d = make_spectral(g, {c});
  // C_phi(k) = ||phi^(k)||^2 by repeated spectral differentiation.
  std::vector<double> C;
  State v = d->encode(g.sample([](double x) { return gaussian(x); }));
  for (int k = 0; k <= 6; ++k) {
    C.push_back(d->norm2(v));
    State next;
    d->apply_M(0, v, next);
    v = std::move(next);
  }
  double worst = 0.0, worst_gamma = 0.0;
  for (double t : {0.5, 1.0}) {
    const auto sol = horizon_solve(c, t, 6, 2000);
    for (int k = 0; k <= 6; ++k) {
      const double expect = std::pow(t, k) * C[static_cast<std::size_t>(k)] / std::exp(log_factorial(k));
      worst = std::max(worst, std::abs(level_energy(sol, k, t) / expect - 1.0));
    }
  }
  for (int k = 0; k <= 6; ++k) worst_gamma = std::max(worst_gamma, std::abs(C[static_cast<std::size_t>(k)] / std::tgamma(k + 0.5) - 1.0));
  return {worst <= 1e-4, fmt::format("worst relative error {:.2e} (<= 1e-4) for k <= 6, t in {{0.5, 1}}; C_phi vs Gamma(k+1/2) {:.1e}",
                                     worst, worst_gamma)};
}

Outcome filtering() {
  Stopwatch sw;
  const double L = 3.0, T = 0.5;
  const double beta = -1.0, sigma = 0.5, c = 1.0 / L, m0 = 0.0, p0 = 0.25;
  const auto model = FilterModel::linear_gaussian(beta, sigma, c, m0, p0);
  const Grid g = Grid::interval(-L, L, 61, Boundary::kDirichlet);
  const TimeGrid time{T, 500};
  const double hT = model.observation_bound(g) * T;

  // (a) N-ladder against a reference truncation, Y a Wiener process.
  const auto rows = truncation_error_study(model, time, g, {7, 4, 1}, {{1, 4, 1}, {2, 4, 1}, {3, 4, 1}, {4, 4, 1}}, 200, 11);
  bool a_ok = hT <= 0.5;
  std::string a_txt;
  for (std::size_t l = 1; l < rows.size(); ++l) {
    const double bound = 2.0 * rows[l - 1].bound_ratio;
    a_ok = a_ok && rows[l].ratio <= bound;
    a_txt += fmt::format(" N={}->{}: {:.2e} (<= {:.3f})", rows[l - 1].max_order, rows[l].max_order, rows[l].ratio, bound);
  }

  // (b) time-mode ladder at N = 4. Reference level energies: levels 0-2 from a
  // solve with 128 modes; levels 3-4 (tails below 1e-12) from the N = 4 solve itself.
  const auto sol = zakai_solve(model, {4, 32, 1}, time, g);
  const auto ref2 = zakai_solve(model, {2, 128, 1}, time, g);
  std::vector<double> reference;
  for (int k = 0; k <= 4; ++k) reference.push_back(level_energy(k <= 2 ? ref2 : sol, k, T));
  const auto study = time_mode_error_study(sol, reference, {8, 16, 32});
  const bool b_ok = study.fit_r_squared > 0.9;

  // (c) posterior mean against Kalman-Bucy.
  const LinearGaussianModel lg{beta, sigma, c, m0, p0};
  double se = 0.0, pT = 0.0;
  const int paths = 50;
  for (int r = 0; r < paths; ++r) {
    const auto path = simulate(model, T, 5000, 1000 + static_cast<std::uint64_t>(r));
    const auto kb = kalman_bucy(lg, path.times, path.observations[0]);
    const auto est = estimate(sol, ObservationRecord(path), [](double x) { return x; }, T);
    se += (est.normalized - kb.mean.back()) * (est.normalized - kb.mean.back());
    pT = kb.variance.back();
  }
  const double rmse = std::sqrt(se / paths);
  const bool c_ok = rmse <= 0.05 * std::sqrt(pT);
  const double secs = sw.seconds();

  return {a_ok && b_ok && c_ok && secs < 600.0,
          fmt::format("h_inf T = {:.2f}; (a) {}:{}; (b) {}: errors n=8,16,32 {:.3e} {:.3e} {:.3e}, c/n fit R^2 = {:.3f} (> 0.9); "
                      "(c) {}: RMSE {:.2e} = {:.2e} of sqrt(P_T); {:.1f} s",
                      hT, a_ok ? "ok" : "FAILED", a_txt, b_ok ? "ok" : "FAILED", study.rows[0].error, study.rows[1].error,
                      study.rows[2].error, study.fit_r_squared, c_ok ? "ok" : "FAILED", rmse, rmse / std::sqrt(pT), secs)};
}

Outcome basis_suites() {
  const std::vector<Slot> slots = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  const auto set3 = enumerate({3, 2, 2});
  double ortho = 0.0;
  for (std::size_t a = 0; a < set3.size(); ++a) {
    for (std::size_t b = a; b < set3.size(); ++b) {
      const double e = gh_expectation(
          [&](const SlotMatrix& x) { return xi_alpha(set3[a], x) * xi_alpha(set3[b], x); }, {slots, 5});
      ortho = std::max(ortho, std::abs(e - (a == b ? 1.0 : 0.0)));
    }
  }
  const auto set4 = enumerate({4, 2, 2});
  double product = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto x = GaussianCoordinates::sample(2, 2, seed).xi;
    std::vector<double> xi(set4.size());
    for (std::size_t a = 0; a < set4.size(); ++a) xi[a] = xi_alpha(set4[a], x);
    for (std::size_t a = 0; a < set4.size(); ++a) {
      for (std::size_t b = 0; b < set4.size(); ++b) {
        double rhs = 0.0;
        for (const auto& term : product_expand(set4[a], set4[b])) rhs += term.coefficient * xi_alpha(term.index, x);
        const double lhs = xi[a] * xi[b];
        product = std::max(product, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
  }
  return {ortho <= 1e-12 && product <= 1e-10,
          fmt::format("{} indices of order <= 3: max |E xi_a xi_b - delta| = {:.1e} (<= 1e-12); "
                      "{} pairs of order <= 4: product reconstruction {:.1e} (<= 1e-10)",
                      set3.size(), ortho, set4.size() * set4.size(), product)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "exact transport", exact_transport},
      {2, "anticipating equation", anticipating},
      {3, "per-level energy", level_energy_closed_form},
      {4, "convergence rates", convergence_rates},
      {5, "degenerate energy conservation", energy_conservation},
      {6, "moment combinatorics", moments},
      {7, "S-transform duality", s_transform_duality},
      {8, "Q-equivariance", q_equivariance},
      {9, "Krylov-Veretennikov", krylov_veretennikov},
      {10, "first-order level identity", first_order_identity},
      {11, "filtering", filtering},
      {12, "orthonormality and products", basis_suites},
  };
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failures;
    fmt::print("criterion {:2d} {:<32} {}  {}\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
