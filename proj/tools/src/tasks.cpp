#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/core.h>

#include "wce/basis.hpp"
#include "wce/chaos_field.hpp"
#include "wce/filtering.hpp"
#include "wce/oracle.hpp"
#include "wce/propagator.hpp"
#include "wce_cli/app.hpp"

namespace wce::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string indexed(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

// Time-grid steps of the requested times; every time must be a grid node.
std::vector<int> steps_of(const std::vector<double>& times, const TimeGrid& grid, const std::string& key) {
  std::vector<int> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = times[i] / grid.dt();
    const long long r = std::llround(s);
    if (std::abs(s - static_cast<double>(r)) > 1e-9 * grid.steps) {
      throw ConfigError(indexed(key, i), "not a node of the time grid (dt = " + fmt::format("{}", grid.dt()) + ")");
    }
    out.push_back(static_cast<int>(r));
  }
  return out;
}

void add_snapshots(std::vector<int>& snapshots, const std::vector<int>& extra, int steps) {
  std::set<int> all(snapshots.begin(), snapshots.end());
  all.insert(0);
  all.insert(steps);
  all.insert(extra.begin(), extra.end());
  snapshots.assign(all.begin(), all.end());
}

std::vector<double> requested_times(const ExperimentConfig& c) {
  return c.options.times.empty() ? std::vector<double>{c.problem.time.horizon} : c.options.times;
}

// Edge-mass fraction of the root-mean-square field sqrt(sum_alpha u_alpha^2) at the horizon.
double largest_edge_mass(const PropagatorSolution& sol) {
  const std::size_t last = sol.snapshot_count() - 1;
  Field rms(static_cast<std::size_t>(sol.space().grid().points()), 0.0);
  for (std::size_t a = 0; a < sol.indices().size(); ++a) {
    const Field f = sol.space().decode(sol.state(last, a));
    for (std::size_t j = 0; j < rms.size(); ++j) rms[j] += f[j] * f[j];
  }
  for (double& v : rms) v = std::sqrt(v);
  return boundary_mass_fraction(sol.space().grid(), rms);
}

void scale_field(FieldSpec& f, double q) {
  if (f.kind == "gaussian") f.scale *= q;
  for (double& c : f.coefficients) c *= q;
}

// The weighted solution r_alpha u_alpha with r_alpha = q^alpha solves the same
// equation with sigma_k, nu_k and g_k scaled by q_k, so it is obtained directly.
ProblemConfig weighted(const ExperimentConfig& c) {
  ProblemConfig p = c.problem;
  const auto& q = c.options.weights;
  if (q.empty()) return p;
  if (q.size() != p.op.sigma.size()) throw ConfigError("options.weights", "needs one entry per noise channel");
  for (std::size_t k = 0; k < q.size(); ++k) {
    p.op.sigma[k] *= q[k];
    p.op.nu[k] *= q[k];
    if (k < p.noise.size()) scale_field(p.noise[k], q[k]);
  }
  for (auto& ci : p.initial_chaos) {
    for (const auto& t : ci.index) scale_field(ci.field, std::pow(q[static_cast<std::size_t>(t[1] - 1)], t[2]));
  }
  return p;
}

void require_constant(const ExperimentConfig& c) {
  if (c.problem.op.kind != "constant") {
    throw ConfigError("problem.operator.kind", "task '" + c.task + "' needs a constant-coefficient operator");
  }
}

void require_filter(const ExperimentConfig& c) {
  if (c.problem.op.kind != "linear_gaussian_filter") {
    throw ConfigError("problem.operator.kind", "task '" + c.task + "' needs operator kind 'linear_gaussian_filter'");
  }
}

// ---------------------------------------------------------------------------

// Closed forms for du = u''/2 dt + u' dw on an interval with u_(1,1)(0) = sqrt(T) x^2
// and all other initial coefficients zero.
double anticipating_closed_form(const MultiIndex& al, double t, double x, const TimeBasis& b) {
  const double T = b.horizon();
  auto M = [&](int i) { return b.antiderivative(i, t); };
  const int o = al.order(), a1 = al.at(1, 1);
  std::vector<int> others;
  for (const auto& [slot, power] : al.entries()) {
    if (slot.k != 1) return 0.0;
    for (int q = 0; q < power && slot.i > 1; ++q) others.push_back(slot.i);
  }
  if (a1 == 0 || o > 3) return 0.0;
  if (o == 1) return (t + x * x) * std::sqrt(T);
  if (o == 2 && a1 == 2) return 2.0 * std::sqrt(2.0) * x * t;
  if (o == 2) return 2.0 * std::sqrt(T) * x * M(others[0]);
  if (a1 == 3) return std::sqrt(6.0 / T) * t * t;
  if (a1 == 2) return 2.0 * std::sqrt(2.0 * T) * M(1) * M(others[0]);
  if (others[0] == others[1]) return std::sqrt(2.0 * T) * M(others[0]) * M(others[0]);
  return 2.0 * std::sqrt(T) * M(others[0]) * M(others[1]);
}

void require_anticipating_setup(const ExperimentConfig& c) {
  const auto& p = c.problem;
  const double T = p.time.horizon;
  const auto& op = p.op;
  bool ok = op.a == 0.5 && op.b == 0.0 && op.c == 0.0 && op.sigma == std::vector<double>{1.0} &&
            op.nu == std::vector<double>{0.0} && p.initial.kind == "zero" && p.drift.kind == "zero" &&
            p.initial_chaos.size() == 1 && p.domain.kind == "interval";
  for (const auto& g : p.noise) ok = ok && g.kind == "zero";
  if (ok) {
    const auto& ci = p.initial_chaos[0];
    const auto& cf = ci.field.coefficients;
    ok = ci.index.size() == 1 && ci.index[0] == std::array<int, 3>{1, 1, 1} && ci.field.kind == "polynomial" &&
         cf.size() == 3 && cf[0] == 0.0 && cf[1] == 0.0 && std::abs(cf[2] - std::sqrt(T)) <= 1e-12 * std::sqrt(T);
  }
  if (!ok) {
    throw ConfigError("options.check",
                      "'anticipating' needs a = 1/2, sigma = [1], nu = [0], b = c = 0, an interval domain and "
                      "a single initial_chaos entry [[1, 1, 1]] with polynomial [0, 0, sqrt(horizon)]");
  }
}

TaskResult task_solve(const ExperimentConfig& c) {
  require_constant(c);
  const auto& check = c.options.check;
  if (check == "anticipating") require_anticipating_setup(c);
  SpdeProblem p = make_problem(c.problem);
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const auto& d = sol.space();
  const auto& set = sol.indices();

  Table coeffs{"coefficients", {"t", "alpha", "order", "l2_norm", "max_abs"}, {}};
  for (std::size_t s = 0; s < sol.snapshot_count(); ++s) {
    for (std::size_t a = 0; a < set.size(); ++a) {
      const Field f = d.decode(sol.state(s, a));
      double m = 0.0;
      for (double v : f) m = std::max(m, std::abs(v));
      coeffs.rows.push_back({sol.times()[s], set[a].to_string(), static_cast<long long>(set[a].order()),
                             std::sqrt(d.norm2(sol.state(s, a))), m});
    }
  }
  r.tables.push_back(std::move(coeffs));
  r.report.push_back(fmt::format("{} coefficients, {} snapshots, solve {:.3f} s", set.size(), sol.snapshot_count(),
                                 r.solve_seconds));

  if (check != "none") {
    Table t{"check", {"alpha", "order", "error", "reference"}, {}};
    const double tol = c.options.check_tolerance;
    double worst = 0.0;
    const auto& g = d.grid();
    for (std::size_t a = 0; a < set.size(); ++a) {
      double err = 0.0, ref = 0.0;
      for (std::size_t s = 0; s < sol.snapshot_count(); ++s) {
        const Field f = d.decode(sol.state(s, a));
        for (int j = 0; j < g.points(); ++j) {
          const double v = f[static_cast<std::size_t>(j)];
          double ex = 0.0;
          if (check == "anticipating") ex = anticipating_closed_form(set[a], sol.times()[s], g.node(j), sol.basis());
          else if (set[a].order() <= 1) ex = v;  // transport: only levels above one must vanish
          err = std::max(err, std::abs(v - ex));
          ref = std::max(ref, std::abs(ex));
        }
      }
      const double e = ref > 0.0 ? err / ref : err;
      worst = std::max(worst, e);
      if (check == "anticipating" || set[a].order() > 1) {
        t.rows.push_back({set[a].to_string(), static_cast<long long>(set[a].order()), e, ref});
      }
    }
    r.check_passed = worst <= tol;
    r.report.push_back(fmt::format("check {}: worst {} {:.3e} (tolerance {:.1e}) -> {}", check,
                                   check == "transport" ? "max|u_a|, |a|>1," : "relative error", worst, tol,
                                   r.check_passed ? "PASS" : "FAIL"));
    r.tables.push_back(std::move(t));
  }
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_sample(const ExperimentConfig& c) {
  require_constant(c);
  SpdeProblem p = make_problem(c.problem);
  const auto times = requested_times(c);
  add_snapshots(p.snapshots, steps_of(times, p.time, "options.times"), p.time.steps);
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const auto& g = sol.space().grid();
  Table t{"samples", {"sample", "t", "x", "value"}, {}};
  for (int s = 0; s < c.options.samples; ++s) {
    const auto co = GaussianCoordinates::sample(p.trunc.time_modes, p.trunc.channels,
                                                derive_seed(c.seed, "sample/" + std::to_string(s)));
    for (double time : times) {
      const Field f = sample_field(sol, co, time);
      for (int j = 0; j < g.points(); ++j) {
        t.rows.push_back({static_cast<long long>(s), time, g.node(j), f[static_cast<std::size_t>(j)]});
      }
    }
  }
  r.tables.push_back(std::move(t));
  r.report.push_back(fmt::format("{} samples at {} times", c.options.samples, times.size()));
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_moments(const ExperimentConfig& c) {
  require_constant(c);
  const auto& pts = c.options.points;
  if (pts.empty() || pts.size() > 8) throw ConfigError("options.points", "expected 1 to 8 [t, x] points");
  SpdeProblem p = make_problem(c.problem);
  std::vector<double> pt_times;
  for (const auto& q : pts) pt_times.push_back(q[0]);
  add_snapshots(p.snapshots, steps_of(pt_times, p.time, "options.points"), p.time.steps);

  const int slots = p.trunc.time_modes * p.trunc.channels;
  const int nodes = c.options.quadrature_nodes;
  const double evaluations = std::pow(static_cast<double>(nodes), slots);
  if (evaluations > 5e6) {
    throw ConfigError("options.quadrature_nodes",
                      fmt::format("{}^{} tensor nodes is too many; lower time_modes or the node count", nodes, slots));
  }
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const auto& set = sol.indices();
  std::vector<std::vector<double>> u;
  for (const auto& q : pts) u.push_back(point_coefficients(sol, {q[0], q[1]}));
  const std::size_t P = pts.size();

  // Non-decreasing tuples of point ids for orders 1-4.
  std::vector<std::vector<std::size_t>> tuples;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t from, int left) -> void {
    if (left == 0) {
      tuples.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < P; ++i) {
      cur.push_back(i);
      self(self, i, left - 1);
      cur.pop_back();
    }
  };
  for (int order = 1; order <= 4; ++order) rec(rec, 0, order);

  // One tensor Gauss-Hermite pass accumulates every tuple.
  const auto rule = gauss_hermite(nodes);
  std::vector<double> oracle(tuples.size(), 0.0);
  std::vector<int> odo(static_cast<std::size_t>(slots), 0);
  SlotMatrix x(p.trunc.time_modes, p.trunc.channels);
  std::vector<double> theta(P);
  for (;;) {
    double w = 1.0;
    for (int s = 0; s < slots; ++s) {
      const int i = s / p.trunc.channels + 1, k = s % p.trunc.channels + 1;
      x(i, k) = rule.nodes[static_cast<std::size_t>(odo[static_cast<std::size_t>(s)])];
      w *= rule.weights[static_cast<std::size_t>(odo[static_cast<std::size_t>(s)])];
    }
    std::fill(theta.begin(), theta.end(), 0.0);
    for (std::size_t a = 0; a < set.size(); ++a) {
      const double xi = xi_alpha(set[a], x);
      for (std::size_t q = 0; q < P; ++q) theta[q] += u[q][a] * xi;
    }
    for (std::size_t m = 0; m < tuples.size(); ++m) {
      double prod = w;
      for (std::size_t q : tuples[m]) prod *= theta[q];
      oracle[m] += prod;
    }
    int s = 0;
    while (s < slots && ++odo[static_cast<std::size_t>(s)] == nodes) odo[static_cast<std::size_t>(s++)] = 0;
    if (s == slots) break;
  }

  Table t{"moments", {"points", "order", "value", "oracle", "abs_diff"}, {}};
  double worst = 0.0;
  for (std::size_t m = 0; m < tuples.size(); ++m) {
    const auto& tu = tuples[m];
    double v = 0.0;
    switch (tu.size()) {
      case 1: v = u[tu[0]][0]; break;
      case 2:
        for (std::size_t a = 0; a < set.size(); ++a) v += u[tu[0]][a] * u[tu[1]][a];
        break;
      case 3: v = third_moment(set, u[tu[0]], u[tu[1]], u[tu[2]]); break;
      default: v = fourth_moment(set, u[tu[0]], u[tu[1]], u[tu[2]], u[tu[3]]); break;
    }
    std::string ids;
    for (std::size_t q : tu) ids += (ids.empty() ? "" : ";") + std::to_string(q);
    worst = std::max(worst, std::abs(v - oracle[m]));
    t.rows.push_back({ids, static_cast<long long>(tu.size()), v, oracle[m], std::abs(v - oracle[m])});
  }
  r.tables.push_back(std::move(t));
  r.report.push_back(fmt::format("{} moments, worst |value - oracle| {:.3e}", tuples.size(), worst));
  if (2 * nodes - 1 < 4 * p.trunc.max_order) {
    r.report.push_back(fmt::format("note: {} nodes per slot are exact only to degree {}; fourth moments need {}", nodes,
                                   2 * nodes - 1, 4 * p.trunc.max_order));
  }
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_energy(const ExperimentConfig& c) {
  require_constant(c);
  ProblemConfig pc = weighted(c);
  SpdeProblem p = make_problem(pc);
  const auto times = requested_times(c);
  add_snapshots(p.snapshots, steps_of(times, p.time, "options.times"), p.time.steps);
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  Table t{"energy", {"t", "n", "F_n", "bound"}, {}};
  for (double time : times) {
    const auto rep = convergence_report(sol, time);
    double worst_ratio = 0.0;
    for (const auto& row : rep.rows) {
      double bound = row.factorial_bound;
      if (!std::isfinite(bound)) {
        bound = std::isfinite(rep.geometric_bound) ? rep.initial_energy * std::pow(rep.geometric_bound, row.n) : kNaN;
      }
      t.rows.push_back({time, static_cast<long long>(row.n), row.energy, bound});
      if (std::isfinite(row.ratio)) worst_ratio = std::max(worst_ratio, row.ratio);
    }
    r.report.push_back(fmt::format("t = {}: {} (epsilon = {}), largest F_(n+1)/F_n = {:.4f}, 1/(1+b) = {:.4f}", time,
                                   to_string(rep.classification), rep.epsilon, worst_ratio, rep.geometric_bound));
  }
  r.tables.push_back(std::move(t));
  if (!c.options.weights.empty()) r.report.push_back("energies are for the weighted coefficients q^alpha u_alpha");
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_stransform(const ExperimentConfig& c) {
  require_constant(c);
  SpdeProblem p = make_problem(c.problem);
  const auto& h = c.options.h;
  if (h.size() != static_cast<std::size_t>(p.trunc.channels)) {
    throw ConfigError("options.h", "needs one array per noise channel");
  }
  TestDirection dir{SlotMatrix(p.trunc.time_modes, p.trunc.channels)};
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k].size() > static_cast<std::size_t>(p.trunc.time_modes)) {
      throw ConfigError(indexed("options.h", k), "more entries than time modes");
    }
    for (std::size_t i = 0; i < h[k].size(); ++i) dir.h(static_cast<int>(i) + 1, static_cast<int>(k) + 1) = h[k][i];
  }
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const auto res = s_check(p, sol, dir);
  const Field chaos = s_transform_field(sol, dir, p.time.horizon);
  const auto& g = sol.space().grid();
  Table t{"stransform", {"x", "chaos", "direct", "abs_diff"}, {}};
  for (int j = 0; j < g.points(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    t.rows.push_back({g.node(j), chaos[u], res.shifted[u], std::abs(chaos[u] - res.shifted[u])});
  }
  r.tables.push_back(std::move(t));
  r.report.push_back(fmt::format("||S u_N(h) - v_h|| = {:.3e}, ||v_h|| = {:.3e}", res.residual,
                                 res.shifted_norm));
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_convergence(const ExperimentConfig& c) {
  require_constant(c);
  std::vector<int> ladder = c.options.ladder;
  if (ladder.empty()) {
    for (int N = 0; N <= c.problem.max_order; ++N) ladder.push_back(N);
  }
  if (!std::is_sorted(ladder.begin(), ladder.end()) || std::adjacent_find(ladder.begin(), ladder.end()) != ladder.end()) {
    throw ConfigError("options.ladder", "must be strictly increasing");
  }
  const int ref = c.options.reference_order > 0 ? c.options.reference_order : ladder.back() + 2;
  if (ref <= ladder.back()) throw ConfigError("options.reference_order", "must exceed every ladder entry");
  ProblemConfig pc = c.problem;
  pc.max_order = ref;
  SpdeProblem p = make_problem(pc);
  Stopwatch sw;
  const auto sol = solve(p);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const double T = p.time.horizon;
  const auto rep = convergence_report(sol, T);
  Table t{"convergence", {"N", "error", "ratio", "theoretical_ratio"}, {}};
  double prev = kNaN;
  int prev_N = -1;
  for (int N : ladder) {
    double err = 0.0;
    for (int m = N + 1; m <= ref; ++m) err += rep.rows[static_cast<std::size_t>(m)].energy;
    const double ratio = prev_N < 0 ? kNaN : err / prev;
    const double theory = prev_N < 0 || !std::isfinite(rep.geometric_bound)
                              ? kNaN
                              : std::pow(rep.geometric_bound, N - prev_N);
    t.rows.push_back({static_cast<long long>(N), err, ratio, theory});
    prev = err;
    prev_N = N;
  }
  r.tables.push_back(std::move(t));
  r.report.push_back(fmt::format("error = sum of F_n(T) for N < n <= {}; {} (epsilon = {})", ref,
                                 to_string(rep.classification), rep.epsilon));
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_filter(const ExperimentConfig& c) {
  require_filter(c);
  const auto& pc = c.problem;
  const auto model = make_filter_model(pc.op);
  const Grid grid = make_grid(pc);
  const TimeGrid time{pc.time.horizon, pc.time.steps};
  const auto times = requested_times(c);
  std::vector<int> snaps;
  add_snapshots(snaps, steps_of(times, time, "options.times"), time.steps);
  const TimeGrid obs_grid{pc.time.horizon, c.options.observation_steps};
  const auto obs_steps = steps_of(times, obs_grid, "options.times");
  if (c.options.observation_steps < time.steps) {
    throw ConfigError("options.observation_steps", "must be at least problem.time.steps");
  }
  Stopwatch sw;
  const auto sol = zakai_solve(model, {pc.max_order, pc.time_modes, 1}, time, grid, snaps);
  TaskResult r;
  r.solve_seconds = sw.seconds();
  const LinearGaussianModel lg{pc.op.beta, pc.op.diffusion, pc.op.observation, pc.op.m0, pc.op.p0};
  Table t{"filter", {"path", "t", "estimate", "reference", "error"}, {}};
  double sq = 0.0;
  int count = 0, small = 0;
  for (int path = 0; path < c.options.paths; ++path) {
    const auto fp = simulate(model, pc.time.horizon, c.options.observation_steps,
                             derive_seed(c.seed, "filter/path/" + std::to_string(path)));
    const ObservationRecord obs(fp);
    const auto kb = kalman_bucy(lg, fp.times, fp.observations[0]);
    for (std::size_t m = 0; m < times.size(); ++m) {
      const auto est = estimate(sol, obs, [](double x) { return x; }, times[m]);
      const double ref = kb.mean[static_cast<std::size_t>(obs_steps[m])];
      t.rows.push_back({static_cast<long long>(path), times[m], est.normalized, ref, est.normalized - ref});
      sq += (est.normalized - ref) * (est.normalized - ref);
      ++count;
      small += est.small_normalizer ? 1 : 0;
    }
  }
  r.tables.push_back(std::move(t));
  r.report.push_back(fmt::format("{} paths, RMSE against Kalman-Bucy {:.3e}", c.options.paths, std::sqrt(sq / count)));
  if (small > 0) r.report.push_back(fmt::format("warning: {} estimates had a near-zero normalizer", small));
  r.boundary_mass = largest_edge_mass(sol);
  return r;
}

TaskResult task_filter_study(const ExperimentConfig& c) {
  require_filter(c);
  const auto& pc = c.problem;
  const auto& O = c.options;
  if (O.ladder.empty() && O.mode_ladder.empty()) {
    throw ConfigError("options.ladder", "filter-study needs a ladder or a mode_ladder");
  }
  const auto model = make_filter_model(pc.op);
  const Grid grid = make_grid(pc);
  const TimeGrid time{pc.time.horizon, pc.time.steps};
  TaskResult r;
  Stopwatch sw;
  if (!O.ladder.empty()) {
    if (!std::is_sorted(O.ladder.begin(), O.ladder.end())) throw ConfigError("options.ladder", "must be increasing");
    const int ref_N = O.reference_order > 0 ? O.reference_order : O.ladder.back() + 2;
    const int ref_n = O.reference_modes > 0 ? O.reference_modes : pc.time_modes;
    if (ref_N < O.ladder.back()) throw ConfigError("options.reference_order", "must cover the ladder");
    if (ref_n < pc.time_modes) throw ConfigError("options.reference_modes", "must cover problem.truncation.time_modes");
    std::vector<TruncationSpec> ladder;
    for (int N : O.ladder) ladder.push_back({N, pc.time_modes, 1});
    const auto rows = truncation_error_study(model, time, grid, {ref_N, ref_n, 1}, ladder, O.replications,
                                             derive_seed(c.seed, "filter-study/replications"));
    Table t{"filter_study", {"N", "error", "ratio", "theoretical_ratio", "stderr", "exact_error"}, {}};
    for (const auto& row : rows) {
      t.rows.push_back({static_cast<long long>(row.max_order), row.mc_error, row.ratio, row.bound_ratio,
                        row.mc_stderr, row.exact_error});
    }
    r.tables.push_back(std::move(t));
    r.report.push_back(fmt::format("order ladder against reference ({}, {}), {} replications", ref_N, ref_n,
                                   O.replications));
  }
  if (!O.mode_ladder.empty()) {
    const auto study = time_mode_error_study(model, time, grid, pc.max_order, O.mode_ladder);
    Table t{"filter_modes", {"n", "error", "ratio", "theoretical_ratio"}, {}};
    for (std::size_t j = 0; j < study.rows.size(); ++j) {
      const auto& row = study.rows[j];
      const double ratio = j == 0 ? kNaN : row.error / study.rows[j - 1].error;
      const double theory = j == 0 ? kNaN : static_cast<double>(study.rows[j - 1].time_modes) / row.time_modes;
      t.rows.push_back({static_cast<long long>(row.time_modes), row.error, ratio, theory});
    }
    r.tables.push_back(std::move(t));
    r.report.push_back(fmt::format("time-mode ladder: error ~ c / n fit c = {:.3e}, R^2 = {:.3f}", study.fit_c,
                                   study.fit_r_squared));
  }
  r.solve_seconds = sw.seconds();
  return r;
}

}  // namespace

TaskResult run_task(const ExperimentConfig& c) {
  if (c.task == "solve") return task_solve(c);
  if (c.task == "sample") return task_sample(c);
  if (c.task == "moments") return task_moments(c);
  if (c.task == "energy") return task_energy(c);
  if (c.task == "stransform") return task_stransform(c);
  if (c.task == "convergence") return task_convergence(c);
  if (c.task == "filter") return task_filter(c);
  if (c.task == "filter-study") return task_filter_study(c);
  throw ConfigError("task", "unknown task '" + c.task + "'");
}

}  // namespace wce::cli
