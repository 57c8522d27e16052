#include "wce/propagator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace wce {

void SpdeProblem::validate() const {
  if (!space) throw std::invalid_argument("problem has no spatial discretization");
  if (trunc.max_order < 0 || trunc.time_modes < 1 || trunc.channels < 0) {
    throw std::invalid_argument("invalid truncation");
  }
  if (static_cast<std::size_t>(trunc.channels) != space->channels()) {
    throw std::invalid_argument("truncation channel count does not match the operator's noise channels");
  }
  if (!(time.horizon > 0.0) || time.steps < 1) throw std::invalid_argument("invalid time grid");
  if (noise.size() > static_cast<std::size_t>(trunc.channels)) {
    throw std::invalid_argument("more noise terms than channels");
  }
  const std::size_t nx = static_cast<std::size_t>(space->grid().points());
  auto in_truncation = [&](const MultiIndex& a) {
    return a.order() <= trunc.max_order && a.max_time_mode() <= trunc.time_modes && a.max_channel() <= trunc.channels;
  };
  for (const auto& [alpha, field] : initial) {
    if (!in_truncation(alpha)) throw std::invalid_argument("initial datum " + alpha.to_string() + " outside truncation");
    if (field.size() != nx) throw DimensionMismatch("initial datum size does not match grid");
  }
  for (const auto& [alpha, f] : drift) {
    if (!in_truncation(alpha)) throw std::invalid_argument("drift datum " + alpha.to_string() + " outside truncation");
    if (!f) throw std::invalid_argument("empty drift function");
  }
  for (const auto& channel : noise) {
    for (const auto& [alpha, g] : channel) {
      if (!in_truncation(alpha)) throw std::invalid_argument("noise datum " + alpha.to_string() + " outside truncation");
      if (!g) throw std::invalid_argument("empty noise function");
    }
  }
  for (int s : snapshots) {
    if (s < 0 || s > time.steps) throw std::invalid_argument("snapshot step outside the time grid");
  }
}

SpdeProblem SpdeProblem::deterministic(std::shared_ptr<const Discretization> space, TruncationSpec trunc,
                                       TimeGrid time, Field u0, TimeFunction f, std::vector<TimeFunction> g) {
  SpdeProblem p;
  p.space = std::move(space);
  p.trunc = trunc;
  p.time = time;
  p.initial.emplace(MultiIndex{}, std::move(u0));
  if (f) p.drift.emplace(MultiIndex{}, std::move(f));
  p.noise.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k]) p.noise[k].emplace(MultiIndex{}, std::move(g[k]));
  }
  return p;
}

void SpdeProblem::snapshot_every(int stride) {
  if (stride < 1) throw std::invalid_argument("snapshot stride must be positive");
  snapshots.clear();
  for (int s = 0; s < time.steps; s += stride) snapshots.push_back(s);
  snapshots.push_back(time.steps);
}

PropagatorSolution::PropagatorSolution(IndexSet indices, std::shared_ptr<const Discretization> space, TimeBasis basis,
                                       std::vector<int> steps, std::vector<double> times)
    : indices_(std::move(indices)), space_(std::move(space)), basis_(basis), steps_(std::move(steps)),
      times_(std::move(times)) {
  states_.assign(times_.size(), std::vector<State>(indices_.size(), space_->zeros()));
}

std::size_t PropagatorSolution::snapshot_at(double t) const {
  const double tol = 1e-9 * basis_.horizon();
  for (std::size_t s = 0; s < times_.size(); ++s) {
    if (std::abs(times_[s] - t) <= tol) return s;
  }
  throw std::out_of_range("no stored snapshot at t = " + std::to_string(t));
}

Field PropagatorSolution::coefficient(const MultiIndex& alpha, double t) const {
  const std::size_t snap = snapshot_at(t);
  const std::size_t pos = indices_.find(alpha);
  if (pos == indices_.size()) return Field(static_cast<std::size_t>(space_->grid().points()), 0.0);
  return space_->decode(states_[snap][pos]);
}

namespace {

bool all_finite(const State& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

void axpy(double a, const State& x, State& y) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += a * x[j];
}

/// Encoded data terms keyed by index position.
struct EncodedData {
  std::vector<std::size_t> positions;
  std::vector<const TimeFunction*> functions;

  void evaluate(const Discretization& d, double t, std::vector<State>& out) const {
    out.resize(functions.size());
    for (std::size_t j = 0; j < functions.size(); ++j) out[j] = d.encode((*functions[j])(t));
  }
};

EncodedData collect(const ChaosMap<TimeFunction>& data, const IndexSet& set) {
  EncodedData e;
  for (const auto& [alpha, f] : data) {
    e.positions.push_back(set.find(alpha));
    e.functions.push_back(&f);
  }
  return e;
}

}  // namespace

PropagatorSolution solve(const SpdeProblem& problem) {
  problem.validate();
  const Discretization& d = *problem.space;
  const IndexSet set(problem.trunc);
  const TimeBasis basis = problem.basis();
  const std::size_t count = set.size();
  const std::size_t channels = static_cast<std::size_t>(problem.trunc.channels);
  const int max_order = problem.trunc.max_order;
  const int n_modes = problem.trunc.time_modes;

  std::vector<int> snap_steps = problem.snapshots;
  if (snap_steps.empty()) snap_steps = {0, problem.time.steps};
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());
  std::vector<double> snap_times;
  for (int s : snap_steps) snap_times.push_back(problem.time.time(s));
  PropagatorSolution sol(set, problem.space, basis, snap_steps, snap_times);

  std::vector<State> cur(count, d.zeros()), next(count, d.zeros());
  for (const auto& [alpha, field] : problem.initial) cur[set.find(alpha)] = d.encode(field);

  // Drift and noise data by index position.
  const EncodedData drift = collect(problem.drift, set);
  std::vector<State> drift_prev, drift_next;
  std::vector<std::size_t> drift_slot(count, count);
  for (std::size_t j = 0; j < drift.positions.size(); ++j) drift_slot[drift.positions[j]] = j;

  std::vector<EncodedData> noise(channels);
  std::vector<std::vector<std::size_t>> noise_slot(channels, std::vector<std::size_t>(count, count));
  for (std::size_t k = 0; k < problem.noise.size(); ++k) {
    noise[k] = collect(problem.noise[k], set);
    for (std::size_t j = 0; j < noise[k].positions.size(); ++j) noise_slot[k][noise[k].positions[j]] = j;
  }
  std::vector<std::vector<State>> noise_prev(channels), noise_next(channels);

  // S_k(beta) = M_k u_beta + g_{k,beta}, needed for every beta with |beta| < N.
  std::vector<std::size_t> lower_positions;
  for (int lvl = 0; lvl < max_order; ++lvl) {
    for (std::size_t p : set.level(lvl)) lower_positions.push_back(p);
  }
  std::vector<std::vector<State>> src_prev(count), src_next(count);
  for (std::size_t p : lower_positions) {
    src_prev[p].assign(channels, d.zeros());
    src_next[p].assign(channels, d.zeros());
  }
  auto build_sources = [&](std::size_t p, const std::vector<State>& u, const std::vector<std::vector<State>>& g,
                           std::vector<State>& out) {
    for (std::size_t k = 0; k < channels; ++k) {
      d.apply_M(k, u[p], out[k]);
      const std::size_t slot = noise_slot[k][p];
      if (slot != count) axpy(1.0, g[k][slot], out[k]);
    }
  };

  drift.evaluate(d, 0.0, drift_prev);
  for (std::size_t k = 0; k < channels; ++k) noise[k].evaluate(d, 0.0, noise_prev[k]);
  for (std::size_t p : lower_positions) build_sources(p, cur, noise_prev, src_prev[p]);

  std::size_t snap_cursor = 0;
  if (snap_steps[0] == 0) {
    for (std::size_t p = 0; p < count; ++p) sol.state(0, p) = cur[p];
    snap_cursor = 1;
  }

  const auto stepper = d.stepper(problem.time.dt());
  const double dt = problem.time.dt();
  std::vector<double> w_early(static_cast<std::size_t>(n_modes) + 1), w_late(w_early.size());

  for (int step = 0; step < problem.time.steps; ++step) {
    const double t0 = problem.time.time(step);
    const double t1 = problem.time.time(step + 1);
    for (int i = 1; i <= n_modes; ++i) {
      const auto [a, b] = basis.hat_weights(i, t0, t1);
      w_early[static_cast<std::size_t>(i)] = a;
      w_late[static_cast<std::size_t>(i)] = b;
    }
    drift.evaluate(d, t1, drift_next);
    for (std::size_t k = 0; k < channels; ++k) noise[k].evaluate(d, t1, noise_next[k]);

    for (int lvl = 0; lvl <= max_order; ++lvl) {
      const auto& members = set.level(lvl);
      std::atomic<bool> failed{false};
      std::atomic<std::size_t> failed_pos{0};
#pragma omp parallel for schedule(static)
      for (std::size_t m = 0; m < members.size(); ++m) {
        const std::size_t p = members[m];
        State early = d.zeros(), late = d.zeros();
        const std::size_t ds = drift_slot[p];
        if (ds != count) {
          axpy(0.5 * dt, drift_prev[ds], early);
          axpy(0.5 * dt, drift_next[ds], late);
        }
        for (const auto& e : set.edges(p)) {
          const auto i = static_cast<std::size_t>(e.i);
          const auto k = static_cast<std::size_t>(e.k - 1);
          axpy(e.weight * w_early[i], src_prev[e.lower][k], early);
          axpy(e.weight * w_late[i], src_next[e.lower][k], late);
        }
        stepper->advance(cur[p], early, late, next[p]);
        if (!all_finite(next[p])) {
          failed = true;
          failed_pos = p;
        }
        if (lvl < max_order) build_sources(p, next, noise_next, src_next[p]);
      }
      if (failed) throw NumericalInstability(set[failed_pos.load()], step + 1);
    }

    std::swap(cur, next);
    std::swap(src_prev, src_next);
    std::swap(drift_prev, drift_next);
    std::swap(noise_prev, noise_next);
    if (snap_cursor < snap_steps.size() && snap_steps[snap_cursor] == step + 1) {
      for (std::size_t p = 0; p < count; ++p) sol.state(snap_cursor, p) = cur[p];
      ++snap_cursor;
    }
  }
  return sol;
}

double level_energy(const PropagatorSolution& sol, int n, double t) {
  if (n < 0 || n > sol.indices().max_order()) throw std::out_of_range("level outside truncation");
  const std::size_t snap = sol.snapshot_at(t);
  double e = 0.0;
  for (std::size_t p : sol.indices().level(n)) e += sol.space().norm2(sol.state(snap, p));
  return e;
}

ConvergenceReport convergence_report(const PropagatorSolution& sol, double t) {
  ConvergenceReport r;
  r.t = t;
  const auto& op = sol.space().spec();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto pr = parabolicity_report(op, {}, &sol.space().grid());
  r.classification = pr.classification;
  r.epsilon = pr.epsilon;
  r.geometric_bound = nan;
  if (op.is_constant()) {
    const auto& c = op.constant();
    r.bounded_noise = std::all_of(c.sigma.begin(), c.sigma.end(), [](double s) { return s == 0.0; });
    for (double s : c.sigma) r.c_star += s * s;
    for (double v : c.nu) r.c3 += v * v;
    r.c1 = 2.0 * c.c;
    if (r.c_star > 0.0 && r.epsilon > 0.0) {
      r.b = r.epsilon / r.c_star;
      r.geometric_bound = 1.0 / (1.0 + r.b);
    }
  }
  const int N = sol.indices().max_order();
  r.initial_energy = sol.space().norm2(sol.state(0, 0));
  for (int n = 0; n <= N; ++n) r.rows.push_back({n, level_energy(sol, n, t), nan, nan});
  for (int n = 0; n <= N; ++n) {
    auto& row = r.rows[static_cast<std::size_t>(n)];
    r.partial_sum += row.energy;
    if (n < N && row.energy > 0.0) row.ratio = r.rows[static_cast<std::size_t>(n + 1)].energy / row.energy;
    if (op.is_constant() && r.bounded_noise) {
      row.factorial_bound = std::exp(n * std::log(r.c3 * t) - log_factorial(n) + r.c1 * t) * r.initial_energy;
      if (n == 0) row.factorial_bound = std::exp(r.c1 * t) * r.initial_energy;
    }
  }
  return r;
}

IteratedIntegralResult iterated_integral_check(const SpdeProblem& problem, const PropagatorSolution& sol, int n,
                                               int samples, int fine_steps, std::uint64_t seed) {
  if (n < 0 || n > 2) throw std::invalid_argument("iterated integral check supports levels 0..2");
  if (n > problem.trunc.max_order) throw std::invalid_argument("level above truncation");
  if (samples < 1 || fine_steps < 1) throw std::invalid_argument("need positive sample and step counts");
  const Discretization& d = *problem.space;
  const double T = problem.time.horizon;
  const double h = T / fine_steps;
  const std::size_t channels = static_cast<std::size_t>(problem.trunc.channels);
  const TimeBasis& basis = sol.basis();
  const int n_modes = basis.count();
  const std::size_t final_snap = sol.snapshot_at(T);
  const auto stepper = d.stepper(h);

  auto data_at = [&](const ChaosMap<TimeFunction>& m, double t) {
    auto it = m.find(MultiIndex{});
    return it == m.end() ? d.zeros() : d.encode(it->second(t));
  };
  State u0 = d.zeros();
  if (auto it = problem.initial.find(MultiIndex{}); it != problem.initial.end()) u0 = d.encode(it->second);

  // Average of m_i over each fine step; xi_ik = sum_j mbar_ij dW_kj.
  std::vector<std::vector<double>> mbar(static_cast<std::size_t>(n_modes), std::vector<double>(fine_steps));
  for (int i = 1; i <= n_modes; ++i) {
    for (int j = 0; j < fine_steps; ++j) {
      const double a = j * h, b = (j + 1 == fine_steps) ? T : (j + 1) * h;
      mbar[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] = basis.integral(i, a, b) / h;
    }
  }

  IteratedIntegralResult res;
  res.samples = samples;
  double sum_disc = 0.0, sum_ref = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<State> v(static_cast<std::size_t>(n) + 1, d.zeros());
    v[0] = u0;
    SlotMatrix xi(n_modes, static_cast<int>(channels));
    State early, scratch;
    std::vector<State> noise_now(channels);
    for (int j = 0; j < fine_steps; ++j) {
      const double t0 = j * h;
      std::vector<double> dW(channels);
      for (std::size_t k = 0; k < channels; ++k) {
        dW[k] = std::sqrt(h) * counter_normal(seed + static_cast<std::uint64_t>(s) * 0x9e3779b97f4a7c15ULL,
                                              static_cast<std::uint64_t>(j), k);
        for (int i = 1; i <= n_modes; ++i) {
          xi(i, static_cast<int>(k) + 1) += mbar[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] * dW[k];
        }
        noise_now[k] = k < problem.noise.size() ? data_at(problem.noise[k], t0) : d.zeros();
      }
      // Higher levels first so each uses the lower level at the left endpoint.
      for (int lvl = n; lvl >= 1; --lvl) {
        early = d.zeros();
        for (std::size_t k = 0; k < channels; ++k) {
          d.apply_M(k, v[static_cast<std::size_t>(lvl - 1)], scratch);
          if (lvl == 1) axpy(1.0, noise_now[k], scratch);
          axpy(dW[k], scratch, early);
        }
        State out;
        stepper->advance(v[static_cast<std::size_t>(lvl)], early, d.zeros(), out);
        v[static_cast<std::size_t>(lvl)] = std::move(out);
      }
      State f0 = data_at(problem.drift, t0), f1 = data_at(problem.drift, t0 + h);
      for (double& x : f0) x *= 0.5 * h;
      for (double& x : f1) x *= 0.5 * h;
      State out;
      stepper->advance(v[0], f0, f1, out);
      v[0] = std::move(out);
    }
    State chaos = d.zeros();
    for (std::size_t p : sol.indices().level(n)) axpy(xi_alpha(sol.indices()[p], xi), sol.state(final_snap, p), chaos);
    State diff = chaos;
    axpy(-1.0, v[static_cast<std::size_t>(n)], diff);
    sum_disc += d.norm2(diff);
    sum_ref += d.norm2(v[static_cast<std::size_t>(n)]);
  }
  res.discrepancy = std::sqrt(sum_disc / samples);
  res.reference_norm = std::sqrt(sum_ref / samples);
  return res;
}

}  // namespace wce
