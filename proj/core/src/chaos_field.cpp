#include "wce/chaos_field.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>

namespace wce {

double WeightSequence::squared(const MultiIndex& alpha) const {
  if (std::holds_alternative<QWeights>(kind)) {
    const double r = weight(alpha);
    return r * r;
  }
  const auto& rg = std::get<RhoGammaWeights>(kind);
  double log_r2 = rg.rho * log_factorial(alpha);
  for (const auto& [slot, power] : alpha.entries()) log_r2 += rg.gamma * power * std::log(2.0 * slot.i * slot.k);
  return std::exp(log_r2);
}

double WeightSequence::weight(const MultiIndex& alpha) const {
  if (const auto* q = std::get_if<QWeights>(&kind)) {
    double r = 1.0;
    for (const auto& [slot, power] : alpha.entries()) {
      const auto k = static_cast<std::size_t>(slot.k - 1);
      const double qk = k < q->q.size() ? q->q[k] : 1.0;
      r *= std::pow(qk, power);
    }
    return r;
  }
  return std::sqrt(squared(alpha));
}

Field sample_field(const PropagatorSolution& sol, const SlotMatrix& coords, double t) {
  const std::size_t snap = sol.snapshot_at(t);
  const auto& set = sol.indices();
  State acc = sol.space().zeros();
  for (std::size_t p = 0; p < set.size(); ++p) {
    const double x = xi_alpha(set[p], coords);
    const State& u = sol.state(snap, p);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += x * u[j];
  }
  return sol.space().decode(acc);
}

Field mean(const PropagatorSolution& sol, double t) { return sol.coefficient(MultiIndex{}, t); }

std::vector<double> point_coefficients(const PropagatorSolution& sol, SpaceTimePoint p) {
  const std::size_t snap = sol.snapshot_at(p.t);
  const auto node = static_cast<std::size_t>(sol.space().grid().nearest(p.x));
  const auto& set = sol.indices();
  std::vector<double> out(set.size());
  for (std::size_t a = 0; a < set.size(); ++a) out[a] = sol.space().decode(sol.state(snap, a))[node];
  return out;
}

double second_moment(const PropagatorSolution& sol, SpaceTimePoint p, SpaceTimePoint q) {
  const auto u = point_coefficients(sol, p);
  const auto v = point_coefficients(sol, q);
  double s = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) s += u[a] * v[a];
  return s;
}

double covariance(const PropagatorSolution& sol, SpaceTimePoint p, SpaceTimePoint q) {
  const auto u = point_coefficients(sol, p);
  const auto v = point_coefficients(sol, q);
  double s = 0.0;
  // Position 0 is the empty index.
  for (std::size_t a = 1; a < u.size(); ++a) s += u[a] * v[a];
  return s;
}

namespace {

std::size_t packed(std::size_t a, std::size_t b, std::size_t n) {
  if (a > b) std::swap(a, b);
  return a * n - a * (a - 1) / 2 + (b - a);
}

}  // namespace

ProductTable::ProductTable(const IndexSet& set) : n_(set.size()) {
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> ids;
  auto target_id = [&](const MultiIndex& m) {
    auto [it, inserted] = ids.emplace(m, targets_.size());
    if (inserted) {
      targets_.push_back(m);
      target_in_set_.push_back(set.find(m));
    }
    return it->second;
  };
  for (std::size_t a = 0; a < n_; ++a) target_id(set[a]);
  terms_.resize(n_ * (n_ + 1) / 2);
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a; b < n_; ++b) {
      auto& out = terms_[packed(a, b, n_)];
      for (const auto& term : product_expand(set[a], set[b])) out.push_back({target_id(term.index), term.coefficient});
    }
  }
}

const std::vector<ProductTable::Term>& ProductTable::terms(std::size_t a, std::size_t b) const {
  return terms_.at(packed(a, b, n_));
}

std::shared_ptr<const ProductTable> product_table(const IndexSet& set) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const ProductTable>> cache;
  const auto key = std::make_tuple(set.spec().max_order, set.spec().time_modes, set.spec().channels);
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<const ProductTable>(set)).first;
  return it->second;
}

std::vector<double> pair_expansion(const ProductTable& table, const std::vector<double>& u1,
                                   const std::vector<double>& u2) {
  std::vector<double> c(table.targets().size(), 0.0);
  const std::size_t n = u1.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (u1[a] == 0.0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const double w = u1[a] * u2[b];
      if (w == 0.0) continue;
      for (const auto& t : table.terms(a, b)) c[t.target] += w * t.coefficient;
    }
  }
  return c;
}

double third_moment(const IndexSet& set, const std::vector<double>& u1, const std::vector<double>& u2,
                    const std::vector<double>& u3) {
  const auto table = product_table(set);
  const auto c = pair_expansion(*table, u1, u2);
  double s = 0.0;
  for (std::size_t t = 0; t < c.size(); ++t) {
    const std::size_t p = table->target_in_set(t);
    if (p != set.size()) s += c[t] * u3[p];
  }
  return s;
}

double fourth_moment(const IndexSet& set, const std::vector<double>& u1, const std::vector<double>& u2,
                     const std::vector<double>& u3, const std::vector<double>& u4) {
  const auto table = product_table(set);
  const auto c12 = pair_expansion(*table, u1, u2);
  const auto c34 = pair_expansion(*table, u3, u4);
  double s = 0.0;
  for (std::size_t t = 0; t < c12.size(); ++t) s += c12[t] * c34[t];
  return s;
}

double third_moment(const PropagatorSolution& sol, SpaceTimePoint p1, SpaceTimePoint p2, SpaceTimePoint p3) {
  return third_moment(sol.indices(), point_coefficients(sol, p1), point_coefficients(sol, p2),
                      point_coefficients(sol, p3));
}

double fourth_moment(const PropagatorSolution& sol, SpaceTimePoint p1, SpaceTimePoint p2, SpaceTimePoint p3,
                     SpaceTimePoint p4) {
  return fourth_moment(sol.indices(), point_coefficients(sol, p1), point_coefficients(sol, p2),
                       point_coefficients(sol, p3), point_coefficients(sol, p4));
}

WeightedNorm weighted_norm(const PropagatorSolution& sol, const WeightSequence& w, double t) {
  const std::size_t snap = sol.snapshot_at(t);
  const auto& set = sol.indices();
  WeightedNorm r;
  r.levels.assign(static_cast<std::size_t>(set.max_order()) + 1, 0.0);
  for (std::size_t p = 0; p < set.size(); ++p) {
    r.levels[static_cast<std::size_t>(set[p].order())] += w.squared(set[p]) * sol.space().norm2(sol.state(snap, p));
  }
  for (double v : r.levels) r.value += v;
  const int N = set.max_order();
  if (N >= 1) {
    const double prev = r.levels[static_cast<std::size_t>(N - 1)];
    const double last = r.levels[static_cast<std::size_t>(N)];
    r.tail_ratio = prev > 0.0 ? last / prev : (last > 0.0 ? INFINITY : 0.0);
    r.divergent = r.tail_ratio > 0.5;
  }
  return r;
}

PropagatorSolution apply_weights(const PropagatorSolution& sol, const WeightSequence& w) {
  PropagatorSolution out = sol;
  const auto& set = sol.indices();
  for (std::size_t s = 0; s < sol.snapshot_count(); ++s) {
    for (std::size_t p = 0; p < set.size(); ++p) {
      const double r = w.weight(set[p]);
      for (double& v : out.state(s, p)) v *= r;
    }
  }
  return out;
}

Field s_transform_field(const PropagatorSolution& sol, const TestDirection& h, double t) {
  const std::size_t snap = sol.snapshot_at(t);
  const auto& set = sol.indices();
  State acc = sol.space().zeros();
  for (std::size_t p = 0; p < set.size(); ++p) {
    const double e = stoch_exp_coeff(h, set[p]);
    if (e == 0.0) continue;
    const State& u = sol.state(snap, p);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += e * u[j];
  }
  return sol.space().decode(acc);
}

SCheckResult s_check(const SpdeProblem& problem, const PropagatorSolution& sol, const TestDirection& h) {
  problem.validate();
  const Discretization& d = *problem.space;
  const TimeBasis basis = problem.basis();
  const std::size_t channels = static_cast<std::size_t>(problem.trunc.channels);
  const int modes = std::min(h.h.time_modes(), basis.count());

  auto s_of = [&](const ChaosMap<TimeFunction>& m, double t) {
    State acc = d.zeros();
    for (const auto& [alpha, f] : m) {
      const double e = stoch_exp_coeff(h, alpha);
      if (e == 0.0) continue;
      const State v = d.encode(f(t));
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += e * v[j];
    }
    return acc;
  };
  auto h_at = [&](std::size_t k, double t) {
    double v = 0.0;
    for (int i = 1; i <= modes && static_cast<int>(k) < h.h.channels(); ++i) v += h.h(i, static_cast<int>(k) + 1) * basis.eval(i, t);
    return v;
  };
  auto h_integral = [&](std::size_t k, double t0, double t1) {
    double v = 0.0;
    for (int i = 1; i <= modes && static_cast<int>(k) < h.h.channels(); ++i) {
      v += h.h(i, static_cast<int>(k) + 1) * basis.integral(i, t0, t1);
    }
    return v;
  };
  // Source S(t) = Sf(h)(t) + sum_k h_k(t) Sg_k(h)(t).
  auto source = [&](double t) {
    State s = s_of(problem.drift, t);
    for (std::size_t k = 0; k < problem.noise.size(); ++k) {
      const double hk = h_at(k, t);
      if (hk == 0.0) continue;
      const State g = s_of(problem.noise[k], t);
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += hk * g[j];
    }
    return s;
  };

  State v = d.zeros();
  for (const auto& [alpha, field] : problem.initial) {
    const double e = stoch_exp_coeff(h, alpha);
    const State u = d.encode(field);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += e * u[j];
  }

  const double dt = problem.time.dt();
  std::vector<double> h_mid(channels), h_inc(channels);
  State s0 = source(0.0);
  for (int step = 0; step < problem.time.steps; ++step) {
    const double t0 = problem.time.time(step), t1 = problem.time.time(step + 1);
    for (std::size_t k = 0; k < channels; ++k) {
      h_mid[k] = h_at(k, 0.5 * (t0 + t1));
      h_inc[k] = h_integral(k, t0, t1);
    }
    State s1 = source(t1);
    State early = s0, late = s1;
    for (double& x : early) x *= 0.5 * dt;
    for (double& x : late) x *= 0.5 * dt;
    State next;
    d.advance_shifted(v, dt, h_mid, h_inc, early, late, next);
    v = std::move(next);
    s0 = std::move(s1);
  }

  SCheckResult r;
  const Field chaos = s_transform_field(sol, h, problem.time.horizon);
  r.shifted = d.decode(v);
  State diff = d.encode(chaos);
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= v[j];
  r.residual = std::sqrt(d.norm2(diff));
  r.shifted_norm = std::sqrt(d.norm2(v));
  return r;
}

}  // namespace wce
