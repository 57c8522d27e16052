#include "wce/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "wce/chaos_field.hpp"

namespace wce {

double FilterModel::prior_density(double x) const {
  if (prior) return prior(x);
  const double z = x - prior_mean;
  return std::exp(-0.5 * z * z / prior_var) / std::sqrt(2.0 * std::numbers::pi * prior_var);
}

OperatorSpec FilterModel::zakai_operator() const {
  VariableCoefficients v;
  v.form = VariableCoefficients::Form::kAdjoint;
  const auto sigma = diffusion;
  const auto rho = correlation;
  const auto b = drift;
  v.a = [sigma, rho](double x) {
    double s = sigma(x) * sigma(x);
    for (const auto& r : rho) {
      if (r) s += r(x) * r(x);
    }
    return 0.5 * s;
  };
  v.b = [b](double x) { return -b(x); };
  v.c = [](double) { return 0.0; };
  for (std::size_t k = 0; k < observation.size(); ++k) {
    const Coefficient r = k < correlation.size() ? correlation[k] : Coefficient{};
    v.sigma.push_back([r](double x) { return r ? -r(x) : 0.0; });
    v.nu.push_back(observation[k]);
  }
  return {v};
}

double FilterModel::observation_bound(const Grid& grid) const {
  double m = 0.0;
  for (const auto& h : observation) {
    for (int j = 0; j < grid.points(); ++j) m = std::max(m, std::abs(h(grid.node(j))));
  }
  return m;
}

FilterModel FilterModel::linear_gaussian(double beta, double sigma, double c, double m0, double p0) {
  FilterModel m;
  m.drift = [beta](double x) { return beta * x; };
  m.diffusion = [sigma](double) { return sigma; };
  m.observation = {[c](double x) { return c * x; }};
  m.prior_mean = m0;
  m.prior_var = p0;
  return m;
}

namespace {

// Stream identifiers for counter-based draws.
constexpr std::uint64_t kStreamState = 0;
constexpr std::uint64_t kStreamPrior = 1;
constexpr std::uint64_t kStreamObservation = 2;

std::uint64_t stream(std::uint64_t kind, std::size_t channel) { return (kind << 32) | channel; }

}  // namespace

FilterPath simulate(const FilterModel& model, double horizon, int steps, std::uint64_t seed) {
  if (!(horizon > 0.0) || steps < 1) throw std::invalid_argument("invalid simulation grid");
  if (horizon / steps > 1e-2 * horizon) throw std::invalid_argument("simulation step must be at most T / 100");
  const std::size_t r = model.channels();
  const double dt = horizon / steps, sq = std::sqrt(dt);
  FilterPath p;
  p.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s <= steps; ++s) p.times[static_cast<std::size_t>(s)] = s == steps ? horizon : s * dt;
  p.observations.assign(r, std::vector<double>(p.times.size(), 0.0));
  double x = model.prior_mean + std::sqrt(model.prior_var) * counter_normal(seed, stream(kStreamPrior, 0), 0);
  p.state.push_back(x);
  for (int s = 0; s < steps; ++s) {
    const auto su = static_cast<std::uint64_t>(s);
    double dx = model.drift(x) * dt + model.diffusion(x) * sq * counter_normal(seed, stream(kStreamState, 0), su);
    for (std::size_t k = 0; k < r; ++k) {
      const double dv = sq * counter_normal(seed, stream(kStreamObservation, k), su);
      auto& y = p.observations[k];
      y[static_cast<std::size_t>(s) + 1] = y[static_cast<std::size_t>(s)] + model.observation[k](x) * dt + dv;
      if (k < model.correlation.size() && model.correlation[k]) dx += model.correlation[k](x) * dv;
    }
    x += dx;
    if (!std::isfinite(x)) throw std::runtime_error("state simulation became non-finite at step " + std::to_string(s + 1));
    p.state.push_back(x);
  }
  return p;
}

FilterPath wiener_observations(std::size_t channels, double horizon, int steps, std::uint64_t seed) {
  const double dt = horizon / steps, sq = std::sqrt(dt);
  FilterPath p;
  p.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s <= steps; ++s) p.times[static_cast<std::size_t>(s)] = s == steps ? horizon : s * dt;
  p.observations.assign(channels, std::vector<double>(p.times.size(), 0.0));
  for (std::size_t k = 0; k < channels; ++k) {
    auto& y = p.observations[k];
    for (int s = 0; s < steps; ++s) {
      y[static_cast<std::size_t>(s) + 1] =
          y[static_cast<std::size_t>(s)] + sq * counter_normal(seed, stream(kStreamObservation, k), static_cast<std::uint64_t>(s));
    }
  }
  return p;
}

ObservationRecord::ObservationRecord(std::vector<double> times, std::vector<std::vector<double>> y)
    : times_(std::move(times)), y_(std::move(y)) {
  if (times_.size() < 2) throw std::invalid_argument("observation record needs at least two times");
  for (const auto& c : y_) {
    if (c.size() != times_.size()) throw std::invalid_argument("observation channel length differs from times");
    if (c.front() != 0.0) throw std::invalid_argument("observations must start at Y(0) = 0");
  }
}

SlotMatrix ObservationRecord::coordinates(const TimeBasis& basis) const {
  // With Y linear between samples, the parts formula
  //   m_i(T) Y(T) - int m_i' Y dt
  // collapses to sum_j (Y_{j+1} - Y_j) * (mean of m_i over [t_j, t_{j+1}]).
  SlotMatrix xi(basis.count(), static_cast<int>(channels()));
  for (int i = 1; i <= basis.count(); ++i) {
    for (std::size_t j = 0; j + 1 < times_.size(); ++j) {
      const double avg = basis.integral(i, times_[j], times_[j + 1]) / (times_[j + 1] - times_[j]);
      for (std::size_t k = 0; k < channels(); ++k) xi(i, static_cast<int>(k) + 1) += avg * (y_[k][j + 1] - y_[k][j]);
    }
  }
  return xi;
}

SlotMatrix ObservationRecord::riemann_stieltjes_coordinates(const TimeBasis& basis) const {
  SlotMatrix xi(basis.count(), static_cast<int>(channels()));
  for (int i = 1; i <= basis.count(); ++i) {
    for (std::size_t j = 0; j + 1 < times_.size(); ++j) {
      const double m = basis.eval(i, times_[j]);
      for (std::size_t k = 0; k < channels(); ++k) xi(i, static_cast<int>(k) + 1) += m * (y_[k][j + 1] - y_[k][j]);
    }
  }
  return xi;
}

PropagatorSolution zakai_solve(const FilterModel& model, const TruncationSpec& trunc, const TimeGrid& time,
                               const Grid& grid, std::vector<int> snapshots) {
  if (grid.boundary() != Boundary::kDirichlet) throw std::invalid_argument("Zakai solves use a Dirichlet interval grid");
  if (static_cast<std::size_t>(trunc.channels) != model.channels()) {
    throw std::invalid_argument("truncation channels must equal the number of observation channels");
  }
  const auto space = make_finite_difference(grid, model.zakai_operator());
  auto problem = SpdeProblem::deterministic(space, trunc, time, grid.sample([&](double x) { return model.prior_density(x); }));
  problem.snapshots = std::move(snapshots);
  return solve(problem);
}

Field ufd(const PropagatorSolution& sol, const ObservationRecord& obs, double t) {
  return sample_field(sol, obs.coordinates(sol.basis()), t);
}

FilterEstimate estimate(const PropagatorSolution& sol, const ObservationRecord& obs,
                        const std::function<double(double)>& f, double t) {
  const std::size_t snap = sol.snapshot_at(t);
  const SlotMatrix xi = obs.coordinates(sol.basis());
  const Grid& g = sol.space().grid();
  const Field fx = g.sample(f);
  const auto w = g.weights();
  const auto& set = sol.indices();
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    const Field u = sol.space().decode(sol.state(snap, p));
    double fa = 0.0, oa = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      fa += w[j] * fx[j] * u[j];
      oa += w[j] * u[j];
    }
    const double x = xi_alpha(set[p], xi);
    num += fa * x;
    den += oa * x;
  }
  const Field u0 = sol.space().decode(sol.state(0, 0));
  double prior_mass = 0.0;
  for (std::size_t j = 0; j < u0.size(); ++j) prior_mass += w[j] * u0[j];
  FilterEstimate e;
  e.unnormalized = num;
  e.small_normalizer = den < 1e-8 * std::abs(prior_mass);
  e.normalized = num / den;
  return e;
}

std::vector<StudyRow> truncation_error_study(const FilterModel& model, const TimeGrid& time, const Grid& grid,
                                             const TruncationSpec& reference,
                                             const std::vector<TruncationSpec>& ladder, int replications,
                                             std::uint64_t seed) {
  if (replications < 2) throw std::invalid_argument("need at least two replications");
  for (const auto& l : ladder) {
    if (l.max_order > reference.max_order || l.time_modes > reference.time_modes || l.channels != reference.channels) {
      throw std::invalid_argument("ladder entries must lie inside the reference truncation");
    }
  }
  const PropagatorSolution ref = zakai_solve(model, reference, time, grid);
  const Discretization& d = ref.space();
  const auto& set = ref.indices();
  const std::size_t last = ref.snapshot_count() - 1;
  const double h_inf = model.observation_bound(grid);

  // Membership of every reference index in each ladder truncation.
  std::vector<std::vector<char>> inside(ladder.size(), std::vector<char>(set.size(), 0));
  std::vector<StudyRow> rows(ladder.size());
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    rows[l].max_order = ladder[l].max_order;
    rows[l].time_modes = ladder[l].time_modes;
    rows[l].bound_ratio = 4.0 * h_inf * time.horizon / (ladder[l].max_order + 2);
    for (std::size_t p = 0; p < set.size(); ++p) {
      const auto& a = set[p];
      inside[l][p] = a.order() <= ladder[l].max_order && a.max_time_mode() <= ladder[l].time_modes;
      if (!inside[l][p]) rows[l].exact_error += d.norm2(ref.state(last, p));
    }
  }

  std::vector<std::vector<double>> samples(ladder.size(), std::vector<double>(static_cast<std::size_t>(replications)));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replications; ++r) {
    const auto path = wiener_observations(static_cast<std::size_t>(reference.channels), time.horizon, time.steps,
                                          seed + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(r + 1));
    const SlotMatrix xi = ObservationRecord(path).coordinates(ref.basis());
    std::vector<double> x(set.size());
    for (std::size_t p = 0; p < set.size(); ++p) x[p] = xi_alpha(set[p], xi);
    for (std::size_t l = 0; l < ladder.size(); ++l) {
      State diff = d.zeros();
      for (std::size_t p = 0; p < set.size(); ++p) {
        if (inside[l][p]) continue;
        const State& u = ref.state(last, p);
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] += x[p] * u[j];
      }
      samples[l][static_cast<std::size_t>(r)] = d.norm2(diff);
    }
  }
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    double s = 0.0, s2 = 0.0;
    for (double v : samples[l]) {
      s += v;
      s2 += v * v;
    }
    const double n = replications;
    rows[l].mc_error = s / n;
    rows[l].mc_stderr = std::sqrt(std::max(0.0, (s2 / n - rows[l].mc_error * rows[l].mc_error) / (n - 1.0)));
    rows[l].ratio = l == 0 || rows[l - 1].mc_error == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                                         : rows[l].mc_error / rows[l - 1].mc_error;
  }
  return rows;
}

std::vector<double> full_basis_level_energies(const FilterModel& model, const TimeGrid& time, const Grid& grid,
                                              int max_order) {
  using Eigen::MatrixXd;
  const auto space = make_finite_difference(grid, model.zakai_operator());
  const auto n = static_cast<Eigen::Index>(grid.points());
  const std::size_t channels = space->channels();
  auto dense = [&](auto&& apply) {
    MatrixXd m(n, n);
    State e(static_cast<std::size_t>(n), 0.0), out;
    for (Eigen::Index c = 0; c < n; ++c) {
      e[static_cast<std::size_t>(c)] = 1.0;
      apply(e, out);
      m.col(c) = Eigen::Map<const Eigen::VectorXd>(out.data(), n);
      e[static_cast<std::size_t>(c)] = 0.0;
    }
    return m;
  };
  const MatrixXd L = dense([&](const State& in, State& out) { space->apply_A(in, out); });
  std::vector<MatrixXd> M;
  for (std::size_t k = 0; k < channels; ++k) M.push_back(dense([&](const State& in, State& out) { space->apply_M(k, in, out); }));

  const double dt = time.dt();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<MatrixXd> lhs(I - 0.5 * dt * L);
  const MatrixXd R = lhs.solve(I + 0.5 * dt * L);

  const Field u0 = space->encode(grid.sample([&](double x) { return model.prior_density(x); }));
  const Eigen::Map<const Eigen::VectorXd> v0(u0.data(), n);
  std::vector<MatrixXd> C(static_cast<std::size_t>(max_order) + 1, MatrixXd::Zero(n, n));
  C[0] = v0 * v0.transpose();
  auto source = [&](const MatrixXd& lower) {
    MatrixXd s = MatrixXd::Zero(n, n);
    for (const auto& m : M) s.noalias() += m * lower * m.transpose();
    return s;
  };
  std::vector<MatrixXd> S_prev(C.size(), MatrixXd::Zero(n, n));
  for (std::size_t k = 1; k < C.size(); ++k) S_prev[k] = source(C[k - 1]);
  for (int step = 0; step < time.steps; ++step) {
    C[0] = R * C[0] * R.transpose();
    for (std::size_t k = 1; k < C.size(); ++k) {
      const MatrixXd S_next = source(C[k - 1]);
      // Trapezoid on the variation-of-constants form of the Lyapunov flow.
      const MatrixXd early = R * S_prev[k] * R.transpose();
      C[k] = R * C[k] * R.transpose() + 0.5 * dt * (early + S_next);
      S_prev[k] = S_next;
    }
  }
  const auto w = grid.weights();
  std::vector<double> F(C.size());
  for (std::size_t k = 0; k < C.size(); ++k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += w[static_cast<std::size_t>(j)] * C[k](j, j);
    F[k] = s;
  }
  return F;
}

std::pair<double, double> fit_inverse(const std::vector<int>& n, const std::vector<double>& e) {
  if (n.size() != e.size() || n.size() < 2) throw std::invalid_argument("fit needs at least two matching points");
  double sxx = 0.0, sxy = 0.0, mean = 0.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    const double x = 1.0 / n[j];
    sxx += x * x;
    sxy += x * e[j];
    mean += e[j];
  }
  mean /= static_cast<double>(e.size());
  const double c = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    const double r = e[j] - c / n[j];
    ss_res += r * r;
    ss_tot += (e[j] - mean) * (e[j] - mean);
  }
  return {c, ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0};
}

TimeModeStudy time_mode_error_study(const PropagatorSolution& sol, const std::vector<double>& full_energies,
                                    const std::vector<int>& time_modes) {
  const auto& set = sol.indices();
  const std::size_t last = sol.snapshot_count() - 1;
  const int N = set.max_order();
  if (full_energies.size() < static_cast<std::size_t>(N) + 1) throw std::invalid_argument("missing full-basis energies");
  double full = 0.0;
  for (int k = 0; k <= N; ++k) full += full_energies[static_cast<std::size_t>(k)];
  std::vector<double> norms(set.size());
  for (std::size_t p = 0; p < set.size(); ++p) norms[p] = sol.space().norm2(sol.state(last, p));
  TimeModeStudy st;
  std::vector<double> errors;
  for (int n : time_modes) {
    if (n > set.spec().time_modes) throw std::invalid_argument("requested more time modes than were solved");
    double kept = 0.0;
    for (std::size_t p = 0; p < set.size(); ++p) {
      if (set[p].max_time_mode() <= n) kept += norms[p];
    }
    st.rows.push_back({n, full - kept});
    errors.push_back(full - kept);
  }
  std::tie(st.fit_c, st.fit_r_squared) = fit_inverse(time_modes, errors);
  return st;
}

TimeModeStudy time_mode_error_study(const FilterModel& model, const TimeGrid& time, const Grid& grid, int max_order,
                                    const std::vector<int>& time_modes) {
  const int n_max = *std::max_element(time_modes.begin(), time_modes.end());
  const auto sol = zakai_solve(model, {max_order, n_max, static_cast<int>(model.channels())}, time, grid);
  return time_mode_error_study(sol, full_basis_level_energies(model, time, grid, max_order), time_modes);
}

}  // namespace wce
