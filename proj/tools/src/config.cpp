#include "wce_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace wce::cli {

using nlohmann::json;

namespace {

// Object reader that records which keys were consumed and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  const json* get(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& k, double& out) {
    if (const json* v = get(k)) {
      if (!v->is_number()) throw ConfigError(key(k), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(key(k), "must be finite");
    }
  }

  void integer(const std::string& k, int& out, int lo, int hi) {
    if (const json* v = get(k)) {
      if (!v->is_number_integer()) throw ConfigError(key(k), "expected an integer");
      const auto x = v->get<long long>();
      if (x < lo || x > hi) throw ConfigError(key(k), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out = static_cast<int>(x);
    }
  }

  void string(const std::string& k, std::string& out, std::initializer_list<const char*> allowed = {}) {
    if (const json* v = get(k)) {
      if (!v->is_string()) throw ConfigError(key(k), "expected a string");
      out = v->get<std::string>();
      if (allowed.size() && std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return out == a; })) {
        std::string list;
        for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        throw ConfigError(key(k), "unknown value '" + out + "' (expected one of: " + list + ")");
      }
    }
  }

  void numbers(const std::string& k, std::vector<double>& out) {
    if (const json* v = get(k)) {
      if (!v->is_array()) throw ConfigError(key(k), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) throw ConfigError(key(k) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back((*v)[i].get<double>());
      }
    }
  }

  void integers(const std::string& k, std::vector<int>& out, int lo, int hi) {
    if (const json* v = get(k)) {
      if (!v->is_array()) throw ConfigError(key(k), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& e = (*v)[i];
        const std::string ek = key(k) + "[" + std::to_string(i) + "]";
        if (!e.is_number_integer()) throw ConfigError(ek, "expected an integer");
        const auto x = e.get<long long>();
        if (x < lo || x > hi) throw ConfigError(ek, "out of range");
        out.push_back(static_cast<int>(x));
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

FieldSpec parse_field(const json& j, const std::string& path) {
  Reader r(j, path);
  FieldSpec f;
  r.string("kind", f.kind, {"zero", "gaussian", "polynomial"});
  r.number("scale", f.scale);
  r.number("center", f.center);
  r.number("width", f.width);
  r.numbers("coefficients", f.coefficients);
  r.finish();
  if (f.kind == "gaussian" && !(f.width > 0.0)) throw ConfigError(r.key("width"), "must be positive");
  return f;
}

json field_json(const FieldSpec& f) {
  return {{"kind", f.kind}, {"scale", f.scale}, {"center", f.center}, {"width", f.width}, {"coefficients", f.coefficients}};
}

}  // namespace

double FieldSpec::operator()(double x) const {
  if (kind == "gaussian") {
    const double z = (x - center) / width;
    return scale * std::exp(-0.5 * z * z);
  }
  if (kind == "polynomial") {
    double v = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * x + *it;
    return v;
  }
  return 0.0;
}

const std::vector<std::pair<std::string, std::string>>& task_catalog() {
  static const std::vector<std::pair<std::string, std::string>> tasks = {
      {"solve", "integrate the propagator; per-coefficient norms at every snapshot, optional closed-form check"},
      {"sample", "reconstruct field realizations from seeded Gaussian coordinates"},
      {"moments", "moments of order 1-4 at (t, x) points against tensor Gauss-Hermite quadrature"},
      {"energy", "per-level energies F_n(t) with the decay bound; options.weights gives the weighted-space energies"},
      {"stransform", "S-transform of the expansion against the directly solved shifted equation"},
      {"convergence", "truncation error over a ladder of orders N, with observed and theoretical ratios"},
      {"filter", "Zakai posterior mean along a simulated path against the Kalman-Bucy filter"},
      {"filter-study", "filtering truncation error over order and time-mode ladders"},
  };
  return tasks;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Reader root(j, "");
  std::string task = c.task;
  {
    const json* t = root.get("task");
    if (!t) throw ConfigError("task", "missing");
    if (!t->is_string()) throw ConfigError("task", "expected a string");
    task = t->get<std::string>();
    const auto& cat = task_catalog();
    if (std::none_of(cat.begin(), cat.end(), [&](const auto& e) { return e.first == task; })) {
      throw ConfigError("task", "unknown task '" + task + "'");
    }
    c.task = task;
  }
  if (const json* s = root.get("seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<long long>() < 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    c.seed = s->get<std::uint64_t>();
  }

  const json* pj = root.get("problem");
  if (!pj) throw ConfigError("problem", "missing");
  {
    Reader p(*pj, "problem");
    auto& P = c.problem;
    if (const json* oj = p.get("operator")) {
      Reader o(*oj, "problem.operator");
      auto& op = P.op;
      o.string("kind", op.kind, {"constant", "linear_gaussian_filter"});
      o.number("a", op.a);
      o.number("b", op.b);
      o.number("c", op.c);
      o.numbers("sigma", op.sigma);
      o.numbers("nu", op.nu);
      o.number("beta", op.beta);
      o.number("diffusion", op.diffusion);
      o.number("observation", op.observation);
      o.number("m0", op.m0);
      o.number("p0", op.p0);
      o.finish();
      if (op.kind == "constant") {
        if (op.sigma.empty()) throw ConfigError("problem.operator.sigma", "at least one channel is required");
        if (op.nu.empty()) op.nu.assign(op.sigma.size(), 0.0);
        if (op.nu.size() != op.sigma.size()) throw ConfigError("problem.operator.nu", "must have one entry per sigma");
        if (op.a < 0.0) throw ConfigError("problem.operator.a", "must be non-negative");
      } else if (!(op.p0 > 0.0)) {
        throw ConfigError("problem.operator.p0", "must be positive");
      }
    } else {
      throw ConfigError("problem.operator", "missing");
    }
    if (const json* dj = p.get("domain")) {
      Reader d(*dj, "problem.domain");
      auto& D = P.domain;
      d.string("kind", D.kind, {"periodic", "interval"});
      d.number("length", D.length);
      d.number("lo", D.lo);
      d.number("hi", D.hi);
      d.integer("points", D.points, 3, 1 << 20);
      d.string("boundary", D.boundary, {"dirichlet", "extrapolate"});
      d.finish();
      if (D.kind == "periodic") {
        if (!(D.length > 0.0)) throw ConfigError("problem.domain.length", "must be positive");
        if (D.points < 8 || (D.points & (D.points - 1))) {
          throw ConfigError("problem.domain.points", "periodic grids need a power of two >= 8");
        }
      } else if (!(D.hi > D.lo)) {
        throw ConfigError("problem.domain.hi", "must exceed lo");
      }
    }
    if (const json* tj = p.get("time")) {
      Reader t(*tj, "problem.time");
      t.number("horizon", P.time.horizon);
      t.integer("steps", P.time.steps, 1, 100000000);
      t.integer("snapshot_every", P.time.snapshot_every, 0, 100000000);
      t.finish();
      if (!(P.time.horizon > 0.0)) throw ConfigError("problem.time.horizon", "must be positive");
    }
    if (const json* tj = p.get("truncation")) {
      Reader t(*tj, "problem.truncation");
      t.integer("max_order", P.max_order, 0, 64);
      t.integer("time_modes", P.time_modes, 1, 4096);
      t.string("basis", P.basis, {"cosine"});
      t.finish();
    }
    if (const json* ij = p.get("initial")) P.initial = parse_field(*ij, "problem.initial");
    if (const json* cj = p.get("initial_chaos")) {
      if (!cj->is_array()) throw ConfigError("problem.initial_chaos", "expected an array");
      for (std::size_t e = 0; e < cj->size(); ++e) {
        const std::string path = "problem.initial_chaos[" + std::to_string(e) + "]";
        Reader r((*cj)[e], path);
        ChaosInitial ci;
        const json* idx = r.get("index");
        if (!idx || !idx->is_array() || idx->empty()) throw ConfigError(r.key("index"), "expected a nonempty array of [i, k, power]");
        for (const auto& t : *idx) {
          if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
              !t[2].is_number_integer() || t[0].get<int>() < 1 || t[1].get<int>() < 1 || t[2].get<int>() < 1) {
            throw ConfigError(r.key("index"), "entries must be [i >= 1, k >= 1, power >= 1]");
          }
          ci.index.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
        }
        const json* fj = r.get("field");
        if (!fj) throw ConfigError(r.key("field"), "missing");
        ci.field = parse_field(*fj, r.key("field"));
        r.finish();
        P.initial_chaos.push_back(std::move(ci));
      }
    }
    if (const json* fj = p.get("drift")) P.drift = parse_field(*fj, "problem.drift");
    if (const json* gj = p.get("noise")) {
      if (!gj->is_array()) throw ConfigError("problem.noise", "expected an array");
      for (std::size_t k = 0; k < gj->size(); ++k) {
        P.noise.push_back(parse_field((*gj)[k], "problem.noise[" + std::to_string(k) + "]"));
      }
    }
    p.finish();
    if (P.op.kind == "constant") {
      const int r = static_cast<int>(P.op.sigma.size());
      if (static_cast<int>(P.noise.size()) > r) throw ConfigError("problem.noise", "more entries than channels");
      for (std::size_t e = 0; e < P.initial_chaos.size(); ++e) {
        for (const auto& t : P.initial_chaos[e].index) {
          const std::string key = "problem.initial_chaos[" + std::to_string(e) + "].index";
          if (t[0] > P.time_modes || t[1] > r) throw ConfigError(key, "slot outside the truncation");
        }
      }
    } else {
      if (P.domain.kind != "interval" || P.domain.boundary != "dirichlet") {
        throw ConfigError("problem.domain.kind", "filtering needs a Dirichlet interval");
      }
      if (!P.initial_chaos.empty() || !P.noise.empty() || P.drift.kind != "zero") {
        throw ConfigError("problem.operator.kind", "filtering problems take no initial/drift/noise data");
      }
    }
  }

  if (const json* oj = root.get("options")) {
    Reader o(*oj, "options");
    auto& O = c.options;
    o.integer("samples", O.samples, 1, 1000000);
    o.numbers("times", O.times);
    if (const json* pts = o.get("points")) {
      if (!pts->is_array()) throw ConfigError("options.points", "expected an array of [t, x]");
      for (std::size_t i = 0; i < pts->size(); ++i) {
        const auto& e = (*pts)[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
          throw ConfigError("options.points[" + std::to_string(i) + "]", "expected [t, x]");
        }
        O.points.push_back({e[0].get<double>(), e[1].get<double>()});
      }
    }
    o.integer("quadrature_nodes", O.quadrature_nodes, 1, 64);
    if (const json* hj = o.get("h")) {
      if (!hj->is_array()) throw ConfigError("options.h", "expected one array per channel");
      for (std::size_t k = 0; k < hj->size(); ++k) {
        const std::string key = "options.h[" + std::to_string(k) + "]";
        if (!(*hj)[k].is_array()) throw ConfigError(key, "expected an array of numbers");
        std::vector<double> row;
        for (const auto& v : (*hj)[k]) {
          if (!v.is_number()) throw ConfigError(key, "expected numbers");
          row.push_back(v.get<double>());
        }
        O.h.push_back(std::move(row));
      }
    }
    o.integers("ladder", O.ladder, 0, 64);
    o.integer("reference_order", O.reference_order, 0, 64);
    o.integer("reference_modes", O.reference_modes, 0, 4096);
    o.integer("replications", O.replications, 1, 10000000);
    o.integer("paths", O.paths, 1, 1000000);
    o.integer("observation_steps", O.observation_steps, 1, 100000000);
    o.integers("mode_ladder", O.mode_ladder, 1, 4096);
    o.numbers("weights", O.weights);
    o.string("check", O.check, {"none", "transport", "anticipating"});
    o.number("check_tolerance", O.check_tolerance);
    o.finish();
    for (std::size_t i = 0; i < O.times.size(); ++i) {
      if (O.times[i] < 0.0 || O.times[i] > c.problem.time.horizon) {
        throw ConfigError("options.times[" + std::to_string(i) + "]", "outside [0, horizon]");
      }
    }
    for (std::size_t i = 0; i < O.points.size(); ++i) {
      if (O.points[i][0] < 0.0 || O.points[i][0] > c.problem.time.horizon) {
        throw ConfigError("options.points[" + std::to_string(i) + "]", "time outside [0, horizon]");
      }
    }
    for (std::size_t k = 0; k < O.weights.size(); ++k) {
      if (!(O.weights[k] > 0.0)) throw ConfigError("options.weights[" + std::to_string(k) + "]", "must be positive");
    }
  }

  if (const json* oj = root.get("output")) {
    Reader o(*oj, "output");
    if (const json* dj = o.get("directory")) {
      if (!dj->is_string() || dj->get<std::string>().empty()) throw ConfigError("output.directory", "expected a path");
      c.output.directory = dj->get<std::string>();
    }
    if (const json* fj = o.get("formats")) {
      if (!fj->is_array() || fj->empty()) throw ConfigError("output.formats", "expected a nonempty array");
      c.output.formats.clear();
      for (const auto& f : *fj) {
        if (!f.is_string() || (f != "csv" && f != "json")) throw ConfigError("output.formats", "entries must be 'csv' or 'json'");
        c.output.formats.push_back(f.get<std::string>());
      }
    }
    o.finish();
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  const auto& P = c.problem;
  json chaos = json::array();
  for (const auto& ci : P.initial_chaos) {
    json idx = json::array();
    for (const auto& t : ci.index) idx.push_back({t[0], t[1], t[2]});
    chaos.push_back({{"index", idx}, {"field", field_json(ci.field)}});
  }
  json noise = json::array();
  for (const auto& g : P.noise) noise.push_back(field_json(g));
  json points = json::array();
  for (const auto& p : c.options.points) points.push_back({p[0], p[1]});
  const auto& op = P.op;
  const auto& O = c.options;
  return {
      {"task", c.task},
      {"seed", c.seed},
      {"problem",
       {{"operator",
         {{"kind", op.kind}, {"a", op.a}, {"b", op.b}, {"c", op.c}, {"sigma", op.sigma}, {"nu", op.nu},
          {"beta", op.beta}, {"diffusion", op.diffusion}, {"observation", op.observation}, {"m0", op.m0}, {"p0", op.p0}}},
        {"domain",
         {{"kind", P.domain.kind}, {"length", P.domain.length}, {"lo", P.domain.lo}, {"hi", P.domain.hi},
          {"points", P.domain.points}, {"boundary", P.domain.boundary}}},
        {"time", {{"horizon", P.time.horizon}, {"steps", P.time.steps}, {"snapshot_every", P.time.snapshot_every}}},
        {"truncation", {{"max_order", P.max_order}, {"time_modes", P.time_modes}, {"basis", P.basis}}},
        {"initial", field_json(P.initial)},
        {"initial_chaos", chaos},
        {"drift", field_json(P.drift)},
        {"noise", noise}}},
      {"options",
       {{"samples", O.samples}, {"times", O.times}, {"points", points}, {"quadrature_nodes", O.quadrature_nodes},
        {"h", O.h}, {"ladder", O.ladder}, {"reference_order", O.reference_order},
        {"reference_modes", O.reference_modes}, {"replications", O.replications}, {"paths", O.paths},
        {"observation_steps", O.observation_steps}, {"mode_ladder", O.mode_ladder}, {"weights", O.weights},
        {"check", O.check}, {"check_tolerance", O.check_tolerance}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, const std::string& purpose) {
  // splitmix64 finalizer over FNV-1a of the purpose, keyed by the master seed.
  std::uint64_t z = fnv1a(purpose) ^ (master + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j["output"].erase("directory");  // where artifacts go does not change them
  return fnv1a(j.dump());
}

Grid make_grid(const ProblemConfig& p) {
  const auto& d = p.domain;
  if (d.kind == "periodic") return Grid::periodic(d.length, d.points);
  return Grid::interval(d.lo, d.hi, d.points, d.boundary == "extrapolate" ? Boundary::kExtrapolate : Boundary::kDirichlet);
}

OperatorSpec make_operator(const ProblemConfig& p, const Grid& grid) {
  if (p.op.kind == "linear_gaussian_filter") {
    (void)grid;
    return make_filter_model(p.op).zakai_operator();
  }
  ConstantCoefficients c;
  c.a = p.op.a;
  c.b = p.op.b;
  c.c = p.op.c;
  c.sigma = p.op.sigma;
  c.nu = p.op.nu;
  return {c};
}

FilterModel make_filter_model(const OperatorConfig& op) {
  return FilterModel::linear_gaussian(op.beta, op.diffusion, op.observation, op.m0, op.p0);
}

SpdeProblem make_problem(const ProblemConfig& p) {
  const Grid grid = make_grid(p);
  const OperatorSpec op = make_operator(p, grid);
  const std::size_t r = op.channels();
  SpdeProblem prob;
  prob.space = make_discretization(grid, op);
  prob.trunc = {p.max_order, p.time_modes, static_cast<int>(r)};
  prob.time = {p.time.horizon, p.time.steps};
  prob.initial[MultiIndex{}] = grid.sample(p.initial);
  for (const auto& ci : p.initial_chaos) {
    std::vector<std::pair<Slot, int>> entries;
    for (const auto& t : ci.index) entries.push_back({Slot{t[0], t[1]}, t[2]});
    prob.initial[MultiIndex(entries)] = grid.sample(ci.field);
  }
  if (p.drift.kind != "zero") {
    const Field f = grid.sample(p.drift);
    prob.drift[MultiIndex{}] = [f](double) { return f; };
  }
  prob.noise.resize(r);
  for (std::size_t k = 0; k < p.noise.size(); ++k) {
    if (p.noise[k].kind == "zero") continue;
    const Field g = grid.sample(p.noise[k]);
    prob.noise[k][MultiIndex{}] = [g](double) { return g; };
  }
  if (p.time.snapshot_every > 0) prob.snapshot_every(p.time.snapshot_every);
  return prob;
}

}  // namespace wce::cli
