#include "wce_cli/app.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "wce/propagator.hpp"

#ifndef WCE_VERSION
#define WCE_VERSION "unknown"
#endif

namespace wce::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return fmt::format("{:.16e}", *d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes through a temporary name so readers never see a half-written file.
void write_file(const fs::path& path, const std::string& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string Table::csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_cell(row[c]);
    out += '\n';
  }
  return out;
}

nlohmann::json Table::json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) {
      if (const auto* i = std::get_if<long long>(&c)) r.push_back(*i);
      else if (const auto* d = std::get_if<double>(&c)) r.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json());
      else r.push_back(std::get<std::string>(c));
    }
    rs.push_back(std::move(r));
  }
  return {{"columns", columns}, {"rows", rs}};
}

std::string list_tasks() {
  std::string out;
  for (const auto& [name, doc] : task_catalog()) out += fmt::format("{:<14}{}\n", name, doc);
  return out;
}

std::string validate_report(const ExperimentConfig& c) {
  const Grid grid = make_grid(c.problem);
  const OperatorSpec op = make_operator(c.problem, grid);
  std::vector<double> q = c.options.weights;
  q.resize(op.channels(), 1.0);
  const auto rep = parabolicity_report(op, q, &grid);
  const auto cls = rep.classification;
  std::string out = fmt::format("{}, ε={}\n", to_string(cls), rep.epsilon);
  if (!c.options.weights.empty()) out += "  (with the noise scaled by options.weights)\n";

  auto line = [&](const std::string& what, const std::string& needs, bool ok) {
    out += fmt::format("  {:<46} needs {:<34} {}\n", what, needs, ok ? "ok" : "not met");
  };
  const bool strong = cls == Parabolicity::kStrong;
  const bool weak_or_better = cls != Parabolicity::kNonParabolic;
  out += "regimes:\n";
  if (c.problem.op.kind == "constant") {
    const auto& op_c = c.problem.op;
    double s2 = 0.0;
    for (std::size_t k = 0; k < op_c.sigma.size(); ++k) s2 += q[k] * q[k] * op_c.sigma[k] * op_c.sigma[k];
    const bool bounded = s2 == 0.0;
    line("mean-square convergence of the expansion", "weak parabolicity (ε >= 0)", weak_or_better);
    line("geometric level decay F_n <= |u0|^2/(1+b)^n", "strong parabolicity (ε > 0)", strong && !bounded);
    line("factorial level decay", "bounded noise (all sigma = 0)", bounded);
    line("energy conservation sum F_n(t) = E|u(t)|^2", "weak parabolicity, c = nu = 0", weak_or_better);
    line("sampling against the exact transport solution", "ε = 0 (a = sigma^2 / 2)", cls == Parabolicity::kWeak);
    line("S-transform and moment checks", "any regime (finite truncation)", true);
    if (!weak_or_better) {
      const double suggest = op_c.a > 0.0 ? 0.5 * std::sqrt(2.0 * op_c.a / s2) : 0.0;
      out += "the expansion diverges in L2 of the Wiener space; use the weighted-space energies:\n";
      out += fmt::format(
          "  task 'energy' with options.weights = [q, ...], q_k below sqrt(2a / sum sigma_k^2); e.g. q = {:.4g}\n",
          suggest);
    }
  } else {
    line("Zakai expansion and filtering error bounds", "weak parabolicity (ε >= 0)", weak_or_better);
    line("geometric order decay of the filter error", "strong parabolicity (ε > 0)", strong);
  }
  return out;
}

int validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    out << validate_report(load_config(config_path));
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig config;
  try {
    config = load_config(opts.config_path);
    if (opts.out_dir) config.output.directory = *opts.out_dir;
    if (opts.seed) config.seed = *opts.seed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (opts.threads) {
    if (*opts.threads < 1) {
      err << "config error: --threads: must be positive\n";
      return kConfigError;
    }
    omp_set_num_threads(*opts.threads);
  }

  TaskResult result;
  try {
    result = run_task(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalInstability& e) {
    err << "numerical failure: " << e.what() << " (alpha " << e.alpha().to_string() << ", step " << e.step() << ")\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(config.output.directory);
  json artifacts = json::array();
  try {
    fs::create_directories(dir);
    for (const auto& t : result.tables) {
      for (const auto& f : config.output.formats) {
        const std::string body = f == "csv" ? t.csv() : t.json().dump(2) + "\n";
        const std::string name = t.name + "." + f;
        write_file(dir / name, body);
        artifacts.push_back({{"file", name}, {"rows", t.rows.size()}, {"fnv1a64", hex(fnv1a(body))}});
      }
    }
    json manifest = {
        {"task", config.task},
        {"config_hash", hex(config_hash(config))},
        {"seed", config.seed},
        {"versions",
         {{"wce", WCE_VERSION},
          {"compiler", __VERSION__},
          {"fmt", FMT_VERSION},
          {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                        NLOHMANN_JSON_VERSION_PATCH)}}},
        {"boundary_mass", result.boundary_mass},
        {"runtimes", {{"solve_seconds", result.solve_seconds}, {"total_seconds", total}}},
        {"threads", omp_get_max_threads()},
        {"check_passed", result.check_passed},
        {"created", utc_now()},
        {"artifacts", artifacts},
        {"config", to_json(config)},
    };
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kConfigError;
  }

  out << fmt::format("task {}: wrote {} file(s) to {}\n", config.task, artifacts.size() + 1, dir.string());
  for (const auto& l : result.report) out << "  " << l << '\n';
  if (result.boundary_mass > 1e-6 && config.problem.domain.boundary != "extrapolate") {
    out << fmt::format("  warning: boundary mass fraction {:.2e}; enlarge the domain\n", result.boundary_mass);
  }
  return result.check_passed ? kOk : kCheckFailed;
}

}  // namespace wce::cli
