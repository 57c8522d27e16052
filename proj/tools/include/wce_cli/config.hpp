#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wce/filtering.hpp"
#include "wce/propagator.hpp"

namespace wce::cli {

/// Raised for any schema violation; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Scalar profile x -> value: "zero", "gaussian" (scale exp(-(x-center)^2 / (2 width^2))),
/// or "polynomial" (sum coefficients[j] x^j).
struct FieldSpec {
  std::string kind = "zero";
  double scale = 1.0;
  double center = 0.0;
  double width = 1.0;
  std::vector<double> coefficients;

  double operator()(double x) const;
};

/// Initial coefficient attached to a nonempty multi-index (anticipating data).
/// `index` lists (i, k, power) triples.
struct ChaosInitial {
  std::vector<std::array<int, 3>> index;
  FieldSpec field;
};

struct OperatorConfig {
  std::string kind = "constant";  // "constant" | "linear_gaussian_filter"
  // constant: A u = a u'' + b u' + c u, M_k u = sigma_k u' + nu_k u
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> sigma, nu;
  // linear_gaussian_filter: dX = beta X dt + diffusion dW, dY = observation X dt + dV, X0 ~ N(m0, p0)
  double beta = 0.0, diffusion = 1.0, observation = 1.0, m0 = 0.0, p0 = 1.0;
};

struct DomainConfig {
  std::string kind = "periodic";  // "periodic" | "interval"
  double length = 40.0;
  double lo = -1.0, hi = 1.0;
  int points = 256;
  std::string boundary = "dirichlet";  // "dirichlet" | "extrapolate"
};

struct TimeConfig {
  double horizon = 1.0;
  int steps = 1000;        // default dt = 1e-3 T
  int snapshot_every = 0;  // 0: only t = 0 and t = T
};

struct ProblemConfig {
  OperatorConfig op;
  DomainConfig domain;
  TimeConfig time;
  int max_order = 4;   // N
  int time_modes = 8;  // n
  std::string basis = "cosine";
  FieldSpec initial;
  std::vector<ChaosInitial> initial_chaos;
  FieldSpec drift;               // f, constant in time
  std::vector<FieldSpec> noise;  // g_k, constant in time
};

/// Task-specific knobs; each task reads the subset it documents.
struct TaskOptions {
  int samples = 4;
  std::vector<double> times;                 // empty: the horizon
  std::vector<std::array<double, 2>> points; // (t, x)
  int quadrature_nodes = 7;
  std::vector<std::vector<double>> h;        // h[k][i - 1]
  std::vector<int> ladder;
  int reference_order = 0;                   // 0: max(ladder) + 2
  int reference_modes = 0;                   // 0: the problem's time modes
  int replications = 200;
  int paths = 20;
  int observation_steps = 5000;
  std::vector<int> mode_ladder;
  std::vector<double> weights;  // q_k: solve with sigma_k, nu_k, g_k scaled by q_k
  // solve: "none" | "transport" (u_alpha = 0 for |alpha| > 1) |
  // "anticipating" (closed forms for a = 1/2, sigma = 1, u_(1)(0) = sqrt(T) x^2)
  std::string check = "none";
  double check_tolerance = 1e-6;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv"};
};

struct ExperimentConfig {
  std::string task = "solve";
  std::uint64_t seed = 1;
  ProblemConfig problem;
  TaskOptions options;
  OutputConfig output;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

const std::vector<std::pair<std::string, std::string>>& task_catalog();

/// Sub-seed derived by stable hashing of (master, purpose).
std::uint64_t derive_seed(std::uint64_t master, const std::string& purpose);
/// FNV-1a 64 of the canonical (sorted-key, compact) serialization.
std::uint64_t config_hash(const ExperimentConfig& c);

/// Library objects described by a configuration.
Grid make_grid(const ProblemConfig& p);
OperatorSpec make_operator(const ProblemConfig& p, const Grid& grid);
FilterModel make_filter_model(const OperatorConfig& op);
SpdeProblem make_problem(const ProblemConfig& p);

}  // namespace wce::cli
