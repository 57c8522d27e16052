#include <iostream>

#include "CLI11.hpp"
#include "wce_cli/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wce: Wiener chaos expansion solver"};
  app.require_subcommand(1);

  wce::cli::RunOptions run;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "run the task named in a config");
  run_cmd->add_option("--config", run.config_path, "experiment config (JSON)")->required();
  auto* out_opt = run_cmd->add_option("--out", out_dir, "output directory (overrides output.directory)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "master seed (overrides seed)");
  auto* threads_opt = run_cmd->add_option("--threads", threads, "cap on OpenMP threads");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a config and report the parabolicity regime");
  validate_cmd->add_option("--config", validate_path, "experiment config (JSON)")->required();

  auto* list_cmd = app.add_subcommand("list-tasks", "list the available tasks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wce::cli::kConfigError;
  }

  if (*run_cmd) {
    if (*out_opt) run.out_dir = out_dir;
    if (*seed_opt) run.seed = seed;
    if (*threads_opt) run.threads = threads;
    return wce::cli::run(run, std::cout, std::cerr);
  }
  if (*validate_cmd) return wce::cli::validate(validate_path, std::cout, std::cerr);
  if (*list_cmd) {
    std::cout << wce::cli::list_tasks();
    return wce::cli::kOk;
  }
  return wce::cli::kConfigError;
}
