// SPDX-License-Identifier: MIT
//
// Batch front door: `plastlab run <config.json>` executes one scenario and
// writes its artifacts; `plastlab describe <name>` prints catalog entries.
// Errors are reported as single-line JSON records on stdout with exit codes
// 2 (config), 3 (solver/io), 4 (check failure).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <plastlab/scenario.hpp>

namespace {

int emit_error(const plastlab::ScenarioError& err) {
  std::cout << err.record().dump() << "\n";
  return err.exit_code();
}

int run_command(const std::string& config_path, int jobs,
                std::optional<std::uint64_t> seed,
                std::optional<std::string> out_dir) {
  plastlab::ojson config;
  try {
    const std::string text = plastlab::read_file(config_path);
    config = plastlab::ojson::parse(text);
  } catch (const std::exception& e) {
    return emit_error(plastlab::config_error(std::string("cannot load config: ") +
                                             e.what()));
  }

  plastlab::ScenarioRun run;
  try {
    run = plastlab::execute_scenario(config, jobs, seed, out_dir);
  } catch (const std::exception& e) {
    return emit_error(plastlab::solver_error(e.what()));
  }

  if (!run.files.empty()) {
    std::string dir = "out";
    if (out_dir) {
      dir = *out_dir;
    } else if (config.is_object() && config.contains("output") &&
               config.at("output").is_string()) {
      dir = config.at("output").get<std::string>();
    }
    try {
      for (const auto& [name, bytes] : run.files)
        plastlab::write_file(std::filesystem::path(dir) / name, bytes);
    } catch (const std::exception& e) {
      return emit_error(plastlab::ScenarioError(3, "io", e.what()));
    }
  }

  if (run.exit_code != 0) std::cout << run.error.dump() << "\n";
  return run.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plastlab: desk-scale elastoplasticity laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string describe_name;
  int jobs = 1;
  std::uint64_t seed_value = 0;
  std::string out_value;

  CLI::App* run_cmd = app.add_subcommand("run", "execute one scenario config");
  run_cmd->add_option("config", config_path, "path to the scenario JSON file")
      ->required();
  run_cmd->add_option("--jobs", jobs, "worker threads for independent solves")
      ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt =
      run_cmd->add_option("--seed", seed_value, "override the scenario RNG seed");
  CLI::Option* out_opt =
      run_cmd->add_option("--out", out_value, "override the artifact directory");

  CLI::App* describe_cmd =
      app.add_subcommand("describe", "print a model/experiment catalog entry");
  describe_cmd->add_option("name", describe_name, "catalog entry name")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (describe_cmd->parsed()) {
    try {
      std::cout << plastlab::describe_entry(describe_name);
      return 0;
    } catch (const plastlab::ScenarioError& err) {
      return emit_error(err);
    }
  }

  std::optional<std::uint64_t> seed;
  if (seed_opt->count() > 0) seed = seed_value;
  std::optional<std::string> out_dir;
  if (out_opt->count() > 0) out_dir = out_value;
  return run_command(config_path, jobs, seed, out_dir);
}
