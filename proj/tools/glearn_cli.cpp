// glearn: command-line driver for the goal-based G-learning pipeline.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "glearn/commands.hpp"
#include "glearn/config.hpp"
#include "glearn/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-based portfolio optimization with G-learning and GIRL"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string input_dir;
  std::optional<int> trajectories;
  bool replication_mode = false;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base seed (overrides run.seed)");
  app.add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
  app.add_option("--trajectories", trajectories,
                 "Number of trajectories (overrides run.num_trajectories)");
  app.add_flag("--replication-mode", replication_mode,
               "Paper-literal variants: likelihood without log pi_0, naive Sharpe returns");
  app.add_option("--input", input_dir,
                 "Directory holding upstream artifacts (default: the output directory)");
  app.add_option("--set", overrides, "Override a config key, e.g. --set market.num_risky=9")
      ->type_name("KEY=VALUE");

  auto* simulate = app.add_subcommand("simulate", "Simulate the market and write returns");
  auto* solve = app.add_subcommand("solve", "Solve the G-learner and write policy.json");
  auto* rollout = app.add_subcommand("rollout", "Roll out trajectories from policy.json");
  auto* girl = app.add_subcommand("girl", "Recover reward parameters from trajectories.csv");
  auto* report = app.add_subcommand("report", "Aggregate Sharpe over evaluation seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    glearn::RunConfig config =
        config_path.empty() ? glearn::RunConfig{} : glearn::load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw glearn::UsageError("--set expects KEY=VALUE, got " + kv);
      glearn::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (trajectories) config.num_trajectories = *trajectories;
    if (replication_mode) config.replication_mode = true;
    config.validate();

    if (simulate->parsed()) glearn::cmd_simulate(config);
    if (solve->parsed()) glearn::cmd_solve(config);
    if (rollout->parsed()) glearn::cmd_rollout(config, input_dir);
    if (girl->parsed()) glearn::cmd_girl(config, input_dir);
    if (report->parsed()) glearn::cmd_report(config);
  } catch (const glearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const glearn::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kConfig;
  } catch (const glearn::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kConfig;
  } catch (const glearn::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const glearn::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
