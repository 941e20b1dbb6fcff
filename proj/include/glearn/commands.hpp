#pragma once

#include <filesystem>

#include "glearn/config.hpp"

namespace glearn {

// Subcommands of the `glearn` tool. Each writes its artifacts plus
// config.resolved.txt into config.output_dir and logs progress to stderr.
// `input_dir` is where upstream artifacts are read from; empty means the
// output directory.

/// market.csv, universe.json, returns.csv (realized returns of trajectory 0).
void cmd_simulate(const RunConfig& config);

/// policy.json for config.reward on the scenario of config.seed.
void cmd_solve(const RunConfig& config);

/// Rolls out config.num_trajectories trajectories from policy.json:
/// trajectories.csv, contributions.csv, rollout_report.json, plot_data.csv.
void cmd_rollout(const RunConfig& config, const std::filesystem::path& input_dir = {});

/// Fits the reward parameters to trajectories.csv: fit_report.json and
/// girl_learning_curve.csv.
void cmd_girl(const RunConfig& config, const std::filesystem::path& input_dir = {});

/// Evaluates config.reward over config.num_eval_seeds scenarios:
/// performance.json, sharpe_by_seed.csv, plot_data.csv, plot_data_by_seed.csv.
void cmd_report(const RunConfig& config);

/// Writes config.resolved.txt into config.output_dir.
void write_config_echo(const RunConfig& config);

}  // namespace glearn
