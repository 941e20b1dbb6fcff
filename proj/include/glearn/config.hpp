#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glearn/girl.hpp"
#include "glearn/glearner.hpp"
#include "glearn/market_sim.hpp"
#include "glearn/reward_model.hpp"

namespace glearn {

/// Everything a pipeline run needs. Loaded from a flat `section.key = value`
/// file; unset keys keep the defaults below.
struct RunConfig {
  MarketConfig market;
  RewardParams reward;

  /// Unset means "the initial portfolio value".
  std::optional<double> benchmark_b0;
  /// Unset means g = eta - 1.
  std::optional<double> benchmark_growth;

  double initial_value = 1000.0;

  double prior_contribution = 0.0;
  /// Unset means 10% of the initial per-asset position.
  std::optional<double> prior_sigma;

  SolverConfig solver;
  GirlConfig girl;

  std::uint64_t seed = 0;
  int num_trajectories = 100;
  int num_eval_seeds = 50;
  std::filesystem::path output_dir = "out";
  /// Paper-literal variants: the likelihood drops log pi_0 and the Sharpe
  /// ratio uses naive value ratios.
  bool replication_mode = false;
  bool annualize = false;

  RunConfig();

  void validate() const;

  BenchmarkSpec benchmark() const;
  double resolved_prior_sigma() const;
};

/// Parses `key = value` lines. `#` starts a comment; blank lines are ignored.
/// Unknown keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Sets a single key, as the parser does for each line.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Every key with its resolved value, one per line, parseable by parse_config.
std::string format_config(const RunConfig& config);

/// The documented key list, in output order.
std::vector<std::string> config_keys();

}  // namespace glearn
