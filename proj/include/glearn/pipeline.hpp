#pragma once

#include <cstdint>
#include <vector>

#include "glearn/analytics.hpp"
#include "glearn/config.hpp"
#include "glearn/girl.hpp"
#include "glearn/market_sim.hpp"

namespace glearn {

// Composition of the modules into the runs the CLI exposes. Seeds follow one
// rule: the market path and universe of a scenario come from the Market and
// Universe streams of its seed; trajectory k draws its realized returns from
// (Realized, k) and its actions from (Action, k); evaluation seed i is
// derive_seed(base, Evaluation, i).

/// A market path plus a universe, with the expected-return panel they imply.
struct Scenario {
  std::uint64_t seed = 0;
  MarketPath path;
  AssetUniverse universe;
  MatrixXd expected;  // T x N
};

Scenario make_scenario(const RunConfig& config, std::uint64_t seed);

/// Realized returns for trajectory k of a scenario.
ReturnsPanel trajectory_panel(const RunConfig& config, const Scenario& scenario, int k);

/// Equal split of portfolio.initial_value across all N assets.
VectorXd initial_portfolio(const RunConfig& config);

PriorPolicy make_prior(const RunConfig& config);
Dynamics make_dynamics(const Scenario& scenario);
SharpeOptions sharpe_options(const RunConfig& config);

PolicySolution solve_policy(const RunConfig& config, const Scenario& scenario,
                            const RewardParams& theta);

GirlProblem make_problem(const RunConfig& config, const Scenario& scenario);

/// Trajectories 0..count-1 of a scenario under `solution`.
std::vector<Trajectory> generate_trajectories(const RunConfig& config, const Scenario& scenario,
                                              const PolicySolution& solution, int count);

/// Largest relative violations of the bond and budget identities.
struct TrajectoryAudit {
  double max_bond_error = 0.0;
  double max_budget_error = 0.0;
};

TrajectoryAudit audit_trajectory(const Trajectory& traj, double r_f_step);

struct EvaluationResult {
  std::vector<std::uint64_t> seeds;
  std::vector<PerformanceReport> reports;
  std::vector<Trajectory> trajectories;
  TrajectoryAudit audit;  // worst case over all trajectories
  double sharpe_mean = 0.0;
  double sharpe_std = 0.0;  // sample std across seeds; 0 for a single seed
};

/// Solves and rolls out one trajectory per evaluation seed, each on its own
/// scenario. Seeds are processed concurrently; results are ordered by seed index.
EvaluationResult evaluate_over_seeds(const RunConfig& config, const RewardParams& theta);

/// Mean Sharpe of trajectories 0..count-1 of one scenario under `solution`.
double mean_sharpe(const RunConfig& config, const Scenario& scenario,
                   const PolicySolution& solution, int count);

}  // namespace glearn
