#pragma once

#include <vector>

#include "glearn/glearner.hpp"
#include "glearn/reward_model.hpp"

namespace glearn {

struct PerformanceReport {
  double sharpe = 0.0;
  double mean_excess_return = 0.0;  // per step
  double return_volatility = 0.0;   // per step, sample std
  double total_contributions = 0.0;
  double final_value = 0.0;
  double benchmark_final = 0.0;
  double goal_gap = 0.0;            // B_T - v_T
};

struct SharpeOptions {
  /// Subtract the step's contribution before measuring the return, so cash
  /// injections do not count as performance. When false: v_{t+1} / v_t - 1.
  bool adjust_contributions = true;
  /// Multiply by sqrt(1 / dt) when set.
  bool annualize = false;
  double dt = 0.25;
};

struct ReturnStats {
  std::vector<double> returns;  // portfolio return per step
  double mean_excess = 0.0;
  double volatility = 0.0;
  double sharpe = 0.0;
};

/// v_t = 1'x_t.
std::vector<double> portfolio_values(const Trajectory& traj);

/// Per-step portfolio returns: (v_{t+1} - c_t) / v_t - 1, or the naive ratio.
std::vector<double> portfolio_returns(const std::vector<double>& values,
                                      const std::vector<double>& contributions,
                                      bool adjust_contributions = true);

/// Full return statistics. Requires at least 3 values, all positive.
ReturnStats return_stats(const std::vector<double>& values, const std::vector<double>& contributions,
                         double r_f_step, const SharpeOptions& options = {});

double sharpe_ratio(const std::vector<double>& values, const std::vector<double>& contributions,
                    double r_f_step, const SharpeOptions& options = {});

/// Benchmark series B_0..B_T for a series of T+1 values.
std::vector<double> benchmark_series(int horizon, const BenchmarkSpec& bench,
                                     const RewardParams& params);

/// Fills final_value, benchmark_final and goal_gap.
PerformanceReport compare_to_benchmark(const std::vector<double>& values,
                                       const BenchmarkSpec& bench, const RewardParams& params);

PerformanceReport evaluate_performance(const Trajectory& traj, const BenchmarkSpec& bench,
                                       const RewardParams& params, double r_f_step,
                                       const SharpeOptions& options = {});

}  // namespace glearn
