#include "glearn/analytics.hpp"

#include <cmath>
#include <numeric>

#include "glearn/errors.hpp"

namespace glearn {

std::vector<double> portfolio_values(const Trajectory& traj) {
  std::vector<double> v;
  v.reserve(traj.states.size());
  for (const auto& x : traj.states) v.push_back(x.sum());
  return v;
}

std::vector<double> portfolio_returns(const std::vector<double>& values,
                                      const std::vector<double>& contributions,
                                      bool adjust_contributions) {
  if (values.size() < 2) throw UsageError("portfolio_returns: need at least 2 values");
  if (contributions.size() + 1 != values.size()) {
    throw ShapeError("portfolio_returns: expected " + std::to_string(values.size() - 1) +
                     " contributions, got " + std::to_string(contributions.size()));
  }
  std::vector<double> r;
  r.reserve(contributions.size());
  for (std::size_t t = 0; t + 1 < values.size(); ++t) {
    if (!(values[t] > 0.0)) throw UsageError("portfolio_returns: non-positive portfolio value");
    const double gain = adjust_contributions ? values[t + 1] - contributions[t] : values[t + 1];
    r.push_back(gain / values[t] - 1.0);
  }
  return r;
}

ReturnStats return_stats(const std::vector<double>& values, const std::vector<double>& contributions,
                         double r_f_step, const SharpeOptions& options) {
  if (values.size() < 3) throw UsageError("sharpe_ratio: need at least 3 portfolio values");
  for (double v : values) {
    if (!(v > 0.0)) throw UsageError("sharpe_ratio: portfolio values must be positive");
  }
  ReturnStats s;
  s.returns = portfolio_returns(values, contributions, options.adjust_contributions);
  const auto n = static_cast<double>(s.returns.size());
  double mean = 0.0;
  for (double r : s.returns) mean += r - r_f_step;
  mean /= n;
  double ss = 0.0;
  for (double r : s.returns) ss += (r - r_f_step - mean) * (r - r_f_step - mean);
  s.mean_excess = mean;
  s.volatility = std::sqrt(ss / (n - 1.0));
  // Returns are dimensionless; dispersion at rounding level counts as none.
  if (!(s.volatility > 1e-12)) {
    throw UndefinedSharpeError("sharpe_ratio: zero return volatility");
  }
  s.sharpe = mean / s.volatility;
  if (options.annualize) s.sharpe *= std::sqrt(1.0 / options.dt);
  return s;
}

double sharpe_ratio(const std::vector<double>& values, const std::vector<double>& contributions,
                    double r_f_step, const SharpeOptions& options) {
  return return_stats(values, contributions, r_f_step, options).sharpe;
}

std::vector<double> benchmark_series(int horizon, const BenchmarkSpec& bench,
                                     const RewardParams& params) {
  std::vector<double> b;
  b.reserve(horizon + 1);
  for (int t = 0; t <= horizon; ++t) b.push_back(bench.value(t, params));
  return b;
}

PerformanceReport compare_to_benchmark(const std::vector<double>& values,
                                       const BenchmarkSpec& bench, const RewardParams& params) {
  if (values.empty()) throw UsageError("compare_to_benchmark: empty value series");
  PerformanceReport r;
  const int horizon = static_cast<int>(values.size()) - 1;
  r.final_value = values.back();
  r.benchmark_final = bench.value(horizon, params);
  r.goal_gap = r.benchmark_final - r.final_value;
  return r;
}

PerformanceReport evaluate_performance(const Trajectory& traj, const BenchmarkSpec& bench,
                                       const RewardParams& params, double r_f_step,
                                       const SharpeOptions& options) {
  const auto values = portfolio_values(traj);
  PerformanceReport r = compare_to_benchmark(values, bench, params);
  const ReturnStats stats = return_stats(values, traj.contributions, r_f_step, options);
  r.sharpe = stats.sharpe;
  r.mean_excess_return = stats.mean_excess;
  r.return_volatility = stats.volatility;
  r.total_contributions =
      std::accumulate(traj.contributions.begin(), traj.contributions.end(), 0.0);
  return r;
}

}  // namespace glearn
