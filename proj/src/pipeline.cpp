#include "glearn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "glearn/rng.hpp"

namespace glearn {

Scenario make_scenario(const RunConfig& config, std::uint64_t seed) {
  config.market.validate();
  Scenario s;
  s.seed = seed;
  s.path = simulate_market(config.market, derive_seed(seed, Stream::Market));
  s.universe = draw_universe(config.market, derive_seed(seed, Stream::Universe));
  s.expected = expected_returns(s.universe, s.path, config.market);
  return s;
}

ReturnsPanel trajectory_panel(const RunConfig& config, const Scenario& scenario, int k) {
  ReturnsPanel p;
  p.expected = scenario.expected;
  p.realized = realized_returns(scenario.universe, scenario.path, scenario.expected, config.market,
                                derive_seed(scenario.seed, Stream::Realized,
                                            static_cast<std::uint64_t>(k)));
  return p;
}

VectorXd initial_portfolio(const RunConfig& config) {
  const int n = config.market.num_assets();
  return VectorXd::Constant(n, config.initial_value / n);
}

PriorPolicy make_prior(const RunConfig& config) {
  return PriorPolicy::make_default(config.market.num_assets(), config.market.num_steps,
                                   config.prior_contribution, config.resolved_prior_sigma());
}

Dynamics make_dynamics(const Scenario& scenario) {
  return Dynamics{scenario.expected, scenario.universe.sigma_r};
}

SharpeOptions sharpe_options(const RunConfig& config) {
  SharpeOptions o;
  o.adjust_contributions = !config.replication_mode;
  o.annualize = config.annualize;
  o.dt = config.market.dt;
  return o;
}

PolicySolution solve_policy(const RunConfig& config, const Scenario& scenario,
                            const RewardParams& theta) {
  const auto rewards =
      build_rewards(theta, config.benchmark(), scenario.expected, scenario.universe.sigma_r);
  return backward_solve(rewards, make_prior(config), config.solver, make_dynamics(scenario));
}

GirlProblem make_problem(const RunConfig& config, const Scenario& scenario) {
  GirlProblem p;
  p.dynamics = make_dynamics(scenario);
  p.benchmark = config.benchmark();
  p.prior = make_prior(config);
  p.solver = config.solver;
  p.r_f_step = config.market.bond_step_return();
  p.include_prior_term = !config.replication_mode;
  return p;
}

std::vector<Trajectory> generate_trajectories(const RunConfig& config, const Scenario& scenario,
                                              const PolicySolution& solution, int count) {
  const VectorXd x0 = initial_portfolio(config);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    out.push_back(rollout(solution, trajectory_panel(config, scenario, k), x0,
                          derive_seed(scenario.seed, Stream::Action, static_cast<std::uint64_t>(k))));
  }
  return out;
}

TrajectoryAudit audit_trajectory(const Trajectory& traj, double r_f_step) {
  TrajectoryAudit a;
  for (int t = 0; t < traj.horizon(); ++t) {
    const double z0 = traj.states[t][0] + traj.actions[t][0];
    const double expected = (1.0 + r_f_step) * z0;
    const double bond = std::abs(traj.states[t + 1][0] - expected) / std::max(1.0, std::abs(expected));
    const double sum_u = traj.actions[t].sum();
    const double budget =
        std::abs(traj.contributions[t] - sum_u) / std::max(1.0, std::abs(sum_u));
    a.max_bond_error = std::max(a.max_bond_error, bond);
    a.max_budget_error = std::max(a.max_budget_error, budget);
  }
  return a;
}

namespace {

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

EvaluationResult evaluate_over_seeds(const RunConfig& config, const RewardParams& theta) {
  config.validate();
  theta.validate();
  const int n = config.num_eval_seeds;
  const double r_f = config.market.bond_step_return();
  const auto options = sharpe_options(config);
  const auto bench = config.benchmark();

  struct One {
    PerformanceReport report;
    Trajectory traj;
  };
  std::vector<std::future<One>> jobs;
  jobs.reserve(static_cast<std::size_t>(n));
  EvaluationResult result;
  for (int i = 0; i < n; ++i) {
    const auto seed = derive_seed(config.seed, Stream::Evaluation, static_cast<std::uint64_t>(i));
    result.seeds.push_back(seed);
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      const auto scenario = make_scenario(config, seed);
      const auto solution = solve_policy(config, scenario, theta);
      auto traj = generate_trajectories(config, scenario, solution, 1).front();
      One one{evaluate_performance(traj, bench, theta, r_f, options), std::move(traj)};
      return one;
    }));
  }

  std::vector<double> sharpes;
  for (auto& job : jobs) {
    auto one = job.get();
    const auto audit = audit_trajectory(one.traj, r_f);
    result.audit.max_bond_error = std::max(result.audit.max_bond_error, audit.max_bond_error);
    result.audit.max_budget_error = std::max(result.audit.max_budget_error, audit.max_budget_error);
    sharpes.push_back(one.report.sharpe);
    result.reports.push_back(one.report);
    result.trajectories.push_back(std::move(one.traj));
  }
  double sum = 0.0;
  for (double s : sharpes) sum += s;
  result.sharpe_mean = sum / static_cast<double>(sharpes.size());
  result.sharpe_std = sample_std(sharpes, result.sharpe_mean);
  return result;
}

double mean_sharpe(const RunConfig& config, const Scenario& scenario,
                   const PolicySolution& solution, int count) {
  const auto trajs = generate_trajectories(config, scenario, solution, count);
  const double r_f = config.market.bond_step_return();
  const auto options = sharpe_options(config);
  double sum = 0.0;
  for (const auto& tr : trajs) {
    sum += sharpe_ratio(portfolio_values(tr), tr.contributions, r_f, options);
  }
  return sum / static_cast<double>(trajs.size());
}

}  // namespace glearn
