#include "glearn/commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "glearn/errors.hpp"
#include "glearn/io.hpp"
#include "glearn/pipeline.hpp"

namespace glearn {

namespace fs = std::filesystem;
using io::Json;

namespace {

void log(const std::string& msg) { std::cerr << "[glearn] " << msg << '\n'; }

fs::path artifact(const fs::path& dir, const std::string& name, const std::string& producer) {
  const fs::path p = dir / name;
  if (!fs::exists(p)) {
    throw IoError("missing artifact " + p.string() + " (produce it with `glearn " + producer +
                  "` or point --input at its directory)");
  }
  return p;
}

fs::path input_or_output(const RunConfig& config, const fs::path& input_dir) {
  return input_dir.empty() ? config.output_dir : input_dir;
}

Json stats_json(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return {{"mean", mean}, {"std", sd}, {"count", values.size()}};
}

}  // namespace

void write_config_echo(const RunConfig& config) {
  io::write_text(config.output_dir / "config.resolved.txt", format_config(config));
}

void cmd_simulate(const RunConfig& config) {
  config.validate();
  log("simulating market (seed " + std::to_string(config.seed) + ")");
  const auto scenario = make_scenario(config, config.seed);
  const auto panel = trajectory_panel(config, scenario, 0);
  write_config_echo(config);
  io::write_market_csv(config.output_dir / "market.csv", scenario.path);
  io::write_json(config.output_dir / "universe.json", io::to_json(scenario.universe));
  io::write_returns_csv(config.output_dir / "returns.csv", panel);
  log("wrote market.csv, universe.json, returns.csv to " + config.output_dir.string());
}

void cmd_solve(const RunConfig& config) {
  config.validate();
  const auto scenario = make_scenario(config, config.seed);
  log("solving N=" + std::to_string(config.market.num_assets()) +
      " T=" + std::to_string(config.market.num_steps));
  const auto start = std::chrono::steady_clock::now();
  const auto solution = solve_policy(config, scenario, config.reward);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream msg;
  msg << "solved in " << secs << " s, " << solution.sweeps << " sweep(s)";
  log(msg.str());
  write_config_echo(config);
  io::write_json(config.output_dir / "policy.json", io::to_json(solution));
}

void cmd_rollout(const RunConfig& config, const fs::path& input_dir) {
  config.validate();
  const fs::path in = input_or_output(config, input_dir);
  const auto solution = io::policy_from_json(io::read_json(artifact(in, "policy.json", "solve")));
  if (solution.horizon() != config.market.num_steps ||
      solution.num_assets() != config.market.num_assets()) {
    throw ConfigError("policy.json does not match the configured horizon and asset count");
  }
  const auto scenario = make_scenario(config, config.seed);
  log("rolling out " + std::to_string(config.num_trajectories) + " trajectories");
  const auto trajs = generate_trajectories(config, scenario, solution, config.num_trajectories);

  const double r_f = config.market.bond_step_return();
  const auto options = sharpe_options(config);
  const auto bench = config.benchmark();
  Json per_traj = Json::array();
  std::vector<double> sharpes;
  TrajectoryAudit worst;
  for (const auto& tr : trajs) {
    const auto report = evaluate_performance(tr, bench, config.reward, r_f, options);
    sharpes.push_back(report.sharpe);
    per_traj.push_back(io::to_json(report));
    const auto a = audit_trajectory(tr, r_f);
    worst.max_bond_error = std::max(worst.max_bond_error, a.max_bond_error);
    worst.max_budget_error = std::max(worst.max_budget_error, a.max_budget_error);
  }
  Json expected_contrib = Json::array();
  for (int t = 0; t < solution.horizon(); ++t) {
    expected_contrib.push_back(expected_contribution(solution, t, trajs.front().states[t]));
  }

  write_config_echo(config);
  io::write_trajectories_csv(config.output_dir / "trajectories.csv", trajs);
  io::write_contributions_csv(config.output_dir / "contributions.csv", trajs);
  io::write_plot_csv(config.output_dir / "plot_data.csv",
                     io::make_plot_series(trajs.front(), bench, config.reward,
                                          options.adjust_contributions));
  io::write_json(config.output_dir / "rollout_report.json",
                 {{"schema_version", io::kSchemaVersion},
                  {"kind", "rollout"},
                  {"seed", config.seed},
                  {"sharpe", stats_json(sharpes)},
                  {"audit", {{"max_bond_error", worst.max_bond_error},
                             {"max_budget_error", worst.max_budget_error}}},
                  {"expected_contribution_traj0", expected_contrib},
                  {"trajectories", per_traj}});
  std::ostringstream msg;
  msg << "mean Sharpe " << stats_json(sharpes)["mean"].get<double>() << " over " << trajs.size()
      << " trajectories";
  log(msg.str());
}

void cmd_girl(const RunConfig& config, const fs::path& input_dir) {
  config.validate();
  const fs::path in = input_or_output(config, input_dir);
  const auto trajs = io::read_trajectories_csv(artifact(in, "trajectories.csv", "rollout"),
                                               in / "contributions.csv");
  if (trajs.empty()) throw UsageError("trajectories.csv holds no trajectories");
  const auto scenario = make_scenario(config, config.seed);
  const auto problem = make_problem(config, scenario);
  log("fitting reward parameters to " + std::to_string(trajs.size()) + " trajectories");
  const auto fit = girl_fit(trajs, config.girl, problem);
  {
    std::ostringstream msg;
    msg << "fit finished after " << fit.iterations << " iterations in " << fit.wall_time_seconds
        << " s (converged: " << (fit.converged ? "yes" : "no") << ")";
    log(msg.str());
  }

  // Sharpe of the generating and recovered policies on the same scenario and
  // the same trajectory seeds.
  const int n_eval = config.num_trajectories;
  const double sharpe_generating =
      mean_sharpe(config, scenario, solve_policy(config, scenario, config.reward), n_eval);
  const double sharpe_recovered =
      mean_sharpe(config, scenario, solve_policy(config, scenario, fit.theta_star), n_eval);

  auto doc = io::to_json(fit);
  doc["comparison"] = {{"generating", io::to_json(config.reward)},
                       {"start", io::to_json(config.girl.theta0)},
                       {"recovered", io::to_json(fit.theta_star)},
                       {"sharpe_generating", sharpe_generating},
                       {"sharpe_recovered", sharpe_recovered},
                       {"sharpe_trajectories", n_eval}};
  doc["num_trajectories"] = trajs.size();
  doc["replication_mode"] = config.replication_mode;

  write_config_echo(config);
  io::write_json(config.output_dir / "fit_report.json", doc);

  std::ostringstream curve;
  curve << "iteration,loss,grad_norm,lambda,eta,rho,omega\n";
  for (std::size_t i = 0; i < fit.loss_history.size(); ++i) {
    curve << i << ',' << io::format_double(fit.loss_history[i]) << ',';
    if (i < fit.grad_norm_history.size()) curve << io::format_double(fit.grad_norm_history[i]);
    if (i < fit.theta_history.size()) {
      const auto& th = fit.theta_history[i];
      curve << ',' << io::format_double(th.lambda) << ',' << io::format_double(th.eta) << ','
            << io::format_double(th.rho) << ',' << io::format_double(th.omega);
    } else {
      curve << ",,,,";
    }
    curve << '\n';
  }
  io::write_text(config.output_dir / "girl_learning_curve.csv", curve.str());

  std::ostringstream table;
  table << "parameter   generating   recovered\n";
  const auto& g = config.reward;
  const auto& r = fit.theta_star;
  table << "lambda      " << g.lambda << "   " << r.lambda << '\n'
        << "eta         " << g.eta << "   " << r.eta << '\n'
        << "rho         " << g.rho << "   " << r.rho << '\n'
        << "omega       " << g.omega << "   " << r.omega << '\n'
        << "sharpe      " << sharpe_generating << "   " << sharpe_recovered;
  log("\n" + table.str());
}

void cmd_report(const RunConfig& config) {
  config.validate();
  log("evaluating over " + std::to_string(config.num_eval_seeds) + " seeds");
  const auto eval = evaluate_over_seeds(config, config.reward);
  const auto bench = config.benchmark();
  const bool adjust = sharpe_options(config).adjust_contributions;

  Json per_seed = Json::array();
  std::ostringstream by_seed;
  by_seed << "seed_index,seed,sharpe,mean_excess_return,return_volatility,total_contributions,"
             "final_value,benchmark_final,goal_gap\n";
  std::ostringstream plot_all;
  plot_all << "seed_index,t,portfolio_value,benchmark,contribution,portfolio_return\n";
  for (std::size_t i = 0; i < eval.reports.size(); ++i) {
    const auto& r = eval.reports[i];
    auto j = io::to_json(r);
    j["seed_index"] = i;
    j["seed"] = eval.seeds[i];
    per_seed.push_back(j);
    by_seed << i << ',' << eval.seeds[i] << ',' << io::format_double(r.sharpe) << ','
            << io::format_double(r.mean_excess_return) << ','
            << io::format_double(r.return_volatility) << ','
            << io::format_double(r.total_contributions) << ',' << io::format_double(r.final_value)
            << ',' << io::format_double(r.benchmark_final) << ',' << io::format_double(r.goal_gap)
            << '\n';
    const auto series = io::make_plot_series(eval.trajectories[i], bench, config.reward, adjust);
    for (std::size_t t = 0; t < series.portfolio_value.size(); ++t) {
      plot_all << i << ',' << t << ',' << io::format_double(series.portfolio_value[t]) << ','
               << io::format_double(series.benchmark[t]) << ',';
      if (t < series.contribution.size()) {
        plot_all << io::format_double(series.contribution[t]) << ','
                 << io::format_double(series.portfolio_return[t]);
      } else {
        plot_all << ',';
      }
      plot_all << '\n';
    }
  }

  std::vector<double> sharpes;
  for (const auto& r : eval.reports) sharpes.push_back(r.sharpe);
  write_config_echo(config);
  io::write_json(config.output_dir / "performance.json",
                 {{"schema_version", io::kSchemaVersion},
                  {"kind", "performance"},
                  {"base_seed", config.seed},
                  {"theta", io::to_json(config.reward)},
                  {"benchmark", io::to_json(bench)},
                  {"sharpe", {{"mean", eval.sharpe_mean},
                              {"std", eval.sharpe_std},
                              {"count", eval.reports.size()}}},
                  {"audit", {{"max_bond_error", eval.audit.max_bond_error},
                             {"max_budget_error", eval.audit.max_budget_error}}},
                  {"seeds", per_seed}});
  io::write_text(config.output_dir / "sharpe_by_seed.csv", by_seed.str());
  io::write_text(config.output_dir / "plot_data_by_seed.csv", plot_all.str());
  io::write_plot_csv(config.output_dir / "plot_data.csv",
                     io::make_plot_series(eval.trajectories.front(), bench, config.reward, adjust));
  std::ostringstream msg;
  msg << "Sharpe " << eval.sharpe_mean << " +/- " << eval.sharpe_std << " over "
      << eval.reports.size() << " seeds";
  log(msg.str());
}

}  // namespace glearn
