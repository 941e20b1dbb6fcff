#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "glearn/errors.hpp"
#include "glearn/io.hpp"
#include "glearn/pipeline.hpp"

using namespace glearn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("glearn_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

struct Small {
  RunConfig config;
  Scenario scenario;
  PolicySolution solution;
  std::vector<Trajectory> trajs;
};

Small small() {
  Small s;
  s.config.market.num_risky = 3;
  s.config.market.num_steps = 6;
  s.scenario = make_scenario(s.config, 5);
  s.solution = solve_policy(s.config, s.scenario, s.config.reward);
  s.trajs = generate_trajectories(s.config, s.scenario, s.solution, 4);
  return s;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456.789, 0.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(MarketCsv, RoundTrip) {
  const auto s = small();
  const auto dir = scratch("market");
  io::write_market_csv(dir / "market.csv", s.scenario.path);
  const auto back = io::read_market_csv(dir / "market.csv");
  EXPECT_EQ(back.values, s.scenario.path.values);
  EXPECT_EQ(back.returns, s.scenario.path.returns);
  EXPECT_EQ(back.shocks, s.scenario.path.shocks);
  EXPECT_EQ(line_count(dir / "market.csv"), 1u + 7u);
}

TEST(ReturnsCsv, RoundTripAndRowCount) {
  const auto s = small();
  const auto dir = scratch("returns");
  const auto panel = trajectory_panel(s.config, s.scenario, 0);
  io::write_returns_csv(dir / "returns.csv", panel);
  const auto back = io::read_returns_csv(dir / "returns.csv");
  EXPECT_EQ(back.expected, panel.expected);
  EXPECT_EQ(back.realized, panel.realized);
  EXPECT_EQ(line_count(dir / "returns.csv"), 1u + 6u * 4u);
}

TEST(TrajectoryCsv, RoundTripWithAndWithoutContributions) {
  const auto s = small();
  const auto dir = scratch("traj");
  io::write_trajectories_csv(dir / "t.csv", s.trajs);
  io::write_contributions_csv(dir / "c.csv", s.trajs);
  for (const auto& back :
       {io::read_trajectories_csv(dir / "t.csv", dir / "c.csv"), io::read_trajectories_csv(dir / "t.csv")}) {
    ASSERT_EQ(back.size(), s.trajs.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
      ASSERT_EQ(back[k].states.size(), s.trajs[k].states.size());
      for (std::size_t t = 0; t < back[k].states.size(); ++t) {
        EXPECT_EQ(back[k].states[t], s.trajs[k].states[t]);
      }
      for (std::size_t t = 0; t < back[k].actions.size(); ++t) {
        EXPECT_EQ(back[k].actions[t], s.trajs[k].actions[t]);
        EXPECT_EQ(back[k].contributions[t], s.trajs[k].contributions[t]);
      }
    }
  }
}

TEST(TrajectoryCsv, RejectsBadInput) {
  const auto dir = scratch("bad");
  io::write_text(dir / "wrong_header.csv", "a,b,c\n");
  EXPECT_THROW(io::read_trajectories_csv(dir / "wrong_header.csv"), IoError);
  io::write_text(dir / "bad_kind.csv", "traj_id,t,kind,asset_index,value\n0,0,cash,0,1\n");
  EXPECT_THROW(io::read_trajectories_csv(dir / "bad_kind.csv"), IoError);
  io::write_text(dir / "bad_num.csv", "traj_id,t,kind,asset_index,value\n0,0,state,0,abc\n");
  EXPECT_THROW(io::read_trajectories_csv(dir / "bad_num.csv"), IoError);
  EXPECT_THROW(io::read_trajectories_csv(dir / "missing.csv"), IoError);
}

TEST(PolicyJson, RoundTrip) {
  const auto s = small();
  const auto dir = scratch("policy");
  io::write_json(dir / "policy.json", io::to_json(s.solution));
  const auto back = io::policy_from_json(io::read_json(dir / "policy.json"));
  ASSERT_EQ(back.horizon(), s.solution.horizon());
  EXPECT_EQ(back.beta, s.solution.beta);
  for (int t = 0; t < back.horizon(); ++t) {
    EXPECT_EQ(back.u_tilde[t], s.solution.u_tilde[t]);
    EXPECT_EQ(back.v_tilde[t], s.solution.v_tilde[t]);
    EXPECT_EQ(back.sigma_tilde[t], s.solution.sigma_tilde[t]);
    EXPECT_EQ(back.g[t].q_uu, s.solution.g[t].q_uu);
    EXPECT_EQ(back.g[t].q_0, s.solution.g[t].q_0);
    EXPECT_EQ(back.f[t].f_xx, s.solution.f[t].f_xx);
    EXPECT_EQ(back.f[t].f_0, s.solution.f[t].f_0);
  }
  // A replayed policy produces the same rollout.
  const auto panel = trajectory_panel(s.config, s.scenario, 0);
  const auto a = rollout(s.solution, panel, initial_portfolio(s.config), 3);
  const auto b = rollout(back, panel, initial_portfolio(s.config), 3);
  EXPECT_EQ(a.states.back(), b.states.back());
}

TEST(PolicyJson, SchemaVersionChecked) {
  const auto s = small();
  auto j = io::to_json(s.solution);
  EXPECT_EQ(j["schema_version"], 1);
  j["schema_version"] = 99;
  EXPECT_THROW(io::policy_from_json(j), IoError);
  j.erase("schema_version");
  EXPECT_THROW(io::policy_from_json(j), IoError);
}

TEST(ReportJson, RoundTrips) {
  PerformanceReport r{0.5, 0.01, 0.02, 30.0, 1100.0, 1200.0, 100.0};
  const auto r2 = io::performance_from_json(io::to_json(r));
  EXPECT_EQ(r2.sharpe, r.sharpe);
  EXPECT_EQ(r2.goal_gap, r.goal_gap);

  BenchmarkSpec b;
  b.b0 = 900.0;
  EXPECT_FALSE(io::benchmark_from_json(io::to_json(b)).growth.has_value());
  b.growth = 0.01;
  EXPECT_EQ(*io::benchmark_from_json(io::to_json(b)).growth, 0.01);

  FitReport f;
  f.theta_star = {0.0021, 1.29, 0.51, 1.09};
  f.loss_history = {10.0, 9.0};
  f.grad_norm_history = {3.0};
  f.theta_history = {RewardParams{}, f.theta_star};
  f.iterations = 1;
  f.converged = true;
  f.wall_time_seconds = 1.5;
  const auto f2 = io::fit_report_from_json(io::to_json(f));
  EXPECT_EQ(f2.theta_star.lambda, f.theta_star.lambda);
  EXPECT_EQ(f2.loss_history, f.loss_history);
  EXPECT_EQ(f2.theta_history.size(), 2u);
  EXPECT_TRUE(f2.converged);
}

TEST(UniverseJson, RoundTrip) {
  const auto s = small();
  const auto u = io::universe_from_json(io::to_json(s.scenario.universe));
  EXPECT_EQ(u.alpha, s.scenario.universe.alpha);
  EXPECT_EQ(u.beta0, s.scenario.universe.beta0);
  EXPECT_EQ(u.sigma_r, s.scenario.universe.sigma_r);
}

TEST(PlotCsv, RowsAndColumns) {
  const auto s = small();
  const auto dir = scratch("plot");
  const auto series =
      io::make_plot_series(s.trajs[0], s.config.benchmark(), s.config.reward, true);
  EXPECT_EQ(series.portfolio_value.size(), 7u);
  EXPECT_EQ(series.benchmark.size(), 7u);
  EXPECT_EQ(series.contribution.size(), 6u);
  io::write_plot_csv(dir / "plot.csv", series);
  EXPECT_EQ(line_count(dir / "plot.csv"), 1u + 7u);
  const auto text = io::read_text(dir / "plot.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,portfolio_value,benchmark,contribution,portfolio_return");
}

TEST(Files, UnwritablePathIsIoError) {
  EXPECT_THROW(io::write_text("/proc/glearn/nope.txt", "x"), IoError);
  EXPECT_THROW(io::read_json("/nonexistent/file.json"), IoError);
  const auto dir = scratch("json");
  io::write_text(dir / "broken.json", "{not json");
  EXPECT_THROW(io::read_json(dir / "broken.json"), IoError);
}
