#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glearn/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = GLEARN_CLI_PATH;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("glearn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// Runs the CLI, returns its exit status, and captures stdout and stderr.
int run(const std::string& args, std::string* output = nullptr) {
  const fs::path log = fs::temp_directory_path() / "glearn_cli_last.log";
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = glearn::io::read_text(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return glearn::io::read_text(p); }

std::size_t lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string s;
  while (std::getline(in, s)) ++n;
  return n;
}

const char* kSmall =
    "--set market.num_risky=4 --set market.num_steps=10 --set run.num_eval_seeds=5 "
    "--set girl.max_iter=5 --trajectories 30";

}  // namespace

TEST(Cli, HelpListsSubcommandsAndFlags) {
  std::string out;
  EXPECT_EQ(run("--help", &out), 0);
  for (const char* word : {"simulate", "solve", "rollout", "girl", "report", "--config", "--seed",
                           "--out", "--trajectories", "--replication-mode", "--input"}) {
    EXPECT_NE(out.find(word), std::string::npos) << word;
  }
}

TEST(Cli, SimulateIsDeterministicAndSized) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  ASSERT_EQ(run("simulate --seed 0 --out " + a.string()), 0);
  ASSERT_EQ(run("simulate --seed 0 --out " + b.string()), 0);
  for (const char* f : {"market.csv", "returns.csv", "universe.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(lines(a / "returns.csv"), 1u + 25u * 100u);
  const auto echo = slurp(a / "config.resolved.txt");
  for (const char* kv : {"market.mu_m = 0.05", "market.sigma_m = 0.25", "market.s0 = 100",
                         "market.r_f = 0.02", "market.num_steps = 25", "market.dt = 0.25",
                         "market.num_risky = 99", "market.oracle_c = 0.2"}) {
    EXPECT_NE(echo.find(kv), std::string::npos) << kv;
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("simulate --set market.bogus=1 --out " + dir.string()), 2);
  EXPECT_EQ(run("simulate --set market.dt=-1 --out " + dir.string()), 2);
  EXPECT_EQ(run("nonsense"), 2);
  std::string out;
  EXPECT_EQ(run("rollout --out " + dir.string(), &out), 4);
  EXPECT_NE(out.find("policy.json"), std::string::npos);
  glearn::io::write_text(dir / "bad.conf", "reward.lambda = 0.002\nthis line is wrong\n");
  EXPECT_EQ(run("simulate --config " + (dir / "bad.conf").string() + " --out " + dir.string()), 2);
}

TEST(Cli, ConfigFileIsHonoured) {
  const auto dir = scratch("conf");
  glearn::io::write_text(dir / "run.conf", "market.num_risky = 2\nmarket.num_steps = 4\n");
  ASSERT_EQ(run("simulate --config " + (dir / "run.conf").string() + " --out " + dir.string()), 0);
  EXPECT_EQ(lines(dir / "returns.csv"), 1u + 4u * 3u);
}

TEST(Cli, FullPipelineSmallIncludingGirl) {
  const auto dir = scratch("full");
  const std::string common = std::string(kSmall) + " --seed 3 --out " + dir.string();
  ASSERT_EQ(run("simulate " + common), 0);
  ASSERT_EQ(run("solve " + common), 0);
  ASSERT_EQ(run("rollout " + common), 0);
  ASSERT_EQ(run("girl " + common), 0);
  ASSERT_EQ(run("report " + common), 0);
  for (const char* f :
       {"market.csv", "universe.json", "returns.csv", "policy.json", "trajectories.csv",
        "contributions.csv", "rollout_report.json", "plot_data.csv", "fit_report.json",
        "girl_learning_curve.csv", "performance.json", "sharpe_by_seed.csv",
        "plot_data_by_seed.csv", "config.resolved.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto fit = glearn::io::read_json(dir / "fit_report.json");
  EXPECT_TRUE(fit.contains("theta_star"));
  EXPECT_TRUE(fit["comparison"].contains("generating"));
  EXPECT_TRUE(fit["comparison"].contains("recovered"));
  EXPECT_TRUE(fit["comparison"].contains("sharpe_recovered"));
  const auto perf = glearn::io::read_json(dir / "performance.json");
  EXPECT_EQ(perf["sharpe"]["count"], 5);
  EXPECT_EQ(lines(dir / "sharpe_by_seed.csv"), 6u);
  EXPECT_EQ(lines(dir / "plot_data.csv"), 1u + 11u);
}

TEST(Cli, GirlReadsFromInputDirectory) {
  const auto src = scratch("girl_src"), dst = scratch("girl_dst");
  const std::string small = std::string(kSmall) + " --seed 5";
  ASSERT_EQ(run("solve " + small + " --out " + src.string()), 0);
  ASSERT_EQ(run("rollout " + small + " --out " + src.string()), 0);
  ASSERT_EQ(run("girl " + small + " --replication-mode --input " + src.string() + " --out " +
                dst.string()), 0);
  const auto fit = glearn::io::read_json(dst / "fit_report.json");
  EXPECT_EQ(fit["replication_mode"], true);
  EXPECT_NE(slurp(dst / "config.resolved.txt").find("run.replication_mode = true"),
            std::string::npos);
}

TEST(Cli, PipelineIsByteIdenticalAcrossRuns) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    const std::string common = std::string(kSmall) + " --seed 9 --out " + dir.string();
    ASSERT_EQ(run("simulate " + common), 0);
    ASSERT_EQ(run("solve " + common), 0);
    ASSERT_EQ(run("rollout " + common), 0);
    ASSERT_EQ(run("girl " + common), 0);
    ASSERT_EQ(run("report " + common), 0);
  }
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    if (name == "config.resolved.txt") continue;  // echoes the differing output_dir
    if (name == "fit_report.json") {
      auto ja = glearn::io::read_json(a / name), jb = glearn::io::read_json(b / name);
      ja.erase("wall_time_seconds");
      jb.erase("wall_time_seconds");
      EXPECT_EQ(ja, jb);
      continue;
    }
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Cli, DefaultPipelineWithinBudget) {
  const auto dir = scratch("budget");
  const auto start = std::chrono::steady_clock::now();
  const std::string common = "--seed 0 --out " + dir.string();
  ASSERT_EQ(run("simulate " + common), 0);
  ASSERT_EQ(run("solve " + common), 0);
  ASSERT_EQ(run("rollout " + common), 0);
  ASSERT_EQ(run("report " + common), 0);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 120.0);
}
