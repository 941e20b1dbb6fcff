#include <gtest/gtest.h>

#include <cmath>

#include "glearn/analytics.hpp"
#include "glearn/errors.hpp"
#include "oracles.hpp"

using namespace glearn;

namespace {

// Values from a sequence of returns and contributions:
// v_{t+1} = v_t (1 + r_t) + c_t.
std::vector<double> grow(double v0, const std::vector<double>& r, const std::vector<double>& c) {
  std::vector<double> v{v0};
  for (std::size_t t = 0; t < r.size(); ++t) v.push_back(v.back() * (1.0 + r[t]) + c[t]);
  return v;
}

}  // namespace

TEST(PortfolioValues, SumsStates) {
  Trajectory tr;
  glearn::Rng rng(1);
  for (int t = 0; t < 4; ++t) tr.states.push_back(rng.normal_vector(5));
  const auto v = portfolio_values(tr);
  ASSERT_EQ(v.size(), 4u);
  for (int t = 0; t < 4; ++t) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += tr.states[t][i];
    EXPECT_NEAR(v[t], s, 1e-12);
  }
}

TEST(PortfolioValues, EqualSplitStartsAtThousand) {
  Trajectory tr;
  tr.states.push_back(VectorXd::Constant(100, 10.0));
  const auto v = portfolio_values(tr);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0], 1000.0, 1e-9);
}

TEST(Sharpe, HandComputedFourSteps) {
  // Excess returns 0.015, 0.035, -0.005, 0.015: mean 0.015, sample variance
  // 0.0008 / 3, Sharpe 0.015 / sqrt(0.0008 / 3) = 0.9185586535436918.
  const auto v = grow(100.0, {0.02, 0.04, 0.00, 0.02}, {0, 0, 0, 0});
  EXPECT_NEAR(sharpe_ratio(v, {0, 0, 0, 0}, 0.005), 0.9185586535436918, 1e-12);
}

TEST(Sharpe, ContributionsAreNotReturns) {
  const std::vector<double> c{50.0, -20.0, 300.0, 10.0};
  const auto v = grow(100.0, {0.02, 0.04, 0.00, 0.02}, c);
  EXPECT_NEAR(sharpe_ratio(v, c, 0.005), 0.9185586535436918, 1e-10);
}

TEST(Sharpe, CashOnlyGrowthIsUndefined) {
  const std::vector<double> c{50.0, 20.0, 300.0};
  const auto v = grow(100.0, {0.0, 0.0, 0.0}, c);
  EXPECT_THROW(sharpe_ratio(v, c, 0.0), UndefinedSharpeError);
}

TEST(Sharpe, ConstantReturnsAreUndefined) {
  const auto v = grow(100.0, {0.01, 0.01, 0.01}, {0, 0, 0});
  EXPECT_THROW(sharpe_ratio(v, {0, 0, 0}, 0.0), UndefinedSharpeError);
}

TEST(Sharpe, TooShortIsUsageError) {
  EXPECT_THROW(sharpe_ratio({100.0, 101.0}, {0.0}, 0.0), UsageError);
  EXPECT_THROW(sharpe_ratio({100.0, -1.0, 3.0}, {0.0, 0.0}, 0.0), UsageError);
}

TEST(Sharpe, ScaleInvariant) {
  glearn::Rng rng(2);
  std::vector<double> r(20), c(20);
  for (int t = 0; t < 20; ++t) {
    r[t] = rng.uniform(-0.05, 0.08);
    c[t] = rng.uniform(-10.0, 30.0);
  }
  const auto v = grow(1000.0, r, c);
  const double base = sharpe_ratio(v, c, 0.005);
  for (double k : {0.001, 3.0, 1e6}) {
    std::vector<double> vk, ck;
    for (double x : v) vk.push_back(k * x);
    for (double x : c) ck.push_back(k * x);
    EXPECT_NEAR(sharpe_ratio(vk, ck, 0.005), base, 1e-10);
  }
}

TEST(Sharpe, NaiveAndAnnualizedOptions) {
  const std::vector<double> c{5.0, 5.0, 5.0, 5.0};
  const auto v = grow(100.0, {0.02, 0.04, 0.00, 0.02}, c);
  SharpeOptions naive;
  naive.adjust_contributions = false;
  std::vector<double> e;
  for (std::size_t t = 0; t + 1 < v.size(); ++t) e.push_back(v[t + 1] / v[t] - 1.0 - 0.005);
  const auto m = oracle::moments(e);
  EXPECT_NEAR(sharpe_ratio(v, c, 0.005, naive), m.mean / std::sqrt(m.variance), 1e-12);

  SharpeOptions annual;
  annual.annualize = true;
  annual.dt = 0.25;
  EXPECT_NEAR(sharpe_ratio(v, c, 0.005, annual), 2.0 * sharpe_ratio(v, c, 0.005), 1e-12);
}

TEST(Sharpe, StatsAreConsistent) {
  const auto v = grow(100.0, {0.02, 0.04, 0.00, 0.02}, {0, 0, 0, 0});
  const auto s = return_stats(v, {0, 0, 0, 0}, 0.005);
  EXPECT_NEAR(s.sharpe, s.mean_excess / s.volatility, 1e-15);
  ASSERT_EQ(s.returns.size(), 4u);
  EXPECT_NEAR(s.returns[1], 0.04, 1e-12);
}

TEST(Benchmark, GapIsZeroWhenOnTarget) {
  BenchmarkSpec b;
  b.b0 = 1000.0;
  b.growth = 0.02;
  RewardParams p;
  const double bt = 1000.0 * std::pow(1.02, 3);
  const auto r = compare_to_benchmark({1000.0, 1.0, 2.0, bt}, b, p);
  EXPECT_NEAR(r.goal_gap, 0.0, 1e-9);
  EXPECT_NEAR(r.benchmark_final, bt, 1e-9);
}

TEST(Benchmark, ZeroGrowthIsConstant) {
  BenchmarkSpec b;
  b.b0 = 750.0;
  b.growth = 0.0;
  for (double x : benchmark_series(10, b, RewardParams{})) EXPECT_EQ(x, 750.0);
}

TEST(Benchmark, SeriesMatchesPower) {
  glearn::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    BenchmarkSpec b;
    b.b0 = rng.uniform(100.0, 5000.0);
    b.growth = rng.uniform(-0.1, 0.3);
    const auto s = benchmark_series(12, b, RewardParams{});
    for (int t = 0; t <= 12; ++t) EXPECT_NEAR(s[t], b.b0 * std::pow(1.0 + *b.growth, t), 1e-9 * s[t]);
  }
}

TEST(EvaluatePerformance, FillsEveryField) {
  Trajectory tr;
  const std::vector<double> r{0.02, 0.04, 0.00, 0.02}, c{10.0, 0.0, -5.0, 2.0};
  const auto v = grow(1000.0, r, c);
  for (std::size_t t = 0; t < v.size(); ++t) tr.states.push_back(VectorXd::Constant(2, v[t] / 2));
  for (double x : c) {
    tr.actions.push_back(VectorXd::Constant(2, x / 2));
    tr.contributions.push_back(x);
  }
  BenchmarkSpec b;
  b.growth = 0.01;
  const auto rep = evaluate_performance(tr, b, RewardParams{}, 0.005);
  EXPECT_NEAR(rep.sharpe, 0.9185586535436918, 1e-10);
  EXPECT_NEAR(rep.total_contributions, 7.0, 1e-12);
  EXPECT_NEAR(rep.final_value, v.back(), 1e-9);
  EXPECT_NEAR(rep.goal_gap, 1000.0 * std::pow(1.01, 4) - v.back(), 1e-9);
}
