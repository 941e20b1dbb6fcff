#include "glearn/market_sim.hpp"

#include <cmath>

#include "glearn/errors.hpp"
#include "glearn/rng.hpp"

namespace glearn {

void MarketConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("market: " + msg); };
  if (!std::isfinite(mu_m) || !std::isfinite(r_f) || !std::isfinite(s0)) fail("non-finite rate");
  if (!(sigma_m >= 0.0) || !std::isfinite(sigma_m)) fail("sigma_m must be >= 0");
  if (!(s0 > 0.0)) fail("s0 must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
  if (num_steps < 1) fail("num_steps must be >= 1");
  if (num_risky < 1) fail("num_risky must be >= 1");
  if (!(oracle_c >= 0.0 && oracle_c <= 1.0)) fail("oracle_c must lie in [0, 1]");
  if (!(sigma_idio >= 0.0) || !std::isfinite(sigma_idio)) fail("sigma_idio must be >= 0");
}

MarketPath simulate_market(const MarketConfig& config, std::uint64_t seed) {
  config.validate();
  const int steps = config.num_steps;
  const double drift = config.mu_m * config.dt;
  const double vol = config.sigma_m * std::sqrt(config.dt);
  const double log_drift = (config.mu_m - 0.5 * config.sigma_m * config.sigma_m) * config.dt;

  Rng rng(seed);
  MarketPath path;
  path.values.resize(steps + 1);
  path.returns.resize(steps);
  path.shocks.resize(steps);
  path.values[0] = config.s0;
  for (int t = 0; t < steps; ++t) {
    const double z = rng.normal();
    path.shocks[t] = z;
    path.values[t + 1] = path.values[t] * std::exp(log_drift + vol * z);
    path.returns[t] = drift + vol * z;
  }
  return path;
}

MatrixXd build_covariance(const VectorXd& beta0, double sigma_idio, const MarketConfig& config) {
  require_finite(beta0, "build_covariance beta0");
  if (!std::isfinite(sigma_idio) || !std::isfinite(config.sigma_m) || !std::isfinite(config.dt)) {
    throw NumericError("build_covariance: non-finite volatility input");
  }
  const double market_var = config.sigma_m * config.sigma_m * config.dt;
  MatrixXd cov = market_var * beta0 * beta0.transpose();
  const double idio_var = sigma_idio * sigma_idio * config.dt;
  cov.diagonal().array() += idio_var * (1.0 - beta0.array().square());
  return symmetrize(cov);
}

AssetUniverse draw_universe(const MarketConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  AssetUniverse u;
  u.alpha.resize(config.num_risky);
  u.beta0.resize(config.num_risky);
  for (int i = 0; i < config.num_risky; ++i) u.alpha[i] = rng.uniform(-0.05, 0.15);
  for (int i = 0; i < config.num_risky; ++i) u.beta0[i] = rng.uniform(0.05, 0.85);
  u.sigma_idio = config.sigma_idio;
  u.sigma_r = build_covariance(u.beta0, u.sigma_idio, config);
  return u;
}

namespace {

void check_inputs(const AssetUniverse& universe, const MarketPath& path,
                  const MarketConfig& config) {
  require_size(universe.alpha, config.num_risky, "universe alpha");
  require_size(universe.beta0, config.num_risky, "universe beta0");
  require_size(path.returns, config.num_steps, "market returns");
}

}  // namespace

MatrixXd expected_returns(const AssetUniverse& universe, const MarketPath& path,
                          const MarketConfig& config) {
  check_inputs(universe, path, config);
  const int steps = config.num_steps;
  const double c = config.oracle_c;
  const double drift = config.mu_m * config.dt;
  MatrixXd rbar(steps, config.num_assets());
  for (int t = 0; t < steps; ++t) {
    rbar(t, 0) = config.bond_step_return();
    const double factor = (1.0 - c) * drift + c * path.returns[t];
    rbar.row(t).tail(config.num_risky) =
        (universe.alpha + universe.beta0 * factor).transpose();
  }
  return rbar;
}

MatrixXd realized_returns(const AssetUniverse& universe, const MarketPath& path,
                          const MatrixXd& expected, const MarketConfig& config,
                          std::uint64_t seed) {
  check_inputs(universe, path, config);
  require_shape(expected, config.num_steps, config.num_assets(), "expected returns");
  const double drift = config.mu_m * config.dt;
  const double sqrt_dt = std::sqrt(config.dt);
  const VectorXd idio_scale =
      universe.sigma_idio * (1.0 - universe.beta0.array().square()).sqrt() * sqrt_dt;

  Rng rng(seed);
  MatrixXd r = expected;
  for (int t = 0; t < config.num_steps; ++t) {
    const double market_surprise = path.returns[t] - drift;
    for (int i = 0; i < config.num_risky; ++i) {
      r(t, i + 1) += universe.beta0[i] * market_surprise + idio_scale[i] * rng.normal();
    }
  }
  return r;
}

ReturnsPanel make_panel(const AssetUniverse& universe, const MarketPath& path,
                        const MarketConfig& config, std::uint64_t realized_seed) {
  ReturnsPanel panel;
  panel.expected = expected_returns(universe, path, config);
  panel.realized = realized_returns(universe, path, panel.expected, config, realized_seed);
  return panel;
}

}  // namespace glearn
