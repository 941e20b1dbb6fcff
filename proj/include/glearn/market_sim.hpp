#pragma once

#include <cstdint>

#include "glearn/linalg.hpp"

namespace glearn {

// Synthetic one-factor market: a GBM market factor, a universe of risky
// assets with CAPM-style expected returns, and a deterministic bond in
// column 0 of every returns matrix. All rates handed to the solver are
// per-step.

struct MarketConfig {
  double mu_m = 0.05;     // annual market drift
  double sigma_m = 0.25;  // annual market volatility
  double s0 = 100.0;
  double r_f = 0.02;      // annual risk-free rate
  int num_steps = 25;
  double dt = 0.25;
  int num_risky = 99;
  double oracle_c = 0.2;
  double sigma_idio = 0.05;  // annual idiosyncratic volatility

  void validate() const;
  int num_assets() const { return num_risky + 1; }
  double bond_step_return() const { return r_f * dt; }
};

struct MarketPath {
  VectorXd values;   // T+1 market levels
  VectorXd returns;  // T per-step returns mu dt + sigma sqrt(dt) Z
  VectorXd shocks;   // T standard-normal draws behind `returns`
};

struct AssetUniverse {
  VectorXd alpha;
  VectorXd beta0;
  double sigma_idio = 0.0;
  MatrixXd sigma_r;  // per-step covariance of risky returns
};

struct ReturnsPanel {
  MatrixXd expected;  // T x N
  MatrixXd realized;  // T x N
};

MarketPath simulate_market(const MarketConfig& config, std::uint64_t seed);

AssetUniverse draw_universe(const MarketConfig& config, std::uint64_t seed);

/// One-factor covariance:
///   dt * (sigma_m^2 * beta beta^T + diag(sigma_i^2 (1 - beta_i^2))).
MatrixXd build_covariance(const VectorXd& beta0, double sigma_idio, const MarketConfig& config);

MatrixXd expected_returns(const AssetUniverse& universe, const MarketPath& path,
                          const MarketConfig& config);

MatrixXd realized_returns(const AssetUniverse& universe, const MarketPath& path,
                          const MatrixXd& expected, const MarketConfig& config,
                          std::uint64_t seed);

ReturnsPanel make_panel(const AssetUniverse& universe, const MarketPath& path,
                        const MarketConfig& config, std::uint64_t realized_seed);

}  // namespace glearn
