#pragma once

#include <optional>
#include <vector>

#include "glearn/linalg.hpp"

namespace glearn {

/// Free parameters of the goal-based reward. Transaction costs use
/// Omega = omega * I.
struct RewardParams {
  double lambda = 0.002;  // shortfall penalty weight
  double eta = 1.3;       // desired growth factor
  double rho = 0.5;       // weight of current wealth in the target
  double omega = 1.1;     // transaction-cost scale

  void validate() const;
};

/// Exponentially growing benchmark B_t = b0 (1 + g)^t. When `growth` is
/// unset, g follows the reward's growth factor: g = eta - 1.
struct BenchmarkSpec {
  double b0 = 1000.0;
  std::optional<double> growth;

  void validate() const;
  double growth_rate(const RewardParams& params) const;
  double value(int t, const RewardParams& params) const;
};

/// Coefficients of R(x, u) = x'Rxx x + u'Rux x + u'Ruu u + x'Rx + u'Ru + R0.
struct QuadReward {
  MatrixXd r_xx;
  MatrixXd r_ux;
  MatrixXd r_uu;
  VectorXd r_x;
  VectorXd r_u;
  double r_0 = 0.0;
};

/// P_{t+1} = (1 - rho) B_t + rho * eta * 1'x.
double target_value(const VectorXd& x, double b_t, const RewardParams& params);

/// Second moment of gross returns: blockdiag(0, Sigma_r) + (1 + rbar)(1 + rbar)'.
MatrixXd sigma_hat(const VectorXd& rbar_t, const MatrixXd& sigma_r);

/// N x N covariance of the additive return noise; zero bond row and column.
MatrixXd noise_covariance(const MatrixXd& sigma_r);

QuadReward reward_coeffs(const RewardParams& params, const VectorXd& rbar_t,
                         const MatrixXd& sigma_r, double b_t);

/// -1'u - lambda E[(P - (1 + r)'(x + u))^2] - omega u'u, with the expectation
/// taken in closed form under mean rbar_t and covariance Sigma_r.
double reward_direct(const VectorXd& x, const VectorXd& u, const RewardParams& params,
                     const VectorXd& rbar_t, const MatrixXd& sigma_r, double b_t);

double reward_quad(const VectorXd& x, const VectorXd& u, const QuadReward& coeffs);

/// Reward coefficients for every step of a horizon; rbar is T x N.
std::vector<QuadReward> build_rewards(const RewardParams& params, const BenchmarkSpec& bench,
                                      const MatrixXd& rbar, const MatrixXd& sigma_r);

}  // namespace glearn
