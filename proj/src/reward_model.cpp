#include "glearn/reward_model.hpp"

#include <cmath>

#include "glearn/errors.hpp"

namespace glearn {

void RewardParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("reward: lambda must be > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("reward: eta must be > 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("reward: rho must lie in [0, 1]");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("reward: omega must be > 0");
}

void BenchmarkSpec::validate() const {
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw ConfigError("benchmark: b0 must be > 0");
  if (growth && !(*growth > -1.0 && std::isfinite(*growth))) {
    throw ConfigError("benchmark: growth must be > -1");
  }
}

double BenchmarkSpec::growth_rate(const RewardParams& params) const {
  return growth ? *growth : params.eta - 1.0;
}

double BenchmarkSpec::value(int t, const RewardParams& params) const {
  return b0 * std::pow(1.0 + growth_rate(params), t);
}

double target_value(const VectorXd& x, double b_t, const RewardParams& params) {
  return (1.0 - params.rho) * b_t + params.rho * params.eta * x.sum();
}

MatrixXd noise_covariance(const MatrixXd& sigma_r) {
  const auto n = sigma_r.rows() + 1;
  MatrixXd s = MatrixXd::Zero(n, n);
  s.bottomRightCorner(n - 1, n - 1) = sigma_r;
  return s;
}

MatrixXd sigma_hat(const VectorXd& rbar_t, const MatrixXd& sigma_r) {
  const auto n = rbar_t.size();
  require_shape(sigma_r, n - 1, n - 1, "sigma_hat: Sigma_r");
  const VectorXd gross = VectorXd::Ones(n) + rbar_t;
  return symmetrize(noise_covariance(sigma_r) + gross * gross.transpose());
}

QuadReward reward_coeffs(const RewardParams& params, const VectorXd& rbar_t,
                         const MatrixXd& sigma_r, double b_t) {
  const auto n = rbar_t.size();
  const double lam = params.lambda;
  const double eta = params.eta;
  const double rho = params.rho;
  const MatrixXd s_hat = sigma_hat(rbar_t, sigma_r);
  const VectorXd gross = VectorXd::Ones(n) + rbar_t;
  const VectorXd ones = VectorXd::Ones(n);
  const MatrixXd gross_ones = gross * ones.transpose();

  QuadReward q;
  q.r_xx = symmetrize(-lam * eta * eta * rho * rho * ones * ones.transpose() +
                      2.0 * lam * eta * rho * gross_ones - lam * s_hat);
  q.r_ux = 2.0 * lam * eta * rho * gross_ones - 2.0 * lam * s_hat;
  q.r_uu = symmetrize(-lam * s_hat - params.omega * MatrixXd::Identity(n, n));
  q.r_x = -2.0 * lam * eta * rho * (1.0 - rho) * b_t * ones + 2.0 * lam * (1.0 - rho) * b_t * gross;
  q.r_u = -ones + 2.0 * lam * (1.0 - rho) * b_t * gross;
  q.r_0 = -(1.0 - rho) * (1.0 - rho) * lam * b_t * b_t;
  return q;
}

double reward_direct(const VectorXd& x, const VectorXd& u, const RewardParams& params,
                     const VectorXd& rbar_t, const MatrixXd& sigma_r, double b_t) {
  const auto n = rbar_t.size();
  require_size(x, n, "reward_direct x");
  require_size(u, n, "reward_direct u");
  require_shape(sigma_r, n - 1, n - 1, "reward_direct Sigma_r");
  const VectorXd z = x + u;
  const double target = target_value(x, b_t, params);
  const double gap = target - (VectorXd::Ones(n) + rbar_t).dot(z);
  const auto z_risky = z.tail(n - 1);
  const double shortfall_sq = gap * gap + z_risky.dot(sigma_r * z_risky);
  return -u.sum() - params.lambda * shortfall_sq - params.omega * u.squaredNorm();
}

double reward_quad(const VectorXd& x, const VectorXd& u, const QuadReward& c) {
  return x.dot(c.r_xx * x) + u.dot(c.r_ux * x) + u.dot(c.r_uu * u) + x.dot(c.r_x) +
         u.dot(c.r_u) + c.r_0;
}

std::vector<QuadReward> build_rewards(const RewardParams& params, const BenchmarkSpec& bench,
                                      const MatrixXd& rbar, const MatrixXd& sigma_r) {
  params.validate();
  bench.validate();
  std::vector<QuadReward> out;
  out.reserve(rbar.rows());
  for (Eigen::Index t = 0; t < rbar.rows(); ++t) {
    out.push_back(reward_coeffs(params, rbar.row(t).transpose(), sigma_r,
                                bench.value(static_cast<int>(t), params)));
  }
  return out;
}

}  // namespace glearn
