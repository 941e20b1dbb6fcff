#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the code they check beyond plain data types.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "glearn/girl.hpp"
#include "glearn/glearner.hpp"
#include "glearn/market_sim.hpp"
#include "glearn/reward_model.hpp"
#include "glearn/rng.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// A small random problem: N assets (bond first), horizon T.
struct Instance {
  int n = 2;
  int horizon = 3;
  MatrixXd rbar;     // T x N
  MatrixXd sigma_r;  // (N-1) x (N-1)
  glearn::RewardParams theta;
  glearn::BenchmarkSpec bench;
  glearn::PriorPolicy prior;
  glearn::SolverConfig solver;
  std::vector<glearn::QuadReward> rewards;
  double wealth = 1000.0;

  glearn::Dynamics dynamics() const { return {rbar, sigma_r}; }
  glearn::PolicySolution solve() const {
    return glearn::backward_solve(rewards, prior, solver, dynamics());
  }
};

inline MatrixXd random_spd(int k, double scale, glearn::Rng& rng) {
  MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
  return scale * (a * a.transpose() / k + 0.5 * MatrixXd::Identity(k, k));
}

inline Instance make_instance(int n, int horizon, std::uint64_t seed, double beta = 1.0) {
  glearn::Rng rng(seed);
  Instance in;
  in.n = n;
  in.horizon = horizon;
  in.rbar.resize(horizon, n);
  for (int t = 0; t < horizon; ++t) {
    in.rbar(t, 0) = 0.005;
    for (int i = 1; i < n; ++i) in.rbar(t, i) = rng.uniform(-0.01, 0.04);
  }
  in.sigma_r = random_spd(n - 1, 0.004, rng);
  in.theta = {rng.uniform(0.001, 0.004), rng.uniform(1.05, 1.5), rng.uniform(0.2, 0.8),
              rng.uniform(0.5, 1.5)};
  in.bench.b0 = in.wealth;
  in.prior = glearn::PriorPolicy::make_default(n, horizon, rng.uniform(-5.0, 5.0),
                                               0.1 * in.wealth / n);
  for (int t = 0; t < horizon; ++t) {
    in.prior.u_bar[t] += VectorXd::NullaryExpr(n, [&] { return rng.uniform(-1.0, 1.0); });
  }
  in.solver.beta = beta;
  in.rewards = glearn::build_rewards(in.theta, in.bench, in.rbar, in.sigma_r);
  return in;
}

inline VectorXd random_state(const Instance& in, glearn::Rng& rng) {
  return VectorXd::NullaryExpr(in.n, [&] { return rng.uniform(0.3, 1.5) * in.wealth / in.n; });
}

inline VectorXd random_action(const Instance& in, glearn::Rng& rng) {
  return VectorXd::NullaryExpr(in.n, [&] { return rng.uniform(-0.2, 0.2) * in.wealth / in.n; });
}

/// Reward written straight from its definition:
///   -1'u - lambda E[(P - (1 + r)'z)^2] - omega |u|^2,  z = x + u,
/// with E[(P - (1+r)'z)^2] = (P - (1+rbar)'z)^2 + z_r' Sigma_r z_r.
inline double reward(const VectorXd& x, const VectorXd& u, const glearn::RewardParams& p,
                     const VectorXd& rbar, const MatrixXd& sigma_r, double b_t) {
  const VectorXd z = x + u;
  const double target = (1.0 - p.rho) * b_t + p.rho * p.eta * x.sum();
  const double mean_gap = target - (VectorXd::Ones(z.size()) + rbar).dot(z);
  const VectorXd zr = z.tail(z.size() - 1);
  const double shortfall = mean_gap * mean_gap + zr.dot(sigma_r * zr);
  return -u.sum() - p.lambda * shortfall - p.omega * u.squaredNorm();
}

/// log E_{u ~ N(m, S)}[exp(beta * (u'Au + b'u + c))] by completing the square.
/// Requires S^{-1} - 2 beta A positive definite.
inline double log_gaussian_exp_quadratic(const MatrixXd& a, const VectorXd& b, double c,
                                         const VectorXd& m, const MatrixXd& s, double beta) {
  const MatrixXd s_inv = s.inverse();
  const MatrixXd p = s_inv - beta * (a + a.transpose());
  const VectorXd h = s_inv * m + beta * b;
  const Eigen::LDLT<MatrixXd> p_ldlt(p);
  const double log_det_s = std::log(s.determinant());
  const double log_det_p = std::log(p.determinant());
  return beta * c - 0.5 * m.dot(s_inv * m) + 0.5 * h.dot(p_ldlt.solve(h)) - 0.5 * log_det_s -
         0.5 * log_det_p;
}

/// log E_{u ~ pi_0(.|x)}[exp(beta G(x, u))] at one state, with G given by its
/// coefficient blocks.
inline double log_partition(const glearn::GCoeffs& g, const glearn::PriorPolicy& prior, int t,
                            const VectorXd& x, double beta) {
  const VectorXd b = g.q_ux * x + g.q_u;
  const double c = x.dot(g.q_xx * x) + x.dot(g.q_x) + g.q_0;
  const VectorXd m = prior.u_bar[t] + prior.v_bar[t] * x;
  return log_gaussian_exp_quadratic(g.q_uu, b, c, m, prior.sigma_p, beta);
}

/// Multivariate normal log-density via an explicit inverse and determinant.
inline double log_normal(const VectorXd& v, const VectorXd& mean, const MatrixXd& cov) {
  const VectorXd r = v - mean;
  return -0.5 * (static_cast<double>(v.size()) * kLog2Pi + std::log(cov.determinant()) +
                 r.dot(cov.inverse() * r));
}

/// Mean and standard error of a sample.
struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
  Moments m;
  const auto n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  for (double x : v) m.variance += (x - m.mean) * (x - m.mean);
  m.variance /= (n - 1.0);
  m.std_error = std::sqrt(m.variance / n);
  return m;
}

/// Monte Carlo of gamma E[F(x')] for x' = (1 + rbar + eps) o z, eps_0 = 0 and
/// eps_r ~ N(0, Sigma_r).
inline Moments mc_continuation(const glearn::FCoeffs& f, const VectorXd& z, const VectorXd& rbar,
                               const MatrixXd& sigma_r, double gamma, int samples,
                               std::uint64_t seed) {
  glearn::Rng rng(seed);
  const int n = static_cast<int>(z.size());
  const MatrixXd l = sigma_r.llt().matrixL();
  std::vector<double> values(static_cast<std::size_t>(samples));
  VectorXd x_next(n);
  for (int s = 0; s < samples; ++s) {
    const VectorXd eps = l * rng.normal_vector(n - 1);
    x_next[0] = (1.0 + rbar[0]) * z[0];
    x_next.tail(n - 1) =
        (VectorXd::Ones(n - 1) + rbar.tail(n - 1) + eps).cwiseProduct(z.tail(n - 1));
    values[static_cast<std::size_t>(s)] = gamma * f.eval(x_next);
  }
  return moments(values);
}

/// Coarse-to-fine grid search for argmax_u h(u) over a 2-d box. Returns the
/// final maximizer and writes the final grid spacing to `resolution`.
inline VectorXd grid_argmax_2d(const std::function<double(const VectorXd&)>& h,
                               const VectorXd& center, double half_width, int points_per_side,
                               int levels, double& resolution) {
  VectorXd c = center;
  double w = half_width;
  VectorXd best = c;
  for (int level = 0; level < levels; ++level) {
    const double step = 2.0 * w / (points_per_side - 1);
    double best_val = -std::numeric_limits<double>::infinity();
    VectorXd u(2);
    for (int i = 0; i < points_per_side; ++i) {
      for (int j = 0; j < points_per_side; ++j) {
        u << c[0] - w + i * step, c[1] - w + j * step;
        const double v = h(u);
        if (v > best_val) {
          best_val = v;
          best = u;
        }
      }
    }
    resolution = step;
    c = best;
    w = 2.0 * step;
  }
  return best;
}

/// Central-difference gradient written out for a 4-vector, used as an
/// independent check of the library's harness.
inline Eigen::Vector4d fd_gradient(const std::function<double(const Eigen::Vector4d&)>& f,
                                   const Eigen::Vector4d& z, double h) {
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (f(zp) - f(zm)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
