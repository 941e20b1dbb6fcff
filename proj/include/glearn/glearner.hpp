#pragma once

#include <cstdint>
#include <vector>

#include "glearn/linalg.hpp"
#include "glearn/market_sim.hpp"
#include "glearn/reward_model.hpp"

namespace glearn {

/// Gaussian reference policy pi_0(u | x) = N(u_bar_t + v_bar_t x, Sigma_p).
struct PriorPolicy {
  std::vector<VectorXd> u_bar;
  std::vector<MatrixXd> v_bar;
  MatrixXd sigma_p;

  /// u_bar_t = (c0 / N) 1, v_bar_t = 0, Sigma_p = sigma^2 I.
  static PriorPolicy make_default(int num_assets, int horizon, double nominal_contribution,
                                  double sigma);

  int horizon() const { return static_cast<int>(u_bar.size()); }
  void validate(int num_assets, int horizon) const;
};

/// Prior quantities at a single step, with Sigma_p pre-factored.
struct PriorStep {
  PriorStep(const VectorXd& u_bar, const MatrixXd& v_bar, const MatrixXd& sigma_p);
  PriorStep(const PriorPolicy& prior, int t) : PriorStep(prior.u_bar[t], prior.v_bar[t], prior.sigma_p) {}

  VectorXd mean(const VectorXd& x) const { return u_bar + v_bar * x; }
  double log_density(const VectorXd& x, const VectorXd& u) const;

  VectorXd u_bar;
  MatrixXd v_bar;
  MatrixXd sigma_p;
  MatrixXd precision;  // Sigma_p^{-1}
  double log_det_sigma = 0.0;
};

/// G_t(x, u) = x'Qxx x + u'Qux x + u'Quu u + x'Qx + u'Qu + Q0.
struct GCoeffs {
  MatrixXd q_xx, q_ux, q_uu;
  VectorXd q_x, q_u;
  double q_0 = 0.0;

  static GCoeffs zero(Eigen::Index n);
  double eval(const VectorXd& x, const VectorXd& u) const;
};

/// F_t(x) = x'Fxx x + x'Fx + F0.
struct FCoeffs {
  MatrixXd f_xx;
  VectorXd f_x;
  double f_0 = 0.0;

  static FCoeffs zero(Eigen::Index n);
  double eval(const VectorXd& x) const;
};

/// Optimal Gaussian policy at one step: N(u_tilde + v_tilde x, sigma_tilde).
struct PolicyStep {
  MatrixXd sigma_tilde;
  VectorXd u_tilde;
  MatrixXd v_tilde;
};

struct SolverConfig {
  double beta = 1.0;   // inverse temperature
  double gamma = 0.95; // discount
  int max_iter = 1;    // backward sweeps
  double eps = 1e-12;

  void validate() const;
};

/// Expected returns and risky covariance that drive the portfolio dynamics
/// x' = (1 + rbar_t + eps) o (x + u).
struct Dynamics {
  MatrixXd rbar;     // T x N, bond in column 0
  MatrixXd sigma_r;  // (N-1) x (N-1)

  int horizon() const { return static_cast<int>(rbar.rows()); }
  int num_assets() const { return static_cast<int>(rbar.cols()); }
  VectorXd rbar_at(int t) const { return rbar.row(t).transpose(); }
};

struct PolicySolution {
  std::vector<VectorXd> u_tilde;
  std::vector<MatrixXd> v_tilde;
  std::vector<MatrixXd> sigma_tilde;
  std::vector<MatrixXd> sigma_chol;  // lower Cholesky factor of sigma_tilde
  std::vector<GCoeffs> g;            // T entries
  std::vector<FCoeffs> f;            // T+1 entries, f[T] = 0
  double beta = 1.0;
  int sweeps = 0;
  double last_sweep_change = 0.0;

  int horizon() const { return static_cast<int>(u_tilde.size()); }
  int num_assets() const { return horizon() > 0 ? static_cast<int>(u_tilde[0].size()) : 0; }
  VectorXd mean(int t, const VectorXd& x) const { return u_tilde[t] + v_tilde[t] * x; }
  /// log pi(u | x) from the Gaussian form.
  double log_density(int t, const VectorXd& x, const VectorXd& u) const;
};

struct Trajectory {
  std::vector<VectorXd> states;   // T+1
  std::vector<VectorXd> actions;  // T
  std::vector<double> contributions;

  int horizon() const { return static_cast<int>(actions.size()); }
};

/// Additive contribution of gamma E[F_{t+1}(x_{t+1})] to the G coefficients.
/// With z = x + u and A = diag(1 + rbar_t):
///   E[F(x')] = z'(A Fxx A + Fxx o Sigma_eps) z + z'A Fx + F0.
GCoeffs continuation_coeffs(const FCoeffs& f_next, const VectorXd& rbar_t,
                            const MatrixXd& sigma_r, double gamma);

GCoeffs g_coeffs_at(const QuadReward& reward, const FCoeffs& f_next, const VectorXd& rbar_t,
                    const MatrixXd& sigma_r, double gamma);

PolicyStep policy_from_g(const GCoeffs& g, const PriorStep& prior, double beta);

/// F = (1/beta) log E_{u ~ pi_0}[exp(beta G)], in closed form.
FCoeffs f_coeffs_from_g(const GCoeffs& g, const PriorStep& prior, double beta);

PolicySolution backward_solve(const std::vector<QuadReward>& rewards, const PriorPolicy& prior,
                              const SolverConfig& config, const Dynamics& dynamics);

/// u = mean + L z, L the lower Cholesky factor of sigma_tilde, z ~ N(0, I).
VectorXd sample_action(const PolicySolution& solution, int t, const VectorXd& x,
                       std::uint64_t seed);

/// x' = (1 + r) o (x + u).
VectorXd step_dynamics(const VectorXd& x, const VectorXd& u, const VectorXd& realized_r);

/// Samples actions with seed derive_seed(seed, Stream::Action, t) at step t.
Trajectory rollout(const PolicySolution& solution, const ReturnsPanel& panel, const VectorXd& x0,
                   std::uint64_t seed);

/// 1'(u_tilde + v_tilde x), the mean contribution under the optimal policy.
double expected_contribution(const PolicySolution& solution, int t, const VectorXd& x);
/// 1'(u_bar + v_bar x), the same quantity under the prior.
double expected_contribution(const PriorPolicy& prior, int t, const VectorXd& x);

double kl_to_prior(const PolicySolution& solution, const PriorPolicy& prior, int t,
                   const VectorXd& x);

/// KL(N(m1, s1) || N(m0, s0)).
double gaussian_kl(const VectorXd& m1, const MatrixXd& s1, const VectorXd& m0,
                   const MatrixXd& s0);

}  // namespace glearn
