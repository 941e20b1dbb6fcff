#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "glearn/glearner.hpp"

namespace glearn {

// Inverse reinforcement learning over the reward parameters. The G-learner
// is re-solved for every candidate theta and observed trajectories are scored
// by log pi_theta(u | x) + log p(x' | x, u).

/// Scaling applied to the gradient step. `None` is plain gradient descent;
/// `Diagonal` divides by the per-coordinate curvature; `Hessian` uses the
/// full finite-difference Hessian with eigenvalues replaced by their absolute
/// values.
enum class Preconditioner { None, Diagonal, Hessian };

struct GirlConfig {
  double learning_rate = 1.0;
  double grad_eps = 1e-4;
  int max_iter = 200;
  double tol = 1e-6;
  RewardParams theta0;
  Preconditioner preconditioner = Preconditioner::Hessian;

  void validate() const;
};

struct FitReport {
  RewardParams theta_star;
  std::vector<double> loss_history;
  std::vector<double> grad_norm_history;
  std::vector<RewardParams> theta_history;
  int iterations = 0;
  bool converged = false;
  double wall_time_seconds = 0.0;
};

/// Everything the likelihood needs besides theta. beta, gamma and the prior
/// are treated as known.
struct GirlProblem {
  Dynamics dynamics;
  BenchmarkSpec benchmark;
  PriorPolicy prior;
  SolverConfig solver;
  double r_f_step = 0.0;
  double bond_tol = 1e-9;
  /// Adds log pi_0(u | x) so each step scores log pi exactly. Disabling it
  /// scores beta (G - F) alone.
  bool include_prior_term = true;
};

/// Gaussian log-density of the risky return residual
///   Delta = x'_r / (x_r + u_r) - (1 + rbar_r),  Delta ~ N(0, Sigma_r).
/// This is a density in Delta; in x' coordinates it picks up the Jacobian
/// prod_i 1 / |x_r,i + u_r,i|. The bond leg is a hard consistency check:
/// |x'_0 - (1 + r_f) (x_0 + u_0)| <= bond_tol * max(1, |x'_0|).
class TransitionDensity {
 public:
  explicit TransitionDensity(const MatrixXd& sigma_r);

  double operator()(const VectorXd& x_next, const VectorXd& x, const VectorXd& u,
                    const VectorXd& rbar_t, double r_f_step, double bond_tol) const;

  /// Column-wise version over a batch of transitions (one per column).
  VectorXd batch(const MatrixXd& x_next, const MatrixXd& x, const MatrixXd& u,
                 const VectorXd& rbar_t, double r_f_step, double bond_tol) const;

 private:
  Eigen::LLT<MatrixXd> llt_;
  double log_norm_ = 0.0;
};

double transition_logdensity(const VectorXd& x_next, const VectorXd& x, const VectorXd& u,
                             const VectorXd& rbar_t, const MatrixXd& sigma_r, double r_f_step,
                             double bond_tol);

/// G-learner policy for theta on the problem's market.
PolicySolution solve_for(const RewardParams& theta, const GirlProblem& problem);

double trajectory_loglik(const RewardParams& theta, const Trajectory& traj,
                         const GirlProblem& problem);

/// Log-likelihood of one trajectory under an already solved policy.
double trajectory_loglik(const PolicySolution& solution, const Trajectory& traj,
                         const GirlProblem& problem);

/// Negative summed log-likelihood; one solve shared by all trajectories.
double loss(const RewardParams& theta, const std::vector<Trajectory>& trajectories,
            const GirlProblem& problem);

/// Unconstrained coordinates (log lambda, log eta, logit rho, log omega).
Eigen::Vector4d to_unconstrained(const RewardParams& theta);
RewardParams from_unconstrained(const Eigen::Vector4d& z);

/// Central-difference gradient of f at z with step h per coordinate. Throws
/// NumericError naming the coordinate when a probe value is not finite.
Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& z, double h, bool parallel = false);

struct FiniteDifferences {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // diagonal only unless the full Hessian was requested
};

/// Central differences around z given f(z) = f_center. The diagonal of the
/// Hessian comes from the same 2 * dim probes as the gradient; the full
/// Hessian adds two probes per coordinate pair.
FiniteDifferences central_differences(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& z, double f_center, double h,
                                      bool full_hessian, bool parallel = false);

/// Gradient of `loss` in unconstrained coordinates.
Eigen::Vector4d grad_loss(const RewardParams& theta, const std::vector<Trajectory>& trajectories,
                          const GirlProblem& problem, double grad_eps);

/// Gradient descent in unconstrained coordinates. A step that raises the loss
/// is halved (at most 20 times); after an accepted step the step size doubles
/// again, never exceeding the configured learning rate. Stops on max_iter,
/// gradient norm < tol, loss decrease < tol, or 20 failed halvings.
FitReport girl_fit(const std::vector<Trajectory>& trajectories, const GirlConfig& config,
                   const GirlProblem& problem);

}  // namespace glearn
