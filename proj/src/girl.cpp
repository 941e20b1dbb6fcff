#include "glearn/girl.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "glearn/errors.hpp"

namespace glearn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kMaxHalvings = 20;

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_bond(double x_next0, double x0, double u0, double r_f_step, double bond_tol) {
  const double predicted = (1.0 + r_f_step) * (x0 + u0);
  if (std::abs(x_next0 - predicted) > bond_tol * std::max(1.0, std::abs(x_next0))) {
    throw InconsistentTrajectoryError("bond leg grew to " + std::to_string(x_next0) +
                                      ", expected " + std::to_string(predicted));
  }
}

void check_trajectory(const Trajectory& traj, int horizon, Eigen::Index n) {
  if (traj.horizon() != horizon || static_cast<int>(traj.states.size()) != horizon + 1) {
    throw ShapeError("trajectory horizon " + std::to_string(traj.horizon()) +
                     " does not match policy horizon " + std::to_string(horizon));
  }
  for (const auto& s : traj.states) require_size(s, n, "trajectory state");
  for (const auto& a : traj.actions) require_size(a, n, "trajectory action");
}

}  // namespace

void GirlConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("girl: learning_rate must be > 0");
  if (!(grad_eps > 0.0)) throw ConfigError("girl: grad_eps must be > 0");
  if (!(tol > 0.0)) throw ConfigError("girl: tol must be > 0");
  if (max_iter < 0) throw ConfigError("girl: max_iter must be >= 0");
  theta0.validate();
}

// ---------------------------------------------------------------------------
// Transition density

TransitionDensity::TransitionDensity(const MatrixXd& sigma_r)
    : llt_(checked_llt(sigma_r, "transition Sigma_r")) {
  log_norm_ = -0.5 * (static_cast<double>(sigma_r.rows()) * kLog2Pi + log_det(llt_));
}

double TransitionDensity::operator()(const VectorXd& x_next, const VectorXd& x, const VectorXd& u,
                                     const VectorXd& rbar_t, double r_f_step,
                                     double bond_tol) const {
  const auto n = x.size();
  require_size(x_next, n, "transition x_next");
  require_size(u, n, "transition u");
  require_size(rbar_t, n, "transition rbar");
  if (llt_.rows() != n - 1) throw ShapeError("transition: Sigma_r does not match state size");
  check_bond(x_next[0], x[0], u[0], r_f_step, bond_tol);
  const VectorXd z = (x + u).tail(n - 1);
  if ((z.array() == 0.0).any()) throw DegeneratePositionError("zero post-trade risky position");
  const VectorXd delta =
      x_next.tail(n - 1).cwiseQuotient(z) - (VectorXd::Ones(n - 1) + rbar_t.tail(n - 1));
  const VectorXd y = llt_.matrixL().solve(delta);
  return log_norm_ - 0.5 * y.squaredNorm();
}

VectorXd TransitionDensity::batch(const MatrixXd& x_next, const MatrixXd& x, const MatrixXd& u,
                                  const VectorXd& rbar_t, double r_f_step,
                                  double bond_tol) const {
  const auto n = x.rows();
  const auto d = x.cols();
  for (Eigen::Index j = 0; j < d; ++j) check_bond(x_next(0, j), x(0, j), u(0, j), r_f_step, bond_tol);
  const MatrixXd z = (x + u).bottomRows(n - 1);
  if ((z.array() == 0.0).any()) throw DegeneratePositionError("zero post-trade risky position");
  MatrixXd delta = x_next.bottomRows(n - 1).cwiseQuotient(z);
  delta.colwise() -= VectorXd::Ones(n - 1) + rbar_t.tail(n - 1);
  const MatrixXd y = llt_.matrixL().solve(delta);
  return (log_norm_ - 0.5 * y.colwise().squaredNorm().array()).matrix().transpose();
}

double transition_logdensity(const VectorXd& x_next, const VectorXd& x, const VectorXd& u,
                             const VectorXd& rbar_t, const MatrixXd& sigma_r, double r_f_step,
                             double bond_tol) {
  return TransitionDensity(sigma_r)(x_next, x, u, rbar_t, r_f_step, bond_tol);
}

// ---------------------------------------------------------------------------
// Likelihood

PolicySolution solve_for(const RewardParams& theta, const GirlProblem& problem) {
  const auto rewards =
      build_rewards(theta, problem.benchmark, problem.dynamics.rbar, problem.dynamics.sigma_r);
  return backward_solve(rewards, problem.prior, problem.solver, problem.dynamics);
}

double trajectory_loglik(const PolicySolution& solution, const Trajectory& traj,
                         const GirlProblem& problem) {
  const int horizon = solution.horizon();
  check_trajectory(traj, horizon, solution.num_assets());
  const TransitionDensity transition(problem.dynamics.sigma_r);
  const double beta = solution.beta;
  double ll = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const VectorXd& x = traj.states[t];
    const VectorXd& u = traj.actions[t];
    double step = beta * (solution.g[t].eval(x, u) - solution.f[t].eval(x));
    if (problem.include_prior_term) step += PriorStep(problem.prior, t).log_density(x, u);
    step += transition(traj.states[t + 1], x, u, problem.dynamics.rbar_at(t), problem.r_f_step,
                       problem.bond_tol);
    ll += step;
  }
  return ll;
}

double trajectory_loglik(const RewardParams& theta, const Trajectory& traj,
                         const GirlProblem& problem) {
  return trajectory_loglik(solve_for(theta, problem), traj, problem);
}

double loss(const RewardParams& theta, const std::vector<Trajectory>& trajectories,
            const GirlProblem& problem) {
  if (trajectories.empty()) throw UsageError("loss: empty trajectory set");
  const PolicySolution solution = solve_for(theta, problem);
  const int horizon = solution.horizon();
  const auto n = solution.num_assets();
  const auto d = static_cast<Eigen::Index>(trajectories.size());
  for (const auto& traj : trajectories) check_trajectory(traj, horizon, n);

  const TransitionDensity transition(problem.dynamics.sigma_r);
  const double beta = solution.beta;
  MatrixXd x(n, d), u(n, d), x_next(n, d);
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x.col(j) = trajectories[j].states[t];
      u.col(j) = trajectories[j].actions[t];
      x_next.col(j) = trajectories[j].states[t + 1];
    }
    const auto& g = solution.g[t];
    const auto& f = solution.f[t];
    // beta (G - F); the x'Qxx x and x'Fxx x terms are combined before use.
    const MatrixXd dxx = g.q_xx - f.f_xx;
    const VectorXd dx = g.q_x - f.f_x;
    const Eigen::ArrayXd gf = x.cwiseProduct(dxx * x).colwise().sum().array() +
                              u.cwiseProduct(g.q_ux * x).colwise().sum().array() +
                              u.cwiseProduct(g.q_uu * u).colwise().sum().array() +
                              (dx.transpose() * x).array() + (g.q_u.transpose() * u).array() +
                              (g.q_0 - f.f_0);
    total += beta * gf.sum();
    if (problem.include_prior_term) {
      const PriorStep prior(problem.prior, t);
      MatrixXd r = u - prior.v_bar * x;
      r.colwise() -= prior.u_bar;
      const double quad = r.cwiseProduct(prior.precision * r).sum();
      total += -0.5 * (static_cast<double>(d) * (static_cast<double>(n) * kLog2Pi + prior.log_det_sigma) + quad);
    }
    total += transition.batch(x_next, x, u, problem.dynamics.rbar_at(t), problem.r_f_step,
                              problem.bond_tol).sum();
  }
  return -total;
}

// ---------------------------------------------------------------------------
// Gradient

Eigen::Vector4d to_unconstrained(const RewardParams& theta) {
  theta.validate();
  if (theta.rho <= 0.0 || theta.rho >= 1.0) {
    throw ConfigError("girl: rho must lie strictly inside (0, 1) for the logit transform");
  }
  return {std::log(theta.lambda), std::log(theta.eta), logit(theta.rho), std::log(theta.omega)};
}

RewardParams from_unconstrained(const Eigen::Vector4d& z) {
  return {std::exp(z[0]), std::exp(z[1]), sigmoid(z[2]), std::exp(z[3])};
}

namespace {

// Evaluates f at every point, concurrently when asked. Probe order does not
// affect the results.
Eigen::VectorXd evaluate_points(const std::function<double(const Eigen::VectorXd&)>& f,
                                const std::vector<Eigen::VectorXd>& points,
                                const std::vector<Eigen::Index>& coordinate, bool parallel) {
  auto eval = [&](std::size_t k) {
    const double v = f(points[k]);
    if (!std::isfinite(v)) {
      throw NumericError("non-finite loss at gradient probe for coordinate " +
                         std::to_string(coordinate[k]));
    }
    return v;
  };
  Eigen::VectorXd values(static_cast<Eigen::Index>(points.size()));
  if (parallel) {
    std::vector<std::future<double>> futures;
    for (std::size_t k = 0; k < points.size(); ++k) {
      futures.push_back(std::async(std::launch::async, eval, k));
    }
    for (std::size_t k = 0; k < points.size(); ++k) values[k] = futures[k].get();
  } else {
    for (std::size_t k = 0; k < points.size(); ++k) values[k] = eval(k);
  }
  return values;
}

}  // namespace

FiniteDifferences central_differences(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& z, double f_center, double h,
                                      bool full_hessian, bool parallel) {
  const auto dim = z.size();
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::Index> coordinate;
  auto shifted = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Eigen::VectorXd p = z;
    p[i] += si * h;
    if (j >= 0) p[j] += sj * h;
    points.push_back(std::move(p));
    coordinate.push_back(i);
  };
  for (Eigen::Index i = 0; i < dim; ++i) {
    shifted(i, 1.0, -1, 0.0);
    shifted(i, -1.0, -1, 0.0);
  }
  if (full_hessian) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i + 1; j < dim; ++j) {
        shifted(i, 1.0, j, 1.0);
        shifted(i, -1.0, j, -1.0);
      }
    }
  }
  const Eigen::VectorXd v = evaluate_points(f, points, coordinate, parallel);

  FiniteDifferences fd;
  fd.gradient.resize(dim);
  fd.hessian = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double plus = v[2 * i];
    const double minus = v[2 * i + 1];
    fd.gradient[i] = (plus - minus) / (2.0 * h);
    fd.hessian(i, i) = (plus - 2.0 * f_center + minus) / (h * h);
  }
  if (full_hessian) {
    Eigen::Index k = 2 * dim;
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i + 1; j < dim; ++j) {
        // f(+i+j) + f(-i-j) = 2 f + h^2 (H_ii + H_jj + 2 H_ij) + O(h^4)
        const double pair = v[k] + v[k + 1];
        k += 2;
        const double hij = (pair - 2.0 * f_center) / (2.0 * h * h) -
                           0.5 * (fd.hessian(i, i) + fd.hessian(j, j));
        fd.hessian(i, j) = hij;
        fd.hessian(j, i) = hij;
      }
    }
  }
  return fd;
}

Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& z, double h, bool parallel) {
  return central_differences(f, z, 0.0, h, false, parallel).gradient;
}

namespace {

std::function<double(const Eigen::VectorXd&)> loss_in_z(const std::vector<Trajectory>& trajectories,
                                                         const GirlProblem& problem) {
  return [&trajectories, &problem](const Eigen::VectorXd& z) {
    return loss(from_unconstrained(Eigen::Vector4d(z)), trajectories, problem);
  };
}

// Absolute eigenvalues keep the direction a descent direction when the local
// Hessian is indefinite; the floor bounds the step along flat directions.
Eigen::Vector4d precondition(const Eigen::Vector4d& grad, const Eigen::MatrixXd& hessian,
                             Preconditioner kind) {
  switch (kind) {
    case Preconditioner::None:
      return grad;
    case Preconditioner::Diagonal: {
      const Eigen::Vector4d curv = hessian.diagonal().cwiseAbs();
      const double floor = std::max(1e-8 * curv.maxCoeff(), 1e-300);
      return grad.cwiseQuotient(curv.cwiseMax(floor));
    }
    case Preconditioner::Hessian: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
      Eigen::VectorXd values = eig.eigenvalues().cwiseAbs();
      const double floor = std::max(1e-8 * values.maxCoeff(), 1e-300);
      values = values.cwiseMax(floor);
      const Eigen::MatrixXd& vecs = eig.eigenvectors();
      return vecs * (vecs.transpose() * grad).cwiseQuotient(values);
    }
  }
  return grad;
}

}  // namespace

Eigen::Vector4d grad_loss(const RewardParams& theta, const std::vector<Trajectory>& trajectories,
                          const GirlProblem& problem, double grad_eps) {
  if (trajectories.empty()) throw UsageError("grad_loss: empty trajectory set");
  const Eigen::VectorXd z = to_unconstrained(theta);
  return central_gradient(loss_in_z(trajectories, problem), z, grad_eps, true);
}

// ---------------------------------------------------------------------------
// Fit

FitReport girl_fit(const std::vector<Trajectory>& trajectories, const GirlConfig& config,
                   const GirlProblem& problem) {
  if (trajectories.empty()) throw UsageError("girl_fit: empty trajectory set");
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto objective = loss_in_z(trajectories, problem);

  FitReport report;
  Eigen::Vector4d z = to_unconstrained(config.theta0);
  double current = objective(z);
  if (!std::isfinite(current)) throw FitError("girl_fit: non-finite initial loss", {current});
  report.loss_history.push_back(current);
  report.theta_history.push_back(from_unconstrained(z));

  double step = config.learning_rate;
  for (int it = 0; it < config.max_iter; ++it) {
    FiniteDifferences fd;
    try {
      fd = central_differences(objective, z, current, config.grad_eps,
                               config.preconditioner == Preconditioner::Hessian, true);
    } catch (const NumericError& e) {
      throw FitError(std::string("girl_fit: ") + e.what(), report.loss_history);
    }
    const Eigen::Vector4d grad = fd.gradient;
    const double grad_norm = grad.norm();
    report.grad_norm_history.push_back(grad_norm);
    if (grad_norm < config.tol) {
      report.converged = true;
      break;
    }

    const Eigen::Vector4d direction = precondition(grad, fd.hessian, config.preconditioner);

    bool accepted = false;
    double candidate_loss = current;
    Eigen::Vector4d candidate = z;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      candidate = z - step * direction;
      try {
        candidate_loss = objective(candidate);
      } catch (const Error&) {
        // Overflowed or infeasible candidate; treated as a loss increase.
        candidate_loss = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(candidate_loss) && candidate_loss <= current) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double change = current - candidate_loss;
    z = candidate;
    current = candidate_loss;
    report.loss_history.push_back(current);
    report.theta_history.push_back(from_unconstrained(z));
    report.iterations = it + 1;
    step = std::min(2.0 * step, config.learning_rate);
    if (change < config.tol) {
      report.converged = true;
      break;
    }
  }

  report.theta_star = from_unconstrained(z);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace glearn
