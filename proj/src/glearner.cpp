#include "glearn/glearner.hpp"

#include <cmath>

#include "glearn/errors.hpp"
#include "glearn/rng.hpp"

namespace glearn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double gaussian_log_density(const VectorXd& residual, const MatrixXd& chol_lower) {
  const auto n = static_cast<double>(residual.size());
  const VectorXd y = chol_lower.triangularView<Eigen::Lower>().solve(residual);
  const double log_det = 2.0 * chol_lower.diagonal().array().log().sum();
  return -0.5 * (n * kLog2Pi + log_det + y.squaredNorm());
}

}  // namespace

// ---------------------------------------------------------------------------
// Prior

PriorPolicy PriorPolicy::make_default(int num_assets, int horizon, double nominal_contribution,
                                      double sigma) {
  if (num_assets < 1 || horizon < 0) throw ConfigError("prior: invalid dimensions");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("prior: sigma must be > 0");
  PriorPolicy p;
  p.u_bar.assign(horizon, VectorXd::Constant(num_assets, nominal_contribution / num_assets));
  p.v_bar.assign(horizon, MatrixXd::Zero(num_assets, num_assets));
  p.sigma_p = sigma * sigma * MatrixXd::Identity(num_assets, num_assets);
  return p;
}

void PriorPolicy::validate(int num_assets, int horizon_steps) const {
  if (horizon() != horizon_steps || static_cast<int>(v_bar.size()) != horizon_steps) {
    throw ShapeError("prior: horizon mismatch");
  }
  require_shape(sigma_p, num_assets, num_assets, "prior Sigma_p");
  for (int t = 0; t < horizon_steps; ++t) {
    require_size(u_bar[t], num_assets, "prior u_bar");
    require_shape(v_bar[t], num_assets, num_assets, "prior v_bar");
  }
  checked_llt(sigma_p, "prior Sigma_p");
}

PriorStep::PriorStep(const VectorXd& u, const MatrixXd& v, const MatrixXd& s)
    : u_bar(u), v_bar(v), sigma_p(s) {
  const auto llt = checked_llt(sigma_p, "prior Sigma_p");
  precision = symmetrize(llt.solve(MatrixXd::Identity(s.rows(), s.cols())));
  log_det_sigma = log_det(llt);
}

double PriorStep::log_density(const VectorXd& x, const VectorXd& u) const {
  const VectorXd r = u - mean(x);
  const auto n = static_cast<double>(u.size());
  return -0.5 * (n * kLog2Pi + log_det_sigma + r.dot(precision * r));
}

// ---------------------------------------------------------------------------
// Quadratic forms

GCoeffs GCoeffs::zero(Eigen::Index n) {
  return {MatrixXd::Zero(n, n), MatrixXd::Zero(n, n), MatrixXd::Zero(n, n),
          VectorXd::Zero(n), VectorXd::Zero(n), 0.0};
}

double GCoeffs::eval(const VectorXd& x, const VectorXd& u) const {
  return x.dot(q_xx * x) + u.dot(q_ux * x) + u.dot(q_uu * u) + x.dot(q_x) + u.dot(q_u) + q_0;
}

FCoeffs FCoeffs::zero(Eigen::Index n) { return {MatrixXd::Zero(n, n), VectorXd::Zero(n), 0.0}; }

double FCoeffs::eval(const VectorXd& x) const { return x.dot(f_xx * x) + x.dot(f_x) + f_0; }

void SolverConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("solver: beta must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("solver: gamma must lie in (0, 1]");
  if (max_iter < 1) throw ConfigError("solver: max_iter must be >= 1");
  if (!(eps >= 0.0)) throw ConfigError("solver: eps must be >= 0");
}

// ---------------------------------------------------------------------------
// Backward recursion pieces

GCoeffs continuation_coeffs(const FCoeffs& f_next, const VectorXd& rbar_t,
                            const MatrixXd& sigma_r, double gamma) {
  const auto n = rbar_t.size();
  require_shape(f_next.f_xx, n, n, "continuation F_xx");
  require_size(f_next.f_x, n, "continuation F_x");
  // A Fxx A + Fxx o Sigma_eps = Fxx o ((1 + rbar)(1 + rbar)' + Sigma_eps) = Fxx o Sigma_hat.
  const MatrixXd m = gamma * symmetrize(f_next.f_xx).cwiseProduct(sigma_hat(rbar_t, sigma_r));
  const VectorXd gross = VectorXd::Ones(n) + rbar_t;
  const VectorXd b = gamma * gross.cwiseProduct(f_next.f_x);

  GCoeffs c;
  c.q_xx = m;
  c.q_ux = 2.0 * m;
  c.q_uu = m;
  c.q_x = b;
  c.q_u = b;
  c.q_0 = gamma * f_next.f_0;
  return c;
}

GCoeffs g_coeffs_at(const QuadReward& reward, const FCoeffs& f_next, const VectorXd& rbar_t,
                    const MatrixXd& sigma_r, double gamma) {
  GCoeffs g = continuation_coeffs(f_next, rbar_t, sigma_r, gamma);
  g.q_xx = symmetrize(g.q_xx + reward.r_xx);
  g.q_ux += reward.r_ux;
  g.q_uu = symmetrize(g.q_uu + reward.r_uu);
  g.q_x += reward.r_x;
  g.q_u += reward.r_u;
  g.q_0 += reward.r_0;
  return g;
}

PolicyStep policy_from_g(const GCoeffs& g, const PriorStep& prior, double beta) {
  const auto n = g.q_uu.rows();
  const MatrixXd precision = symmetrize(prior.precision - 2.0 * beta * g.q_uu);
  const auto llt = checked_llt(precision, "policy precision Sigma_p^-1 - 2 beta Q_uu");
  PolicyStep p;
  p.sigma_tilde = symmetrize(llt.solve(MatrixXd::Identity(n, n)));
  p.u_tilde = llt.solve(prior.precision * prior.u_bar + beta * g.q_u);
  p.v_tilde = llt.solve(prior.precision * prior.v_bar + beta * g.q_ux);
  return p;
}

FCoeffs f_coeffs_from_g(const GCoeffs& g, const PriorStep& prior, double beta) {
  const MatrixXd precision = symmetrize(prior.precision - 2.0 * beta * g.q_uu);
  const auto llt = checked_llt(precision, "free-energy precision Sigma_p^-1 - 2 beta Q_uu");
  const MatrixXd big_u = beta * g.q_ux + prior.precision * prior.v_bar;
  const VectorXd big_w = beta * g.q_u + prior.precision * prior.u_bar;
  const MatrixXd solved_u = llt.solve(big_u);
  const VectorXd solved_w = llt.solve(big_w);
  const MatrixXd pv = prior.precision * prior.v_bar;
  const VectorXd pu = prior.precision * prior.u_bar;

  FCoeffs f;
  f.f_xx = symmetrize(g.q_xx + (0.5 / beta) * (big_u.transpose() * solved_u -
                                               prior.v_bar.transpose() * pv));
  f.f_x = g.q_x + (1.0 / beta) * (big_u.transpose() * solved_w - prior.v_bar.transpose() * pu);
  f.f_0 = g.q_0 + (0.5 / beta) * (big_w.dot(solved_w) - prior.u_bar.dot(pu)) -
          (0.5 / beta) * (prior.log_det_sigma + log_det(llt));
  return f;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

double solution_change(const PolicySolution& a, const PolicySolution& b) {
  double d = 0.0;
  for (std::size_t t = 0; t < a.g.size(); ++t) {
    d = std::max({d, max_abs_diff(a.g[t].q_xx, b.g[t].q_xx), max_abs_diff(a.g[t].q_ux, b.g[t].q_ux),
                  max_abs_diff(a.g[t].q_uu, b.g[t].q_uu), max_abs_diff(a.g[t].q_x, b.g[t].q_x),
                  max_abs_diff(a.g[t].q_u, b.g[t].q_u), std::abs(a.g[t].q_0 - b.g[t].q_0)});
  }
  for (std::size_t t = 0; t < a.f.size(); ++t) {
    d = std::max({d, max_abs_diff(a.f[t].f_xx, b.f[t].f_xx), max_abs_diff(a.f[t].f_x, b.f[t].f_x),
                  std::abs(a.f[t].f_0 - b.f[t].f_0)});
  }
  return d;
}

PolicySolution sweep(const std::vector<QuadReward>& rewards, const PriorPolicy& prior,
                     const SolverConfig& config, const Dynamics& dynamics) {
  const int horizon = static_cast<int>(rewards.size());
  const auto n = dynamics.num_assets();
  PolicySolution s;
  s.beta = config.beta;
  s.u_tilde.resize(horizon);
  s.v_tilde.resize(horizon);
  s.sigma_tilde.resize(horizon);
  s.sigma_chol.resize(horizon);
  s.g.resize(horizon);
  s.f.resize(horizon + 1);
  s.f[horizon] = FCoeffs::zero(n);

  for (int t = horizon - 1; t >= 0; --t) {
    try {
      const PriorStep prior_t(prior, t);
      const VectorXd rbar_t = dynamics.rbar_at(t);
      s.g[t] = g_coeffs_at(rewards[t], s.f[t + 1], rbar_t, dynamics.sigma_r, config.gamma);
      PolicyStep step = policy_from_g(s.g[t], prior_t, config.beta);
      s.f[t] = f_coeffs_from_g(s.g[t], prior_t, config.beta);
      const auto llt = checked_llt(step.sigma_tilde, "policy covariance");
      s.sigma_chol[t] = llt.matrixL();
      s.u_tilde[t] = std::move(step.u_tilde);
      s.v_tilde[t] = std::move(step.v_tilde);
      s.sigma_tilde[t] = std::move(step.sigma_tilde);
      if (!s.f[t].f_xx.allFinite() || !s.f[t].f_x.allFinite() || !std::isfinite(s.f[t].f_0)) {
        throw NumericError("non-finite free-energy coefficients");
      }
    } catch (const SolverError&) {
      throw;
    } catch (const Error& e) {
      throw SolverError(t, e.what());
    }
  }
  return s;
}

}  // namespace

PolicySolution backward_solve(const std::vector<QuadReward>& rewards, const PriorPolicy& prior,
                              const SolverConfig& config, const Dynamics& dynamics) {
  config.validate();
  const int horizon = static_cast<int>(rewards.size());
  if (horizon < 1) throw UsageError("backward_solve: horizon must be >= 1");
  if (dynamics.horizon() < horizon) throw ShapeError("backward_solve: dynamics shorter than horizon");
  const auto n = dynamics.num_assets();
  require_shape(dynamics.sigma_r, n - 1, n - 1, "backward_solve Sigma_r");
  prior.validate(static_cast<int>(n), horizon);

  // Algorithm 1's outer loop. The recursion is exact for a finite horizon, so
  // the second sweep reproduces the first and the loop exits.
  PolicySolution current = sweep(rewards, prior, config, dynamics);
  current.sweeps = 1;
  for (int it = 1; it < config.max_iter; ++it) {
    PolicySolution next = sweep(rewards, prior, config, dynamics);
    const double change = solution_change(current, next);
    next.sweeps = current.sweeps + 1;
    next.last_sweep_change = change;
    current = std::move(next);
    if (change < config.eps) break;
  }
  return current;
}

double PolicySolution::log_density(int t, const VectorXd& x, const VectorXd& u) const {
  return gaussian_log_density(u - mean(t, x), sigma_chol[t]);
}

// ---------------------------------------------------------------------------
// Acting

VectorXd sample_action(const PolicySolution& solution, int t, const VectorXd& x,
                       std::uint64_t seed) {
  if (t < 0 || t >= solution.horizon()) throw UsageError("sample_action: t out of range");
  Rng rng(seed);
  const VectorXd z = rng.normal_vector(solution.num_assets());
  return solution.mean(t, x) + solution.sigma_chol[t].triangularView<Eigen::Lower>() * z;
}

VectorXd step_dynamics(const VectorXd& x, const VectorXd& u, const VectorXd& realized_r) {
  require_size(u, x.size(), "step_dynamics u");
  require_size(realized_r, x.size(), "step_dynamics r");
  return (VectorXd::Ones(x.size()) + realized_r).cwiseProduct(x + u);
}

Trajectory rollout(const PolicySolution& solution, const ReturnsPanel& panel, const VectorXd& x0,
                   std::uint64_t seed) {
  const int horizon = solution.horizon();
  if (horizon > 0) require_size(x0, solution.num_assets(), "rollout x0");
  if (panel.realized.rows() < horizon) throw ShapeError("rollout: returns panel shorter than policy");
  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.states.push_back(x0);
  for (int t = 0; t < horizon; ++t) {
    const VectorXd& x = traj.states.back();
    VectorXd u = sample_action(solution, t, x, derive_seed(seed, Stream::Action, t));
    VectorXd next = step_dynamics(x, u, panel.realized.row(t).transpose());
    traj.contributions.push_back(u.sum());
    traj.actions.push_back(std::move(u));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

double expected_contribution(const PolicySolution& solution, int t, const VectorXd& x) {
  if (t < 0 || t >= solution.horizon()) throw UsageError("expected_contribution: t out of range");
  return solution.mean(t, x).sum();
}

double expected_contribution(const PriorPolicy& prior, int t, const VectorXd& x) {
  if (t < 0 || t >= prior.horizon()) throw UsageError("expected_contribution: t out of range");
  return (prior.u_bar[t] + prior.v_bar[t] * x).sum();
}

double gaussian_kl(const VectorXd& m1, const MatrixXd& s1, const VectorXd& m0,
                   const MatrixXd& s0) {
  const auto n = m1.size();
  const auto llt0 = checked_llt(s0, "kl reference covariance");
  const auto llt1 = checked_llt(s1, "kl policy covariance");
  const VectorXd d = m0 - m1;
  const double trace_term = llt0.solve(s1).trace();
  const double maha = d.dot(llt0.solve(d));
  const double kl = 0.5 * (trace_term + maha - static_cast<double>(n) + log_det(llt0) - log_det(llt1));
  return std::max(kl, 0.0);
}

double kl_to_prior(const PolicySolution& solution, const PriorPolicy& prior, int t,
                   const VectorXd& x) {
  if (t < 0 || t >= solution.horizon()) throw UsageError("kl_to_prior: t out of range");
  return gaussian_kl(solution.mean(t, x), solution.sigma_tilde[t],
                     prior.u_bar[t] + prior.v_bar[t] * x, prior.sigma_p);
}

}  // namespace glearn
