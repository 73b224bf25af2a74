#pragma once

// Adam and the training loop. One epoch = one Adam step on the full batch:
// the frozen Simpson nodes in 1D, or a fresh Monte Carlo batch per epoch in
// higher dimension with the per-epoch seed derived from (quad seed, epoch).
// Fixed epoch budgets by default; the gradient-norm stop is only used by the
// second-minimizer (retrain) protocol.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/loss.hpp"
#include "lprobe/network.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/quadrature.hpp"
#include "lprobe/rng.hpp"

namespace lprobe {

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double lr = 1e-3;
  double rho1 = 0.9;
  double rho2 = 0.999;
  double delta = 1e-8;

  explicit AdamState(std::size_t n, double lr_ = 1e-3)
      : m(n, 0.0), v(n, 0.0), lr(lr_) {}
};

inline void adam_step(AdamState& state, std::span<double> theta,
                      std::span<const double> grad) {
  if (state.m.size() != theta.size() || grad.size() != theta.size())
    throw UsageError("adam_step: length mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw NumericalError("adam_step: non-finite gradient component " +
                           std::to_string(i));
  ++state.t;
  const double c1 = 1.0 - std::pow(state.rho1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.rho2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = state.rho1 * state.m[i] + (1.0 - state.rho1) * grad[i];
    state.v[i] = state.rho2 * state.v[i] + (1.0 - state.rho2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.delta);
  }
}

struct TrajectoryPoint {
  long epoch = 0;
  double loss = 0.0;
  double rel_l2 = 0.0;
  std::vector<double> theta;
};

struct TrainOptions {
  LossKind loss = LossKind::DGM;
  long epochs = 10000;
  QuadSpec quad;
  double lr = 1e-3;
  long snapshot_every = 0;  // 0: powers of two plus every 500 plus endpoints
  double grad_tol = 0.0;    // stop when ||grad||_2 < tol; 0 disables
};

struct TrainResult {
  std::vector<double> theta;
  std::vector<TrajectoryPoint> trajectory;  // epochs strictly increasing
  bool diverged = false;
  bool converged = false;  // grad_tol reached
  long epochs_run = 0;
  double final_grad_norm = 0.0;
};

inline bool snapshot_epoch(long e, long total, long every) {
  if (e <= 0 || e == total) return true;
  if (every > 0) return e % every == 0;
  if (e % 500 == 0) return true;
  return (e & (e - 1)) == 0;
}

/// Independent evaluation quadrature for the relative L2 error column.
inline QuadratureSet make_eval_quadrature(const Problem& problem,
                                          std::uint64_t quad_seed) {
  if (problem.d == 1) return simpson_1d(1001);
  return monte_carlo(problem, 8192, derive_seed(quad_seed, 0x65766131ull));
}

inline TrainResult train(const Problem& problem, const NetworkSpec& spec,
                         std::span<const double> theta0,
                         const TrainOptions& opt) {
  if (opt.epochs < 1) throw UsageError("train: need at least 1 epoch");
  if (theta0.size() != param_count(spec))
    throw ConfigError("train: parameter count mismatch");

  TrainResult result;
  result.theta.assign(theta0.begin(), theta0.end());
  AdamState adam(theta0.size(), opt.lr);
  LossGradient grad_eval(problem, spec, opt.loss);

  const bool fresh_mc = opt.quad.scheme == QuadScheme::MonteCarlo;
  QuadratureSet quad;
  if (!fresh_mc) quad = build_quadrature(opt.quad, problem);
  const QuadratureSet eval_quad = make_eval_quadrature(problem, opt.quad.seed);

  auto record = [&](long epoch, double loss) {
    TrajectoryPoint point;
    point.epoch = epoch;
    point.loss = loss;
    point.rel_l2 = relative_l2_error(problem, spec, result.theta, eval_quad);
    point.theta = result.theta;
    result.trajectory.push_back(std::move(point));
  };

  try {
    if (fresh_mc)
      quad = monte_carlo(problem, opt.quad.n, derive_seed(opt.quad.seed, 0));
    record(0, loss_value(problem, spec, result.theta, quad, opt.loss));

    for (long e = 1; e <= opt.epochs; ++e) {
      if (fresh_mc)
        quad = monte_carlo(problem, opt.quad.n,
                           derive_seed(opt.quad.seed, static_cast<std::uint64_t>(e)));
      const GradResult gr = grad_eval.eval(result.theta, quad);

      double norm_sq = 0.0;
      for (double g : gr.grad) norm_sq += g * g;
      result.final_grad_norm = std::sqrt(norm_sq);
      if (opt.grad_tol > 0.0 && result.final_grad_norm < opt.grad_tol) {
        result.converged = true;
        if (result.trajectory.back().epoch != result.epochs_run)
          record(result.epochs_run, gr.loss);
        return result;
      }

      adam_step(adam, result.theta, gr.grad);
      result.epochs_run = e;
      if (snapshot_epoch(e, opt.epochs, opt.snapshot_every))
        record(e, loss_value(problem, spec, result.theta, quad, opt.loss));
    }
  } catch (const NumericalError&) {
    result.diverged = true;  // trajectory preserved up to the failure
  }
  return result;
}

/// Second-minimizer protocol: descend the target loss starting from a
/// minimizer of the other loss, stopping at gradient norm below tolerance.
inline TrainResult retrain_from(const Problem& problem, const NetworkSpec& spec,
                                std::span<const double> theta_other,
                                TrainOptions opt) {
  if (opt.grad_tol <= 0.0) opt.grad_tol = 1e-4;
  return train(problem, spec, theta_other, opt);
}

}  // namespace lprobe
