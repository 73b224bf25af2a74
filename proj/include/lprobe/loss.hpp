#pragma once

// The two loss functionals and their parameter gradients.
//
//   DGM (least-squares residual):  J_G = int (-lap u - f)^2
//   DRM (variational):             J_R = int (1/2 |grad u|^2 - f u)
//
// u, grad u and lap u at a quadrature point come from d forward jet sweeps,
// one per coordinate. Values use plain Jet2 arithmetic; gradients record the
// same computation on a tape and run one reverse sweep per point. Quadrature
// points are processed in fixed-size chunks with partial sums reduced in
// chunk order, so results are bit-identical for any thread count.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/network.hpp"
#include "lprobe/parallel.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/quadrature.hpp"
#include "lprobe/tape.hpp"

namespace lprobe {

enum class LossKind { DGM, DRM };

inline std::string loss_key(LossKind kind) {
  return kind == LossKind::DGM ? "dgm" : "drm";
}
inline LossKind loss_from_key(const std::string& key) {
  if (key == "dgm") return LossKind::DGM;
  if (key == "drm") return LossKind::DRM;
  throw ConfigError("unknown loss kind: " + key);
}

namespace detail {

template <class S, class Ctx>
void lift_point(const Ctx& ctx, std::span<const double> x, int active,
                std::vector<S>& out) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = ctx.constant(static_cast<int>(i) == active ? Jet2::active(x[i])
                                                        : Jet2(x[i]));
}

template <class S>
struct PointBuffers {
  Workspace<S> ws;
  std::vector<S> x;
};

}  // namespace detail

/// Trial function with the boundary-enforcing ansatz applied, as a jet in
/// the chosen active coordinate.
template <class S, class Ctx>
S ansatz_apply(const Problem& problem, const NetworkSpec& spec, const Ctx& ctx,
               std::span<const double> x, int active,
               detail::PointBuffers<S>& buffers) {
  detail::lift_point(ctx, x, active, buffers.x);
  S nn = network_forward<S>(spec, ctx, buffers.x, buffers.ws);
  S factor = ctx.constant(boundary_factor(problem.domain, x, active));
  return factor * nn;
}

/// Convenience single-call form (plain jets).
inline Jet2 ansatz_apply(const Problem& problem, const NetworkSpec& spec,
                         std::span<const double> theta,
                         std::span<const double> x, int active = 0) {
  if (theta.size() != param_count(spec))
    throw ConfigError("ansatz_apply: parameter count mismatch");
  JetParamContext ctx{theta};
  detail::PointBuffers<Jet2> buffers;
  return ansatz_apply(problem, spec, ctx, x, active, buffers);
}

struct SpatialDerivs {
  double u = 0.0;
  std::vector<double> grad_x;
  double laplacian = 0.0;
};

/// Ansatz-wrapped trial value, spatial gradient and Laplacian at x, computed
/// by d single-coordinate jet sweeps.
inline SpatialDerivs eval_with_spatial_derivs(const Problem& problem,
                                              const NetworkSpec& spec,
                                              std::span<const double> theta,
                                              std::span<const double> x) {
  if (theta.size() != param_count(spec))
    throw ConfigError("eval_with_spatial_derivs: parameter count mismatch");
  JetParamContext ctx{theta};
  detail::PointBuffers<Jet2> buffers;
  SpatialDerivs result;
  result.grad_x.resize(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const Jet2 u = ansatz_apply(problem, spec, ctx, x, static_cast<int>(a), buffers);
    result.u = u.val;
    result.grad_x[a] = u.d1;
    result.laplacian += u.d2;
  }
  return result;
}

namespace detail {

/// Unweighted integrand at one quadrature point, generic over the scalar.
template <class S, class Ctx>
S pointwise_integrand(const Problem& problem, const NetworkSpec& spec,
                      const Ctx& ctx, std::span<const double> x, LossKind kind,
                      PointBuffers<S>& buffers) {
  const double f = problem.forcing(x);
  const int d = static_cast<int>(x.size());
  if (kind == LossKind::DGM) {
    S laplacian = pick_d2(ansatz_apply(problem, spec, ctx, x, 0, buffers));
    for (int a = 1; a < d; ++a)
      laplacian = laplacian + pick_d2(ansatz_apply(problem, spec, ctx, x, a, buffers));
    S residual = -laplacian - ctx.constant(Jet2(f));
    return residual * residual;
  }
  S u_val{};
  S grad_sq{};
  for (int a = 0; a < d; ++a) {
    S u = ansatz_apply(problem, spec, ctx, x, a, buffers);
    if (a == 0) u_val = pick_val(u);
    S g = pick_d1(u);
    grad_sq = a == 0 ? g * g : grad_sq + g * g;
  }
  return 0.5 * grad_sq - ctx.constant(Jet2(f)) * u_val;
}

inline std::size_t loss_chunk_size(std::size_t n_points) {
  // Independent of the thread budget so reductions stay deterministic.
  const std::size_t by_count = (n_points + 255) / 256;
  return std::max<std::size_t>(32, by_count);
}

}  // namespace detail

/// Loss value under a frozen quadrature set.
inline double loss_value(const Problem& problem, const NetworkSpec& spec,
                         std::span<const double> theta,
                         const QuadratureSet& quad, LossKind kind) {
  if (theta.size() != param_count(spec))
    throw ConfigError("loss_value: parameter count mismatch");
  if (quad.dim != problem.d)
    throw ConfigError("loss_value: quadrature dimension mismatch");
  const std::size_t n = quad.size();
  const std::size_t chunk = detail::loss_chunk_size(n);
  std::vector<double> partial((n + chunk - 1) / chunk, 0.0);
  parallel_chunks(n, chunk, [&](int, std::size_t c, std::size_t begin, std::size_t end) {
    thread_local detail::PointBuffers<Jet2> buffers;
    JetParamContext ctx{theta};
    double sum = 0.0;
    for (std::size_t k = begin; k < end; ++k)
      sum += quad.weights[k] *
             detail::pointwise_integrand(problem, spec, ctx, quad.point(k), kind, buffers)
                 .val;
    partial[c] = sum;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  if (!std::isfinite(total))
    throw NumericalError("loss_value: non-finite " + loss_key(kind) + " loss");
  return total;
}

inline double dgm_loss(const Problem& problem, const NetworkSpec& spec,
                       std::span<const double> theta, const QuadratureSet& quad) {
  return loss_value(problem, spec, theta, quad, LossKind::DGM);
}
inline double drm_loss(const Problem& problem, const NetworkSpec& spec,
                       std::span<const double> theta, const QuadratureSet& quad) {
  return loss_value(problem, spec, theta, quad, LossKind::DRM);
}

/// Loss of an arbitrary trial function given by its pointwise derivatives.
using TrialFn = std::function<SpatialDerivs(std::span<const double>)>;

inline double loss_value_of_trial(const Problem& problem,
                                  const QuadratureSet& quad, LossKind kind,
                                  const TrialFn& trial) {
  double total = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const auto x = quad.point(k);
    const SpatialDerivs s = trial(x);
    const double f = problem.forcing(x);
    if (kind == LossKind::DGM) {
      const double residual = -s.laplacian - f;
      total += quad.weights[k] * residual * residual;
    } else {
      double grad_sq = 0.0;
      for (double g : s.grad_x) grad_sq += g * g;
      total += quad.weights[k] * (0.5 * grad_sq - f * s.u);
    }
  }
  if (!std::isfinite(total))
    throw NumericalError("loss_value_of_trial: non-finite loss");
  return total;
}

/// Relative L2 error of the trial against the problem's exact solution,
/// both norms under the same (training-independent) quadrature.
inline double relative_l2_error(const Problem& problem, const NetworkSpec& spec,
                                std::span<const double> theta,
                                const QuadratureSet& eval_quad) {
  if (theta.size() != param_count(spec))
    throw ConfigError("relative_l2_error: parameter count mismatch");
  JetParamContext ctx{theta};
  detail::PointBuffers<Jet2> buffers;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < eval_quad.size(); ++k) {
    const auto x = eval_quad.point(k);
    const double u_trial = ansatz_apply(problem, spec, ctx, x, 0, buffers).val;
    const double u_exact = problem.exact_u(x);
    const double diff = u_trial - u_exact;
    num += eval_quad.weights[k] * diff * diff;
    den += eval_quad.weights[k] * u_exact * u_exact;
  }
  if (den <= 0.0)
    throw UsageError("relative_l2_error: exact solution has zero norm");
  return std::sqrt(num / den);
}

/// Loss + full parameter gradient, reusing per-worker tapes across calls.
/// Not safe for concurrent eval() on one instance.
class LossGradient {
 public:
  LossGradient(Problem problem, NetworkSpec spec, LossKind kind)
      : problem_(problem), spec_(spec), kind_(kind),
        tapes_(thread_budget()) {}

  GradResult eval(std::span<const double> theta, const QuadratureSet& quad) {
    const std::size_t p = param_count(spec_);
    if (theta.size() != p)
      throw ConfigError("LossGradient: parameter count mismatch");
    if (quad.dim != problem_.d)
      throw ConfigError("LossGradient: quadrature dimension mismatch");

    const std::size_t n = quad.size();
    const std::size_t chunk = detail::loss_chunk_size(n);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<double> loss_partial(n_chunks, 0.0);
    std::vector<std::vector<double>> grad_partial(n_chunks);

    parallel_chunks(n, chunk, [&](int worker, std::size_t c, std::size_t begin,
                                  std::size_t end) {
      Tape& tape = tapes_[worker];
      tape.init_leaves(theta);
      TapeParamContext ctx{&tape};
      thread_local detail::PointBuffers<Var> buffers;
      std::vector<double>& grad = grad_partial[c];
      grad.assign(p, 0.0);
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        tape.rewind();
        Var term = detail::pointwise_integrand(problem_, spec_, ctx,
                                               quad.point(k), kind_, buffers);
        sum += quad.weights[k] * tape.at(term).val;
        tape.backward(term, quad.weights[k], grad);
      }
      loss_partial[c] = sum;
    });

    GradResult result;
    result.grad.assign(p, 0.0);
    for (std::size_t c = 0; c < n_chunks; ++c) {
      result.loss += loss_partial[c];
      for (std::size_t i = 0; i < p; ++i) result.grad[i] += grad_partial[c][i];
    }
    if (!std::isfinite(result.loss))
      throw NumericalError("LossGradient: non-finite " + loss_key(kind_) + " loss");
    for (std::size_t i = 0; i < p; ++i)
      if (!std::isfinite(result.grad[i]))
        throw NumericalError("LossGradient: non-finite gradient component " +
                             std::to_string(i));
    return result;
  }

 private:
  Problem problem_;
  NetworkSpec spec_;
  LossKind kind_;
  std::vector<Tape> tapes_;
};

}  // namespace lprobe
