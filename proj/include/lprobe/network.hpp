#pragma once

// Trial-function families: a ResNet made of two-layer residual blocks, a
// plain fully connected net, and the two-parameter linear toy model. The
// forward pass is templated over the scalar type so the same code runs on
// plain Jet2 values (fast, no gradient) and on tape variables (reverse-mode
// parameter gradients).
//
// Parameter enumeration order is the single source of truth shared by the
// forward pass, the filter layout and Xavier initialization: layers in
// network order, filters (one per output neuron) within a layer, and within
// a filter the weight row followed by the bias. The toy model stores
// (theta0, theta1) with NN(x) = theta1*x + theta0 and forms one filter.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/jet.hpp"
#include "lprobe/rng.hpp"
#include "lprobe/tape.hpp"

namespace lprobe {

enum class NetKind { ResNet, FCNet, Linear1DToy };

struct NetworkSpec {
  NetKind kind = NetKind::ResNet;
  int d = 1;       // input dimension
  int w = 4;       // width
  int blocks = 1;  // residual blocks N; FCNet gets 2N hidden layers
  Activation activation = Activation::Swish;
};

/// 2Nw^2 + (d + 2N + 2)w + 1 for ResNet and FCNet, 2 for the toy.
inline std::size_t param_count(const NetworkSpec& spec) {
  if (spec.kind == NetKind::Linear1DToy) return 2;
  if (spec.w < 1 || spec.d < 1 || spec.blocks < 0)
    throw ConfigError("param_count: invalid network spec");
  const std::size_t w = spec.w, d = spec.d, n = spec.blocks;
  return 2 * n * w * w + (d + 2 * n + 2) * w + 1;
}

struct LayerShape {
  int fan_in = 0;
  int fan_out = 0;  // also the number of filters
};

/// Affine layers in network order: input (d->w), 2N hidden (w->w), output (w->1).
inline std::vector<LayerShape> layer_plan(const NetworkSpec& spec) {
  if (spec.kind == NetKind::Linear1DToy) return {{1, 1}};
  std::vector<LayerShape> plan;
  plan.push_back({spec.d, spec.w});
  for (int i = 0; i < 2 * spec.blocks; ++i) plan.push_back({spec.w, spec.w});
  plan.push_back({spec.w, 1});
  return plan;
}

struct FilterRange {
  int layer = 0;
  int filter = 0;
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open; weight row then bias
};

struct FilterLayout {
  std::vector<FilterRange> filters;
  std::size_t total = 0;
};

inline FilterLayout make_filter_layout(const NetworkSpec& spec) {
  FilterLayout layout;
  std::size_t cursor = 0;
  int layer_id = 0;
  for (const LayerShape& layer : layer_plan(spec)) {
    for (int f = 0; f < layer.fan_out; ++f) {
      const std::size_t width = static_cast<std::size_t>(layer.fan_in) + 1;
      layout.filters.push_back({layer_id, f, cursor, cursor + width});
      cursor += width;
    }
    ++layer_id;
  }
  layout.total = cursor;
  if (cursor != param_count(spec))
    throw ConfigError("make_filter_layout: layout does not cover parameters");
  return layout;
}

struct ParamVector {
  std::vector<double> values;
  FilterLayout layout;
};

/// Xavier-uniform weights, zero biases, deterministic per seed.
inline ParamVector init_xavier(const NetworkSpec& spec, std::uint64_t seed) {
  ParamVector theta;
  theta.layout = make_filter_layout(spec);
  theta.values.assign(theta.layout.total, 0.0);
  Xoshiro256pp rng(seed);
  if (spec.kind == NetKind::Linear1DToy) {
    const double bound = std::sqrt(6.0 / 2.0);
    theta.values[1] = rng.uniform(-bound, bound);  // weight; theta0 stays 0
    return theta;
  }
  std::size_t cursor = 0;
  for (const LayerShape& layer : layer_plan(spec)) {
    const double bound = std::sqrt(6.0 / (layer.fan_in + layer.fan_out));
    for (int f = 0; f < layer.fan_out; ++f) {
      for (int j = 0; j < layer.fan_in; ++j)
        theta.values[cursor++] = rng.uniform(-bound, bound);
      ++cursor;  // bias stays zero
    }
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Forward evaluation

/// Parameter/constant source for plain jet evaluation.
struct JetParamContext {
  std::span<const double> theta;
  Jet2 param(std::size_t p) const { return Jet2(theta[p]); }
  Jet2 constant(const Jet2& c) const { return c; }
};

/// Parameter/constant source recording onto a tape.
struct TapeParamContext {
  Tape* tape = nullptr;
  Var param(std::size_t p) const { return tape->leaf(p); }
  Var constant(const Jet2& c) const { return tape->constant(c); }
};

/// Hidden-state buffers reused across forward calls.
template <class S>
struct Workspace {
  std::vector<S> state, buf_a, buf_b;
};

/// Raw network output NN(x; theta), no boundary ansatz. `x` holds one lifted
/// scalar per input coordinate.
template <class S, class Ctx>
S network_forward(const NetworkSpec& spec, const Ctx& ctx, std::span<const S> x,
                  Workspace<S>& ws) {
  if (static_cast<int>(x.size()) != (spec.kind == NetKind::Linear1DToy ? 1 : spec.d))
    throw ConfigError("network_forward: input dimension mismatch");

  if (spec.kind == NetKind::Linear1DToy)
    return madd(ctx.param(1), x[0], ctx.param(0));

  const int w = spec.w;
  const int d = spec.d;
  auto& state = ws.state;
  auto& hidden = ws.buf_a;
  auto& inner = ws.buf_b;
  state.assign(w, S{});
  hidden.assign(w, S{});
  inner.assign(w, S{});

  std::size_t p = 0;
  // Input layer, affine only.
  for (int n = 0; n < w; ++n) {
    S acc = ctx.param(p + d);  // bias
    for (int j = 0; j < d; ++j) acc = madd(ctx.param(p + j), x[j], acc);
    state[n] = acc;
    p += d + 1;
  }

  const Activation act = spec.activation;
  if (spec.kind == NetKind::ResNet) {
    for (int block = 0; block < spec.blocks; ++block) {
      for (int n = 0; n < w; ++n) {
        S acc = ctx.param(p + w);
        for (int j = 0; j < w; ++j) acc = madd(ctx.param(p + j), state[j], acc);
        inner[n] = apply_activation(act, acc);
        p += w + 1;
      }
      for (int n = 0; n < w; ++n) {
        S acc = ctx.param(p + w);
        for (int j = 0; j < w; ++j) acc = madd(ctx.param(p + j), inner[j], acc);
        state[n] = state[n] + apply_activation(act, acc);
        p += w + 1;
      }
    }
  } else {
    for (int layer = 0; layer < 2 * spec.blocks; ++layer) {
      for (int n = 0; n < w; ++n) {
        S acc = ctx.param(p + w);
        for (int j = 0; j < w; ++j) acc = madd(ctx.param(p + j), state[j], acc);
        hidden[n] = apply_activation(act, acc);
        p += w + 1;
      }
      std::swap(state, hidden);
    }
  }

  // Output layer, affine only.
  S out = ctx.param(p + w);
  for (int j = 0; j < w; ++j) out = madd(ctx.param(p + j), state[j], out);
  return out;
}

/// Convenience overload with a throwaway workspace.
template <class S, class Ctx>
S network_forward(const NetworkSpec& spec, const Ctx& ctx, std::span<const S> x) {
  Workspace<S> ws;
  return network_forward(spec, ctx, x, ws);
}

}  // namespace lprobe
