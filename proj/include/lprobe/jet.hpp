#pragma once

// Second-order directional jets. A Jet2 carries a value together with the
// first and second derivative along one active input coordinate, so a single
// forward sweep of the network yields u, du/dx_i, d2u/dx_i2 for that
// coordinate. Truncated Taylor arithmetic:
//   (f*g)'' = f''g + 2f'g' + fg''.

#include <cmath>

#include "lprobe/errors.hpp"

namespace lprobe {

struct Jet2 {
  double val = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet2() = default;
  constexpr Jet2(double v) : val(v) {}  // constant lift, d1 = d2 = 0
  constexpr Jet2(double v, double first, double second)
      : val(v), d1(first), d2(second) {}

  /// Lift of the active coordinate: (x, 1, 0).
  static constexpr Jet2 active(double x) { return {x, 1.0, 0.0}; }
};

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.val + b.val, a.d1 + b.d1, a.d2 + b.d2};
}
constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.val - b.val, a.d1 - b.d1, a.d2 - b.d2};
}
constexpr Jet2 operator-(const Jet2& a) { return {-a.val, -a.d1, -a.d2}; }
constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.val * b.val, a.d1 * b.val + a.val * b.d1,
          a.d2 * b.val + 2.0 * a.d1 * b.d1 + a.val * b.d2};
}
constexpr Jet2 operator*(double c, const Jet2& a) {
  return {c * a.val, c * a.d1, c * a.d2};
}
constexpr Jet2 operator*(const Jet2& a, double c) { return c * a; }

/// a*b + c in one call; the workhorse of every affine layer.
constexpr Jet2 madd(const Jet2& a, const Jet2& b, const Jet2& c) {
  return {a.val * b.val + c.val, a.d1 * b.val + a.val * b.d1 + c.d1,
          a.d2 * b.val + 2.0 * a.d1 * b.d1 + a.val * b.d2 + c.d2};
}

constexpr Jet2 pick_val(const Jet2& a) { return {a.val}; }
constexpr Jet2 pick_d1(const Jet2& a) { return {a.d1}; }
constexpr Jet2 pick_d2(const Jet2& a) { return {a.d2}; }

// ---------------------------------------------------------------------------
// Activations. The reverse sweep over jet components needs derivatives up to
// third order, so each activation reports f, f', f'', f''' at a point.

enum class Activation { Swish, Sigmoid };

struct ActEval {
  double f = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Derivatives of swish(z) = z*sigmoid(z) given s = sigmoid(z).
inline ActEval swish_from_sigmoid(double z, double s) {
  const double s1 = s * (1.0 - s);
  const double s2 = s1 * (1.0 - 2.0 * s);
  const double s3 = s2 * (1.0 - 2.0 * s) - 2.0 * s1 * s1;
  return {z * s, s + z * s1, 2.0 * s1 + z * s2, 3.0 * s2 + z * s3};
}

/// Derivatives of sigmoid(z) given its own value s.
inline ActEval sigmoid_from_sigmoid(double /*z*/, double s) {
  const double s1 = s * (1.0 - s);
  const double s2 = s1 * (1.0 - 2.0 * s);
  const double s3 = s2 * (1.0 - 2.0 * s) - 2.0 * s1 * s1;
  return {s, s1, s2, s3};
}

inline ActEval activation_eval(Activation act, double z) {
  const double s = sigmoid(z);
  return act == Activation::Swish ? swish_from_sigmoid(z, s)
                                  : sigmoid_from_sigmoid(z, s);
}

inline double swish(double z) { return z * sigmoid(z); }

/// Chain rule for a scalar function through a jet:
///   h = f(v), h' = f'(v) v', h'' = f''(v) v'^2 + f'(v) v''.
inline Jet2 apply_eval(const ActEval& e, const Jet2& z) {
  return {e.f, e.f1 * z.d1, e.f2 * z.d1 * z.d1 + e.f1 * z.d2};
}

inline Jet2 apply_activation(Activation act, const Jet2& z) {
  return apply_eval(activation_eval(act, z.val), z);
}

inline Jet2 swish(const Jet2& z) { return apply_activation(Activation::Swish, z); }

}  // namespace lprobe
