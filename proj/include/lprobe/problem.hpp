#pragma once

// Poisson problems -laplace(u) = f with homogeneous Dirichlet data, each
// defined by its exact solution, the matching forcing term, and the domain.
// The boundary ansatz factor (the term that makes any trial function vanish
// on the boundary) is also defined here, as a jet in one active coordinate.

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "lprobe/errors.hpp"
#include "lprobe/jet.hpp"

namespace lprobe {

enum class DomainKind { UnitBox, UnitBall };
enum class ProblemKind { Box1DCubic, Box1DSine, BoxNDSine, Sphere3DLowReg };

struct Problem {
  ProblemKind kind = ProblemKind::Box1DSine;
  int d = 1;
  DomainKind domain = DomainKind::UnitBox;

  static Problem box1d_cubic() { return {ProblemKind::Box1DCubic, 1, DomainKind::UnitBox}; }
  static Problem box1d_sine() { return {ProblemKind::Box1DSine, 1, DomainKind::UnitBox}; }
  static Problem boxnd_sine(int dim) {
    if (dim < 1) throw ConfigError("boxnd_sine: dimension must be >= 1");
    return {ProblemKind::BoxNDSine, dim, DomainKind::UnitBox};
  }
  static Problem sphere3d() { return {ProblemKind::Sphere3DLowReg, 3, DomainKind::UnitBall}; }

  double domain_volume() const {
    return domain == DomainKind::UnitBox ? 1.0
                                         : 4.0 * std::numbers::pi / 3.0;
  }

  double exact_u(std::span<const double> x) const {
    switch (kind) {
      case ProblemKind::Box1DCubic:
        return x[0] * (x[0] - 1.0) * (2.0 * x[0] + 1.0);
      case ProblemKind::Box1DSine:
        return std::sin(std::numbers::pi * x[0]);
      case ProblemKind::BoxNDSine: {
        double u = 1.0;
        for (double xi : x) u *= std::sin(std::numbers::pi * xi);
        return u;
      }
      case ProblemKind::Sphere3DLowReg:
        return std::sin(0.5 * std::numbers::pi * (1.0 - radius(x)));
    }
    return 0.0;
  }

  double forcing(std::span<const double> x) const {
    const double pi = std::numbers::pi;
    switch (kind) {
      case ProblemKind::Box1DCubic:
        return -12.0 * x[0] + 2.0;
      case ProblemKind::Box1DSine:
        return pi * pi * std::sin(pi * x[0]);
      case ProblemKind::BoxNDSine: {
        double u = 1.0;
        for (double xi : x) u *= std::sin(pi * xi);
        return d * pi * pi * u;
      }
      case ProblemKind::Sphere3DLowReg: {
        // Singular (1/|x|) at the origin; quadrature excludes that point.
        const double r = radius(x);
        const double arg = 0.5 * pi * (1.0 - r);
        return 0.25 * pi * pi * std::sin(arg) + pi / r * std::cos(arg);
      }
    }
    return 0.0;
  }

  static double radius(std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
  }
};

/// Boundary-vanishing ansatz factor as a jet in the active coordinate:
/// prod_i (x_i - 1) x_i on the unit box, (|x| - 1) on the unit ball.
inline Jet2 boundary_factor(DomainKind domain, std::span<const double> x,
                            int active) {
  if (domain == DomainKind::UnitBox) {
    double rest = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (static_cast<int>(i) != active) rest *= x[i] * x[i] - x[i];
    const double xa = x[active];
    return {rest * (xa * xa - xa), rest * (2.0 * xa - 1.0), rest * 2.0};
  }
  const double r = Problem::radius(x);
  const double xa = x[active];
  return {r - 1.0, xa / r, (r * r - xa * xa) / (r * r * r)};
}

inline std::string problem_key(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Box1DCubic: return "box1d_cubic";
    case ProblemKind::Box1DSine: return "box1d_sine";
    case ProblemKind::BoxNDSine: return "boxnd_sine";
    case ProblemKind::Sphere3DLowReg: return "sphere3d";
  }
  return "?";
}

inline Problem problem_from_key(const std::string& key, int dim) {
  if (key == "box1d_cubic") return Problem::box1d_cubic();
  if (key == "box1d_sine") return Problem::box1d_sine();
  if (key == "boxnd_sine") return Problem::boxnd_sine(dim);
  if (key == "sphere3d") return Problem::sphere3d();
  throw ConfigError("unknown problem key: " + key);
}

}  // namespace lprobe
