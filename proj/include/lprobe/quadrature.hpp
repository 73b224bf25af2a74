#pragma once

// Frozen evaluation-point sets. A QuadratureSet never resamples once built:
// landscape probes share one set across every loss evaluation so that the
// measured variation comes from the landscape, not from sampling noise.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/rng.hpp"

namespace lprobe {

enum class QuadScheme { SimpsonComposite, MonteCarlo };

struct QuadratureSet {
  int dim = 1;
  QuadScheme scheme = QuadScheme::SimpsonComposite;
  std::vector<double> points;   // flattened, size() * dim
  std::vector<double> weights;  // one per point

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * dim, static_cast<std::size_t>(dim)};
  }
};

/// Composite Simpson rule on [0,1]. `n` is the requested node count; an even
/// request is bumped to n+1 nodes since the rule needs an even interval
/// count. Exact for polynomials of degree <= 3.
inline QuadratureSet simpson_1d(int n) {
  if (n < 3) throw ConfigError("simpson_1d: need at least 3 nodes");
  if (n % 2 == 0) ++n;
  QuadratureSet quad;
  quad.dim = 1;
  quad.scheme = QuadScheme::SimpsonComposite;
  quad.points.resize(n);
  quad.weights.resize(n);
  const double h = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    quad.points[i] = i * h;
    const double coeff = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    quad.weights[i] = coeff * h / 3.0;
  }
  return quad;
}

/// N iid uniform points over the domain, deterministic per seed. Ball points
/// come from rejection sampling inside the enclosing cube; samples closer
/// than 1e-12 to the origin are rejected because the sphere problem's
/// forcing is singular there. Every weight is volume/N.
inline QuadratureSet monte_carlo(DomainKind domain, int dim, int n,
                                 std::uint64_t seed) {
  if (n < 1) throw ConfigError("monte_carlo: need at least 1 sample");
  if (dim < 1) throw ConfigError("monte_carlo: dimension must be >= 1");
  QuadratureSet quad;
  quad.dim = dim;
  quad.scheme = QuadScheme::MonteCarlo;
  quad.points.reserve(static_cast<std::size_t>(n) * dim);
  Xoshiro256pp rng(seed);
  std::vector<double> x(dim);
  for (int k = 0; k < n; ++k) {
    if (domain == DomainKind::UnitBox) {
      for (int i = 0; i < dim; ++i) x[i] = rng.uniform01();
    } else {
      for (;;) {
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) {
          x[i] = rng.uniform(-1.0, 1.0);
          r2 += x[i] * x[i];
        }
        if (r2 < 1.0 && r2 > 1e-24) break;
      }
    }
    quad.points.insert(quad.points.end(), x.begin(), x.end());
  }
  const double volume = domain == DomainKind::UnitBox
                            ? 1.0
                            : 4.0 * std::numbers::pi / 3.0;
  quad.weights.assign(n, volume / n);
  return quad;
}

inline QuadratureSet monte_carlo(const Problem& problem, int n,
                                 std::uint64_t seed) {
  return monte_carlo(problem.domain, problem.d, n, seed);
}

// Parsing of quadrature spec strings: "simpson:N" or "mc:N:seed".
struct QuadSpec {
  QuadScheme scheme = QuadScheme::SimpsonComposite;
  int n = 201;
  std::uint64_t seed = 0;

  std::string to_string() const {
    if (scheme == QuadScheme::SimpsonComposite)
      return "simpson:" + std::to_string(n);
    return "mc:" + std::to_string(n) + ":" + std::to_string(seed);
  }
};

inline QuadSpec parse_quad_spec(const std::string& text) {
  QuadSpec spec;
  const auto first = text.find(':');
  const std::string head = text.substr(0, first);
  try {
    if (head == "simpson") {
      if (first == std::string::npos) throw std::invalid_argument("n");
      spec.scheme = QuadScheme::SimpsonComposite;
      spec.n = std::stoi(text.substr(first + 1));
    } else if (head == "mc") {
      if (first == std::string::npos) throw std::invalid_argument("n");
      const auto second = text.find(':', first + 1);
      if (second == std::string::npos) throw std::invalid_argument("seed");
      spec.scheme = QuadScheme::MonteCarlo;
      spec.n = std::stoi(text.substr(first + 1, second - first - 1));
      spec.seed = std::stoull(text.substr(second + 1));
    } else {
      throw std::invalid_argument(head);
    }
  } catch (const std::exception&) {
    throw ConfigError("bad quadrature spec '" + text +
                      "', expected simpson:N or mc:N:seed");
  }
  return spec;
}

inline QuadratureSet build_quadrature(const QuadSpec& spec,
                                      const Problem& problem) {
  if (spec.scheme == QuadScheme::SimpsonComposite) {
    if (problem.d != 1)
      throw ConfigError("simpson quadrature is one-dimensional only");
    return simpson_1d(spec.n);
  }
  return monte_carlo(problem, spec.n, spec.seed);
}

}  // namespace lprobe
