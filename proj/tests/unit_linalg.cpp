#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lprobe/linalg.hpp"
#include "lprobe/loss.hpp"
#include "lprobe/quadrature.hpp"
#include "lprobe/rng.hpp"

using namespace lprobe;
using Catch::Approx;

namespace {

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = rng.gaussian();
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  return m;
}

}  // namespace

TEST_CASE("hessian_fd recovers a quadratic's matrix exactly") {
  // loss = 0.5 theta^T A theta with A = [[8,4],[4,8]], grad = A theta
  const GradFn grad = [](std::span<const double> t) {
    return std::vector<double>{8.0 * t[0] + 4.0 * t[1], 4.0 * t[0] + 8.0 * t[1]};
  };
  const std::vector<double> theta = {0.3, -1.2};
  const Matrix h = hessian_fd(grad, theta);
  CHECK(h.at(0, 0) == Approx(8.0).margin(1e-8));
  CHECK(h.at(0, 1) == Approx(4.0).margin(1e-8));
  CHECK(h.at(1, 1) == Approx(8.0).margin(1e-8));
  CHECK(h.at(0, 1) == h.at(1, 0));  // symmetric by construction
}

TEST_CASE("toy Hessians under the quadrature losses") {
  const Problem problem = Problem::box1d_cubic();
  const NetworkSpec spec{NetKind::Linear1DToy, 1, 0, 0, Activation::Swish};
  const QuadratureSet quad = simpson_1d(201);
  const std::vector<double> minimizer = {1.0, 2.0};

  SECTION("DGM Hessian is [[8,4],[4,8]]") {
    LossGradient eval(problem, spec, LossKind::DGM);
    const GradFn grad = [&](std::span<const double> t) {
      return eval.eval(t, quad).grad;
    };
    const Matrix h = hessian_fd(grad, minimizer);
    CHECK(h.at(0, 0) == Approx(8.0).margin(1e-3));
    CHECK(h.at(0, 1) == Approx(4.0).margin(1e-3));
    CHECK(h.at(1, 0) == Approx(4.0).margin(1e-3));
    CHECK(h.at(1, 1) == Approx(8.0).margin(1e-3));
    const auto lambda = sym_eigenvalues(h);
    CHECK(lambda[0] == Approx(12.0).margin(1e-3));
    CHECK(lambda[1] == Approx(4.0).margin(1e-3));
  }
  SECTION("DRM eigenvalues are (0.428, 0.039)") {
    LossGradient eval(problem, spec, LossKind::DRM);
    const GradFn grad = [&](std::span<const double> t) {
      return eval.eval(t, quad).grad;
    };
    const Matrix h = hessian_fd(grad, minimizer);
    const auto lambda = sym_eigenvalues(h);
    CHECK(lambda[0] == Approx(0.428).margin(1e-3));
    CHECK(lambda[1] == Approx(0.039).margin(1e-3));
  }
}

TEST_CASE("hessian_fd reports the offending coordinate on overflow") {
  const GradFn grad = [](std::span<const double> t) {
    return std::vector<double>{t[0] > 0.5 ? std::nan("") : t[0], t[1]};
  };
  const std::vector<double> theta = {0.5, 0.0};
  try {
    hessian_fd(grad, theta);
    FAIL("expected NumericalError");
  } catch (const NumericalError& err) {
    CHECK(std::string(err.what()).find("(0, 0)") != std::string::npos);
  }
}

TEST_CASE("jacobi eigenvalues") {
  SECTION("diagonal matrices are exact after sorting") {
    Matrix m(3);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = 10.0;
    m.at(2, 2) = -2.0;
    const auto lambda = sym_eigenvalues(m);
    CHECK(lambda == std::vector<double>{10.0, 1.0, -2.0});
  }
  SECTION("2x2 known spectrum") {
    Matrix m(2);
    m.at(0, 0) = 8.0;
    m.at(0, 1) = 4.0;
    m.at(1, 0) = 4.0;
    m.at(1, 1) = 8.0;
    const auto lambda = sym_eigenvalues(m);
    CHECK(lambda[0] == Approx(12.0).epsilon(1e-12));
    CHECK(lambda[1] == Approx(4.0).epsilon(1e-12));
  }
  SECTION("random 20x20 reconstruction") {
    const Matrix m = random_symmetric(20, 99);
    Matrix q;
    const auto lambda = sym_eigenvalues(m, &q);
    // || Q diag(lambda) Q^T - M ||_F
    double err = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j) {
        double r = 0.0;
        for (std::size_t k = 0; k < 20; ++k)
          r += q.at(i, k) * lambda[k] * q.at(j, k);
        err += (r - m.at(i, j)) * (r - m.at(i, j));
      }
    CHECK(std::sqrt(err) < 1e-8);
    // descending order
    for (std::size_t k = 1; k < lambda.size(); ++k)
      CHECK(lambda[k - 1] >= lambda[k]);
  }
  SECTION("trace identity") {
    const Matrix m = random_symmetric(17, 123);
    const auto lambda = sym_eigenvalues(m);
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < 17; ++i) trace += m.at(i, i);
    for (double v : lambda) sum += v;
    CHECK(sum == Approx(trace).margin(1e-8 * std::max(1.0, m.frobenius())));
  }
  SECTION("non-symmetric input is rejected") {
    Matrix m(2);
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 2.0;
    CHECK_THROWS_AS(sym_eigenvalues(m), UsageError);
  }
}
