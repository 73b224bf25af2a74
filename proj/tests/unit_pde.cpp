#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "lprobe/loss.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/quadrature.hpp"
#include "test_support.hpp"

using namespace lprobe;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
const NetworkSpec kToySpec{NetKind::Linear1DToy, 1, 0, 0, Activation::Swish};

double integrate(const QuadratureSet& quad,
                 const std::function<double(std::span<const double>)>& f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k)
    sum += quad.weights[k] * f(quad.point(k));
  return sum;
}
}  // namespace

TEST_CASE("composite Simpson rule") {
  SECTION("node handling") {
    CHECK(simpson_1d(201).size() == 201);
    CHECK(simpson_1d(200).size() == 201);  // even request bumped
    CHECK_THROWS_AS(simpson_1d(2), ConfigError);
  }
  SECTION("weights sum to 1") {
    const QuadratureSet quad = simpson_1d(201);
    double sum = 0.0;
    for (double w : quad.weights) sum += w;
    CHECK(sum == Approx(1.0).margin(1e-12));
  }
  SECTION("exact on cubics") {
    const QuadratureSet quad = simpson_1d(11);
    CHECK(integrate(quad, [](auto x) { return x[0] * x[0]; }) ==
          Approx(1.0 / 3.0).margin(1e-14));
    CHECK(integrate(quad, [](auto x) { return -12.0 * x[0] + 2.0; }) ==
          Approx(-4.0).margin(1e-14));
  }
  SECTION("sin integral at 201 nodes") {
    const QuadratureSet quad = simpson_1d(201);
    CHECK(integrate(quad, [](auto x) { return std::sin(kPi * x[0]); }) ==
          Approx(2.0 / kPi).margin(1e-8));
  }
}

TEST_CASE("Monte Carlo quadrature") {
  SECTION("weights sum to the domain volume") {
    const QuadratureSet box = monte_carlo(DomainKind::UnitBox, 2, 1024, 3);
    double sum = 0.0;
    for (double w : box.weights) sum += w;
    CHECK(sum == 1.0);  // power-of-two sample count: exact

    const QuadratureSet ball = monte_carlo(DomainKind::UnitBall, 3, 500, 3);
    sum = 0.0;
    for (double w : ball.weights) sum += w;
    CHECK(sum == Approx(4.0 * kPi / 3.0).margin(1e-12));
  }
  SECTION("deterministic per seed") {
    const QuadratureSet a = monte_carlo(DomainKind::UnitBall, 3, 200, 17);
    const QuadratureSet b = monte_carlo(DomainKind::UnitBall, 3, 200, 17);
    const QuadratureSet c = monte_carlo(DomainKind::UnitBall, 3, 200, 18);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
  }
  SECTION("ball samples stay inside and off the origin") {
    const QuadratureSet ball = monte_carlo(DomainKind::UnitBall, 3, 2000, 5);
    for (std::size_t k = 0; k < ball.size(); ++k) {
      const double r = Problem::radius(ball.point(k));
      CHECK(r < 1.0);
      CHECK(r > 1e-12);
    }
  }
  SECTION("|x|^2 moment over the ball within 3 sigma") {
    const int n = 20000;
    const QuadratureSet ball = monte_carlo(DomainKind::UnitBall, 3, n, 11);
    // exact: int_ball |x|^2 dx = 4 pi / 5
    const double exact = 4.0 * kPi / 5.0;
    double mean = 0.0, sq = 0.0;
    const double volume = 4.0 * kPi / 3.0;
    for (std::size_t k = 0; k < ball.size(); ++k) {
      double r2 = 0.0;
      for (double xi : ball.point(k)) r2 += xi * xi;
      mean += r2;
      sq += r2 * r2;
    }
    mean /= n;
    const double var = sq / n - mean * mean;
    const double estimate = volume * mean;
    const double sigma = volume * std::sqrt(var / n);
    CHECK(std::abs(estimate - exact) <= 3.0 * sigma);
  }
}

TEST_CASE("forcing terms are consistent with the exact solutions") {
  // Independent analytic Laplacians, away from the sphere problem's origin.
  Xoshiro256pp rng(21);
  SECTION("box1d_cubic") {
    const Problem p = Problem::box1d_cubic();
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform01();
      const double lap = 12.0 * x - 2.0;  // u'' of 2x^3 - x^2 - x
      CHECK(-lap == Approx(p.forcing({&x, 1})).margin(1e-10));
    }
  }
  SECTION("boxnd_sine, d = 1 and d = 3") {
    for (int d : {1, 3}) {
      const Problem p = Problem::boxnd_sine(d);
      for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(d);
        for (double& xi : x) xi = rng.uniform01();
        double prod = 1.0;
        for (double xi : x) prod *= std::sin(kPi * xi);
        const double lap = -d * kPi * kPi * prod;
        CHECK(-lap == Approx(p.forcing(x)).margin(1e-10));
      }
    }
  }
  SECTION("sphere3d (radial formula)") {
    const Problem p = Problem::sphere3d();
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(3);
      for (double& xi : x) xi = rng.uniform(-0.5, 0.5);
      const double r = Problem::radius(x);
      if (r < 0.05 || r > 0.999) continue;
      // lap u = u_rr + (2/r) u_r for radial u = sin(pi/2 (1 - r))
      const double arg = 0.5 * kPi * (1.0 - r);
      const double ur = -0.5 * kPi * std::cos(arg);
      const double urr = -0.25 * kPi * kPi * std::sin(arg);
      const double lap = urr + 2.0 / r * ur;
      CHECK(-lap == Approx(p.forcing(x)).margin(1e-10));
    }
  }
}

TEST_CASE("toy losses match their closed forms at 100 random points") {
  const Problem problem = Problem::box1d_cubic();
  const QuadratureSet quad = simpson_1d(1001);
  Xoshiro256pp rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const double t0 = rng.uniform(-1.0, 3.0);
    const double t1 = rng.uniform(0.0, 4.0);
    const std::vector<double> theta = {t0, t1};
    CHECK(dgm_loss(problem, kToySpec, theta, quad) ==
          Approx(test_support::toy_dgm_closed(t0, t1)).margin(1e-10));
    CHECK(drm_loss(problem, kToySpec, theta, quad) ==
          Approx(test_support::toy_drm_closed(t0, t1)).margin(1e-10));
  }
}

TEST_CASE("toy loss values at notable points") {
  const Problem problem = Problem::box1d_cubic();
  const QuadratureSet quad = simpson_1d(1001);
  const std::vector<double> minimizer = {1.0, 2.0};
  CHECK(dgm_loss(problem, kToySpec, minimizer, quad) ==
        Approx(0.0).margin(1e-12));
  CHECK(drm_loss(problem, kToySpec, minimizer, quad) ==
        Approx(-23.0 / 30.0).margin(1e-10));
  // J_G(1,3) = 4 per the closed form
  const std::vector<double> off = {1.0, 3.0};
  CHECK(dgm_loss(problem, kToySpec, off, quad) == Approx(4.0).margin(1e-10));
}

TEST_CASE("DGM loss is non-negative; DRM minimum sits at the exact solution") {
  const Problem problem = Problem::box1d_cubic();
  const QuadratureSet quad = simpson_1d(201);
  Xoshiro256pp rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> theta = {rng.uniform(-5.0, 5.0),
                                       rng.uniform(-5.0, 5.0)};
    CHECK(dgm_loss(problem, kToySpec, theta, quad) >= 0.0);
  }
  // grid search over [-1,3] x [0,4]
  const double reference =
      drm_loss(problem, kToySpec, std::vector<double>{1.0, 2.0}, quad);
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const std::vector<double> theta = {-1.0 + 0.1 * i, 0.1 * j};
      CHECK(drm_loss(problem, kToySpec, theta, quad) >= reference - 1e-12);
    }
}

TEST_CASE("loss values for the exact sine trial") {
  const Problem problem = Problem::box1d_sine();
  const QuadratureSet quad = simpson_1d(201);
  const TrialFn exact_trial = [](std::span<const double> x) {
    SpatialDerivs s;
    s.u = std::sin(kPi * x[0]);
    s.grad_x = {kPi * std::cos(kPi * x[0])};
    s.laplacian = -kPi * kPi * std::sin(kPi * x[0]);
    return s;
  };
  CHECK(loss_value_of_trial(problem, quad, LossKind::DGM, exact_trial) ==
        Approx(0.0).margin(1e-10));
  CHECK(loss_value_of_trial(problem, quad, LossKind::DRM, exact_trial) ==
        Approx(-kPi * kPi / 4.0).margin(1e-6));
}

TEST_CASE("zero trial function has zero DRM loss") {
  const Problem problem = Problem::box1d_sine();
  const NetworkSpec spec{NetKind::ResNet, 1, 4, 1, Activation::Swish};
  const std::vector<double> theta(param_count(spec), 0.0);
  const QuadratureSet quad = simpson_1d(51);
  CHECK(drm_loss(problem, spec, theta, quad) == 0.0);
}

TEST_CASE("Monte Carlo loss approaches the Simpson loss in 1D") {
  const Problem problem = Problem::box1d_sine();
  const NetworkSpec spec{NetKind::ResNet, 1, 3, 1, Activation::Swish};
  const ParamVector theta = init_xavier(spec, 2);
  const QuadratureSet fine = simpson_1d(2001);
  const double reference =
      dgm_loss(problem, spec, theta.values, fine);

  const int n = 4000;
  const QuadratureSet mc = monte_carlo(problem, n, 77);
  const double estimate = dgm_loss(problem, spec, theta.values, mc);
  // sample std of the integrand from the MC set itself
  double mean = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < mc.size(); ++k) {
    const auto x = mc.point(k);
    const SpatialDerivs s = eval_with_spatial_derivs(problem, spec, theta.values, x);
    const double r = -s.laplacian - problem.forcing(x);
    const double g = r * r;
    mean += g;
    sq += g * g;
  }
  mean /= n;
  const double std_dev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(estimate - reference) <= 3.0 * std_dev / std::sqrt(double(n)));
}

TEST_CASE("relative L2 error") {
  const Problem problem = Problem::box1d_cubic();
  const QuadratureSet quad = simpson_1d(501);
  SECTION("exact trial gives zero") {
    CHECK(relative_l2_error(problem, kToySpec, std::vector<double>{1.0, 2.0},
                            quad) == Approx(0.0).margin(1e-14));
  }
  SECTION("doubled trial gives one") {
    CHECK(relative_l2_error(problem, kToySpec, std::vector<double>{2.0, 4.0},
                            quad) == Approx(1.0).epsilon(1e-10));
  }
  SECTION("empty quadrature means zero norm: usage error") {
    QuadratureSet empty;
    empty.dim = 1;
    CHECK_THROWS_AS(relative_l2_error(problem, kToySpec,
                                      std::vector<double>{1.0, 2.0}, empty),
                    UsageError);
  }
}

TEST_CASE("quadrature spec strings") {
  CHECK(parse_quad_spec("simpson:200").n == 200);
  CHECK(parse_quad_spec("mc:1000:7").seed == 7);
  CHECK(parse_quad_spec("mc:1000:7").to_string() == "mc:1000:7");
  CHECK_THROWS_AS(parse_quad_spec("gauss:5"), ConfigError);
  CHECK_THROWS_AS(parse_quad_spec("mc:1000"), ConfigError);
  const Problem p3 = Problem::boxnd_sine(3);
  CHECK_THROWS_AS(build_quadrature(parse_quad_spec("simpson:9"), p3), ConfigError);
}
