#include <doctest.h>

#include <cmath>

#include "orddid/error.hpp"
#include "orddid/optimize.hpp"

using namespace orddid;

TEST_SUITE("optimize") {
  TEST_CASE("Rosenbrock with analytic gradient") {
    Objective f;
    f.value = [](std::span<const double> x) {
      return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    f.gradient = [](std::span<const double> x, std::span<double> g) {
      g[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
      g[1] = 200.0 * (x[1] - x[0] * x[0]);
    };
    const auto r = minimize(f, {-1.2, 1.0}, MinimizeOptions{1e-10, 1e-14, 1e-6, 2000});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("quadratic with numeric gradient") {
    Objective f;
    f.value = [](std::span<const double> x) {
      return std::pow(x[0] - 3.0, 2) + 2.0 * std::pow(x[1] + 1.0, 2) + x[0] * x[1];
    };
    // Minimizer of the quadratic solves [2 1; 1 4] x = [6 - 0; -4].
    const auto r = minimize(f, {0.0, 0.0}, 1e-8);
    const double det = 2.0 * 4.0 - 1.0;
    CHECK(r.x[0] == doctest::Approx((6.0 * 4.0 - (-4.0) * 1.0) / det).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx((2.0 * -4.0 - 6.0) / det).epsilon(1e-6));
  }

  TEST_CASE("guards") {
    Objective f;
    f.value = [](std::span<const double> x) { return x[0] * x[0]; };
    CHECK_THROWS_AS(minimize(f, {1.0}, 0.0), DomainError);
    Objective bad;
    bad.value = [](std::span<const double>) { return NAN; };
    CHECK_THROWS_AS(minimize(bad, {1.0}), ConvergenceError);
    Objective unbounded;
    unbounded.value = [](std::span<const double> x) { return -x[0]; };
    try {
      minimize(unbounded, {0.0}, MinimizeOptions{1e-9, 1e-12, 1e-6, 20});
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.best_point().size() == 1);
      CHECK(e.iterations() > 0);
    }
  }

  TEST_CASE("numeric gradient") {
    auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(x[1]); };
    const std::vector<double> x{0.3, -0.7};
    const auto g = numeric_gradient(f, x);
    CHECK(g[0] == doctest::Approx(std::cos(0.3) * std::exp(-0.7)).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(std::sin(0.3) * std::exp(-0.7)).epsilon(1e-8));
  }
}
