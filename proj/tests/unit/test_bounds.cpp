#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "orddid/bounds.hpp"
#include "orddid/error.hpp"

using namespace orddid;

namespace {

using Marg = std::array<int, 3>;

Marg random_marginal(std::mt19937_64& rng, int total) {
  std::uniform_int_distribution<int> u(0, total);
  int a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  return {a, b - a, total - b};
}

// Range of P(Y1 >= Y0) and P(Y1 > Y0) over every integer coupling.
struct Range {
  double eta_lo = 2, eta_hi = -1, tau_lo = 2, tau_hi = -1;
  std::vector<double> eta_all, tau_all;
};

Range enumerate(const Marg& m0, const Marg& m1, int total) {
  Range r;
  for (int a = 0; a <= total; ++a)
    for (int b = 0; a + b <= m0[0]; ++b)
      for (int c = 0; c <= m0[1]; ++c)
        for (int d = 0; c + d <= m0[1]; ++d) {
          // Rows: Y0 category; columns: Y1 category.
          const int p00 = a, p01 = b, p02 = m0[0] - a - b;
          const int p10 = c, p11 = d, p12 = m0[1] - c - d;
          const int p20 = m1[0] - p00 - p10, p21 = m1[1] - p01 - p11;
          const int p22 = m0[2] - p20 - p21;
          if (p02 < 0 || p12 < 0 || p20 < 0 || p21 < 0 || p22 < 0) continue;
          if (p02 + p12 + p22 != m1[2]) continue;
          const double eta = double(p00 + p01 + p02 + p11 + p12 + p22) / total;
          const double tau = double(p01 + p02 + p12) / total;
          r.eta_all.push_back(eta);
          r.tau_all.push_back(tau);
          r.eta_lo = std::min(r.eta_lo, eta);
          r.eta_hi = std::max(r.eta_hi, eta);
          r.tau_lo = std::min(r.tau_lo, tau);
          r.tau_hi = std::max(r.tau_hi, tau);
        }
  return r;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("worked examples") {
    const std::vector<double> p{0.25, 0.5, 0.25};
    const auto zero = eta_bounds(p, {0.0, 0.0, 0.0});
    CHECK(zero.lower == doctest::Approx(0.5));
    CHECK(zero.upper == 1.0);
    const auto mixed = eta_bounds(p, {0.0, 0.05, -0.02});
    CHECK(mixed.lower == doctest::Approx(0.55));
    CHECK(mixed.upper == doctest::Approx(0.98));
    // The leading Delta_0 may be omitted.
    const auto short_form = eta_bounds(p, {0.05, -0.02});
    CHECK(short_form.lower == mixed.lower);
    CHECK(short_form.upper == mixed.upper);
    CHECK(mixed.estimand == BenefitEstimand::weak);
  }

  TEST_CASE("argument checks and clamping") {
    const std::vector<double> p{0.25, 0.5, 0.25};
    CHECK_THROWS_AS(eta_bounds(p, {0.1}), DomainError);
    CHECK_THROWS_AS(eta_bounds(p, {0.1, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(tau_bounds({0.5, 0.6, 0.1}, {0.0, 0.0}), DomainError);
    const auto big = eta_bounds(p, {0.0, 0.9, 0.8});
    CHECK(big.clamped);
    CHECK(big.lower == 1.0);
    CHECK(big.upper == 1.0);
  }

  TEST_CASE("parametric overload uses the counterfactual cell probabilities") {
    const auto b = eta_bounds(CellParams{0.0, 1.0}, Cutoffs::pair(0.0, 1.0), {0.0, 0.0});
    CHECK(b.lower == doctest::Approx(0.5));
  }

  TEST_CASE("coupling enumeration stays inside and attains the bounds") {
    std::mt19937_64 rng(2024);
    const int total = 20;
    for (int rep = 0; rep < 60; ++rep) {
      const Marg m0 = random_marginal(rng, total), m1 = random_marginal(rng, total);
      std::vector<double> p0(3), delta(2);
      for (int j = 0; j < 3; ++j) p0[j] = double(m0[j]) / total;
      delta[0] = double(m1[1] + m1[2] - m0[1] - m0[2]) / total;
      delta[1] = double(m1[2] - m0[2]) / total;
      const auto eta = eta_bounds(p0, delta);
      const auto tau = tau_bounds(p0, delta);
      const Range r = enumerate(m0, m1, total);
      for (double e : r.eta_all) {
        CHECK(e >= eta.lower - 1e-12);
        CHECK(e <= eta.upper + 1e-12);
      }
      for (double t : r.tau_all) {
        CHECK(t >= tau.lower - 1e-12);
        CHECK(t <= tau.upper + 1e-12);
      }
      CHECK(r.eta_lo == doctest::Approx(eta.lower).epsilon(1e-12));
      CHECK(r.eta_hi == doctest::Approx(eta.upper).epsilon(1e-12));
      CHECK(r.tau_lo == doctest::Approx(tau.lower).epsilon(1e-12));
      CHECK(r.tau_hi == doctest::Approx(tau.upper).epsilon(1e-12));
    }
  }

  TEST_CASE("bounds increase with every Delta") {
    const std::vector<double> p{0.3, 0.4, 0.3};
    const auto a = eta_bounds(p, {-0.1, -0.05});
    const auto b = eta_bounds(p, {0.0, 0.02});
    CHECK(b.lower >= a.lower);
    CHECK(b.upper >= a.upper);
    const auto c = tau_bounds(p, {-0.1, -0.05});
    const auto d = tau_bounds(p, {0.0, 0.02});
    CHECK(d.lower >= c.lower);
    CHECK(d.upper >= c.upper);
  }
}
