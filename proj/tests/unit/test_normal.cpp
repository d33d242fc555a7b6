#include <doctest.h>

#include <cmath>

#include "orddid/error.hpp"
#include "orddid/normal.hpp"

using namespace orddid;

// Reference values from 40-digit arithmetic.
TEST_SUITE("normal") {
  TEST_CASE("cdf and survival match high-precision references") {
    struct Ref { double x, cdf, sf; };
    const Ref refs[] = {
        {-8.0, 6.2209605742717841235e-16, 0.9999999999999993779},
        {-3.0, 0.0013498980316300945267, 0.99865010196836990547},
        {-1.0, 0.15865525393145705141, 0.84134474606854294859},
        {0.0, 0.5, 0.5},
        {0.5, 0.69146246127401310364, 0.30853753872598689636},
        {1.96, 0.97500210485177956379, 0.024997895148220436213},
        {5.0, 0.99999971334842812081, 2.8665157187919391167e-7},
        {10.0, 1.0, 7.6198530241605260704e-24},
    };
    for (const auto& r : refs) {
      CHECK(norm_cdf(r.x) == doctest::Approx(r.cdf).epsilon(1e-14));
      CHECK(norm_sf(r.x) == doctest::Approx(r.sf).epsilon(1e-13));
    }
  }

  TEST_CASE("quantile matches references and inverts the cdf") {
    struct Ref { double p, q; };
    const Ref refs[] = {
        {1e-10, -6.3613409024040561991}, {0.001, -3.0902323061678135354},
        {0.025, -1.9599639845400542118}, {0.3, -0.52440051270804081597},
        {0.5, 0.0},                      {0.975, 1.9599639845400538556},
        {0.999999, 4.7534243088170877657},
    };
    for (const auto& r : refs) CHECK(norm_quantile(r.p) == doctest::Approx(r.q).epsilon(1e-14));
    for (double x = -7.0; x <= 4.0; x += 0.37) {
      CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
    }
  }

  TEST_CASE("quantile rejects the closed endpoints") {
    CHECK_THROWS_AS(norm_quantile(0.0), DomainError);
    CHECK_THROWS_AS(norm_quantile(1.0), DomainError);
    CHECK_THROWS_AS(norm_quantile(-0.1), DomainError);
    CHECK_THROWS_AS(norm_cdf(NAN), DomainError);
  }

  TEST_CASE("clamped quantile flags saturation") {
    const auto lo = norm_quantile_clamped(0.0);
    CHECK(lo.saturated);
    CHECK(lo.value == doctest::Approx(norm_quantile(kQuantileFloor)));
    const auto hi = norm_quantile_clamped(1.0);
    CHECK(hi.saturated);
    CHECK(hi.value == doctest::Approx(-lo.value));
    const auto mid = norm_quantile_clamped(0.4);
    CHECK_FALSE(mid.saturated);
  }

  TEST_CASE("erf_inv matches references") {
    struct Ref { double y, x; };
    const Ref refs[] = {
        {-0.999999, -3.4589107372754987775}, {-0.5, -0.47693627620446987338},
        {0.1, 0.088855990494257691974},      {0.9, 1.1630871536766741628},
        {0.99999999, 4.0522372432687633554},
    };
    for (const auto& r : refs) CHECK(erf_inv(r.y) == doctest::Approx(r.x).epsilon(1e-13));
    CHECK(erf_inv(0.0) == 0.0);
    for (double x = -3.0; x <= 3.0; x += 0.25) {
      CHECK(erf_inv(std::erf(x)) == doctest::Approx(x).epsilon(1e-12));
    }
  }
}
