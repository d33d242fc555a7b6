#include "orddid/normal.hpp"

#include <cmath>
#include <string>

#include "orddid/error.hpp"

namespace orddid {

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("norm_cdf: non-finite argument " + std::to_string(x));
  }
  return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_sf(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("norm_sf: non-finite argument " + std::to_string(x));
  }
  return 0.5 * std::erfc(x / kSqrt2);
}

// Wichura (1988), Algorithm AS 241, PPND16.
double norm_quantile(double v) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError("norm_quantile: probability must lie in (0,1), got " +
                      std::to_string(v));
  }
  const double q = v - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? v : 1.0 - v;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

ClampedQuantile norm_quantile_clamped(double v) {
  if (std::isnan(v)) throw DomainError("norm_quantile_clamped: NaN probability");
  bool saturated = false;
  if (v < kQuantileFloor) {
    v = kQuantileFloor;
    saturated = true;
  } else if (v > 1.0 - kQuantileFloor) {
    v = 1.0 - kQuantileFloor;
    saturated = true;
  }
  return {norm_quantile(v), saturated};
}

double erf_inv(double y) {
  if (!(y > -1.0 && y < 1.0)) {
    throw DomainError("erf_inv: argument must lie in (-1,1), got " + std::to_string(y));
  }
  if (y == 0.0) return 0.0;
  const double ay = std::fabs(y);
  // Starting point: Giles' single-precision approximation.
  double w = -std::log((1.0 - ay) * (1.0 + ay));
  double x;
  if (w < 5.0) {
    w -= 2.5;
    double p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
    x = p * ay;
  } else {
    w = std::sqrt(w) - 3.0;
    double p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
    x = p * ay;
  }
  // Newton refinement. In the tail work with erfc to keep the residual exact.
  const double tail = 1.0 - ay;
  for (int it = 0; it < 3; ++it) {
    const double deriv = 2.0 / kSqrtPi * std::exp(-x * x);
    const double resid = ay > 0.5 ? -(std::erfc(x) - tail) : std::erf(x) - ay;
    x -= resid / deriv;
  }
  return y < 0.0 ? -x : x;
}

}  // namespace orddid
