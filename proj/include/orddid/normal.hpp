#pragma once

// Standard normal distribution functions and the inverse error function.
// All functions are pure and reentrant.

namespace orddid {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Probabilities are clamped into [kQuantileFloor, 1 - kQuantileFloor] by
/// norm_quantile_clamped before inversion.
inline constexpr double kQuantileFloor = 1e-9;

double norm_pdf(double x);

/// Phi(x). Throws DomainError for non-finite x.
double norm_cdf(double x);

/// 1 - Phi(x), computed without cancellation in the upper tail.
double norm_sf(double x);

/// Phi^{-1}(v) for v in (0, 1) (Wichura AS241, ~1e-16 relative accuracy).
/// Throws DomainError outside the open unit interval.
double norm_quantile(double v);

struct ClampedQuantile {
  double value;
  bool saturated;  // true when v was moved into the clamping window
};

ClampedQuantile norm_quantile_clamped(double v);

/// erf^{-1}(y) for y in (-1, 1), refined by Newton steps on std::erf/erfc.
/// Independent of norm_quantile so the two can check each other.
double erf_inv(double y);

}  // namespace orddid
