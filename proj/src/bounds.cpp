#include "orddid/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "orddid/error.hpp"

namespace orddid {
namespace {

// Delta_0..Delta_{J-1}, Delta_0 = 0.
std::vector<double> full_delta(std::size_t J, const std::vector<double>& delta_hat) {
  std::vector<double> d;
  if (delta_hat.size() + 1 == J) {
    d.push_back(0.0);
    d.insert(d.end(), delta_hat.begin(), delta_hat.end());
  } else if (delta_hat.size() == J) {
    if (std::fabs(delta_hat[0]) > 1e-12) throw DomainError("bounds: Delta_0 must be 0");
    d = delta_hat;
    d[0] = 0.0;
  } else {
    throw DomainError("bounds: Delta vector length does not match the category count");
  }
  for (double x : d) {
    if (!std::isfinite(x)) throw DomainError("bounds: non-finite Delta");
  }
  return d;
}

void check_probs(const std::vector<double>& p) {
  if (p.size() < 2) throw DomainError("bounds: need at least two categories");
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("bounds: probabilities must lie in [0,1]");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-9) throw DomainError("bounds: probabilities must sum to 1");
}

BenefitBounds finish(double lo, double hi, BenefitEstimand e) {
  BenefitBounds b;
  b.estimand = e;
  b.clamped = lo < 0.0 || lo > 1.0 || hi < 0.0 || hi > 1.0;
  b.lower = std::clamp(lo, 0.0, 1.0);
  b.upper = std::clamp(hi, 0.0, 1.0);
  // Plug-in noise can cross the bounds; report the crossing as clamped.
  if (b.lower > b.upper) {
    b.clamped = true;
    b.upper = b.lower;
  }
  return b;
}

}  // namespace

BenefitBounds eta_bounds(const std::vector<double>& p0, const std::vector<double>& delta_hat) {
  check_probs(p0);
  const auto d = full_delta(p0.size(), delta_hat);
  double lo = -1.0, hi = 2.0;
  for (std::size_t j = 0; j < p0.size(); ++j) {
    lo = std::max(lo, p0[j] + d[j]);
    hi = std::min(hi, 1.0 + d[j]);
  }
  return finish(lo, hi, BenefitEstimand::weak);
}

BenefitBounds tau_bounds(const std::vector<double>& p0, const std::vector<double>& delta_hat) {
  check_probs(p0);
  const auto d = full_delta(p0.size(), delta_hat);
  const std::size_t J = p0.size();
  double lo = 0.0, hi = 2.0;
  for (std::size_t j = 1; j < J; ++j) lo = std::max(lo, d[j]);
  for (std::size_t j = 0; j < J; ++j) {
    const double next = j + 1 < J ? d[j + 1] : 0.0;
    hi = std::min(hi, 1.0 - p0[j] + next);
  }
  return finish(lo, hi, BenefitEstimand::strict);
}

BenefitBounds eta_bounds(const CounterfactualParams& cf, const Cutoffs& cutoffs,
                         const std::vector<double>& delta_hat) {
  return eta_bounds(cell_probs(cf, cutoffs), delta_hat);
}

BenefitBounds tau_bounds(const CounterfactualParams& cf, const Cutoffs& cutoffs,
                         const std::vector<double>& delta_hat) {
  return tau_bounds(cell_probs(cf, cutoffs), delta_hat);
}

}  // namespace orddid
