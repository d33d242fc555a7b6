#pragma once

#include <vector>

#include "orddid/identification.hpp"
#include "orddid/ordered_probit.hpp"

namespace orddid {

enum class BenefitEstimand { weak, strict };  // eta: Y(1) >= Y(0); tau: Y(1) > Y(0)

struct BenefitBounds {
  double lower = 0.0;
  double upper = 1.0;
  BenefitEstimand estimand = BenefitEstimand::weak;
  bool clamped = false;  // a raw bound fell outside [0,1]
};

/// Bounds on P(Y(1) >= Y(0) | D = 1). `delta_hat` is either (Delta_1..Delta_{J-1})
/// or the same with a leading Delta_0 = 0.
BenefitBounds eta_bounds(const CounterfactualParams& counterfactual, const Cutoffs& cutoffs,
                         const std::vector<double>& delta_hat);
BenefitBounds eta_bounds(const std::vector<double>& counterfactual_probs,
                         const std::vector<double>& delta_hat);

/// Bounds on P(Y(1) > Y(0) | D = 1), same inputs.
BenefitBounds tau_bounds(const CounterfactualParams& counterfactual, const Cutoffs& cutoffs,
                         const std::vector<double>& delta_hat);
BenefitBounds tau_bounds(const std::vector<double>& counterfactual_probs,
                         const std::vector<double>& delta_hat);

}  // namespace orddid
