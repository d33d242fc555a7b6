#include "orddid/identification.hpp"

#include <algorithm>
#include <cmath>

#include "orddid/error.hpp"

namespace orddid {

CounterfactualParams counterfactual_params(const CellParams& t00, const CellParams& t01,
                                           const CellParams& t10) {
  for (const auto* p : {&t00, &t01, &t10}) {
    if (!(p->sigma > 0.0) || !std::isfinite(p->sigma) || !std::isfinite(p->mu)) {
      throw DomainError("counterfactual_params: scales must be positive and finite");
    }
  }
  return {t10.mu + (t01.mu - t00.mu) * t10.sigma / t00.sigma,
          t10.sigma * t01.sigma / t00.sigma};
}

EffectEstimate effects_from_probs(std::vector<double> observed_treated,
                                  std::vector<double> counterfactual) {
  if (observed_treated.size() != counterfactual.size() || observed_treated.size() < 2) {
    throw DomainError("effects_from_probs: probability vectors must have equal length J");
  }
  const std::size_t J = observed_treated.size();
  EffectEstimate e;
  e.zeta.resize(J);
  for (std::size_t j = 0; j < J; ++j) e.zeta[j] = observed_treated[j] - counterfactual[j];
  // Delta_j accumulated from the top category down.
  e.delta.assign(J - 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = J - 1; j >= 1; --j) {
    acc += e.zeta[j];
    e.delta[j - 1] = acc;
  }
  e.observed_treated = std::move(observed_treated);
  e.counterfactual = std::move(counterfactual);
  return e;
}

EffectEstimate estimate_effects(const FitResult& fit, const CellCounts& treated_post_counts) {
  if (!fit.theta11) throw DomainError("estimate_effects: fit carries no counterfactual");
  if (treated_post_counts.n <= 0) throw EmptyCellError("treated post-period cell is empty");
  if (treated_post_counts.counts.size() != fit.kappa.size() + 1) {
    throw DomainError("estimate_effects: treated counts disagree with J");
  }
  return effects_from_probs(treated_post_counts.frequencies(),
                            cell_probs(*fit.theta11, std::span<const double>(fit.kappa)));
}

DidEstimate estimate_did(const PanelDataset& data, const CutoffAnchor& anchor,
                         const FitOptions& options) {
  DidEstimate out{fit_joint(data, anchor, options), {}};
  out.effects = estimate_effects(out.fit, cell_counts(data, 1, 1));
  return out;
}

std::vector<double> did_statistic(const PanelDataset& data, const CutoffAnchor& anchor) {
  FitOptions opt;
  opt.compute_cov = false;
  const auto est = estimate_did(data, anchor, opt);
  std::vector<double> v = est.effects.zeta;
  v.insert(v.end(), est.effects.delta.begin(), est.effects.delta.end());
  return v;
}

double effects_invariance_check(const PanelDataset& data, const CutoffAnchor& a,
                                const CutoffAnchor& b) {
  if (data.n_categories() != 3) {
    throw DomainError("effects_invariance_check: exact invariance applies to J = 3");
  }
  FitOptions opt;
  opt.compute_cov = false;
  const auto za = estimate_did(data, a, opt).effects.zeta;
  const auto zb = estimate_did(data, b, opt).effects.zeta;
  double worst = 0.0;
  for (std::size_t j = 0; j < za.size(); ++j) worst = std::max(worst, std::fabs(za[j] - zb[j]));
  return worst;
}

}  // namespace orddid
