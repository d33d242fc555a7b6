#pragma once

#include <optional>
#include <vector>

#include "orddid/ordered_probit.hpp"
#include "orddid/panel_data.hpp"

namespace orddid {

/// Location/scale of the treated group's untreated post-period latent
/// distribution, recovered from the three observed cells.
using CounterfactualParams = CellParams;

/// mu11 = mu10 + (mu01 - mu00) * sigma10 / sigma00,
/// sigma11 = sigma10 * sigma01 / sigma00. Exact; no iteration.
CounterfactualParams counterfactual_params(const CellParams& t00, const CellParams& t01,
                                           const CellParams& t10);

struct EffectEstimate {
  std::vector<double> zeta;              // J entries
  std::vector<double> delta;             // J-1 entries, delta[j-1] = Delta_j
  std::vector<double> observed_treated;  // raw frequencies of the treated post cell
  std::vector<double> counterfactual;    // model probabilities under theta11
};

/// Builds zeta/Delta from the two probability vectors.
EffectEstimate effects_from_probs(std::vector<double> observed_treated,
                                  std::vector<double> counterfactual);

/// Second stage: nonparametric treated post frequencies minus the
/// counterfactual probabilities implied by fit.theta11.
EffectEstimate estimate_effects(const FitResult& fit, const CellCounts& treated_post_counts);

struct DidEstimate {
  FitResult fit;
  EffectEstimate effects;
};

/// Full point-estimate pipeline on a two-period dataset (periods 0, 1).
DidEstimate estimate_did(const PanelDataset& data, const CutoffAnchor& anchor = {},
                         const FitOptions& options = {});

/// Flattened statistic vector (zeta then Delta) used by the bootstrap.
std::vector<double> did_statistic(const PanelDataset& data, const CutoffAnchor& anchor = {});

/// max_j |zeta_j(A) - zeta_j(B)| for a J = 3 dataset under two anchors.
double effects_invariance_check(const PanelDataset& data, const CutoffAnchor& a,
                                const CutoffAnchor& b);

}  // namespace orddid
