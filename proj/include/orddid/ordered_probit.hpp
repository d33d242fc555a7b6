#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "orddid/optimize.hpp"
#include "orddid/panel_data.hpp"

namespace orddid {

/// Location/scale of one group-time latent distribution.
struct CellParams {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Interior cutoffs kappa_1 < ... < kappa_{J-1}; kappa_0 = -inf and
/// kappa_J = +inf are implicit.
struct Cutoffs {
  std::vector<double> kappa;
  std::pair<int, int> fixed_pair{0, 1};

  static Cutoffs pair(double k1, double k2) { return Cutoffs{{k1, k2}, {0, 1}}; }
  int n_categories() const noexcept { return static_cast<int>(kappa.size()) + 1; }
  /// Throws DomainError unless finite and strictly increasing.
  void validate() const;
};

/// The two anchored cutoffs of a fit. Higher cutoffs (J > 3) are estimated.
struct CutoffAnchor {
  double k1 = 0.0;
  double k2 = 1.0;
};

struct CellFit {
  CellParams params;
  double loglik = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();  // over (mu, sigma)
  bool converged = false;
};

enum class InitStrategy {
  closed_form,  // invert_cell_j3 on frequencies collapsed to three bins
  cold,         // data-independent start from the anchored cutoffs
};

struct FitOptions {
  InitStrategy init = InitStrategy::closed_form;
  MinimizeOptions minimize{};
  bool compute_cov = true;
};

/// P(Y = j) for j = 0..J-1. Throws DomainError for sigma <= 0.
std::vector<double> cell_probs(const CellParams& params, std::span<const double> kappa);
std::vector<double> cell_probs(const CellParams& params, const Cutoffs& cutoffs);

/// Closed-form (mu, sigma) reproducing three category probabilities under
/// the first two cutoffs. Throws NonIdentifiedError if a probability is 0 or 1.
CellParams invert_cell_j3(std::span<const double> probs, const Cutoffs& cutoffs);

/// Maximum likelihood (mu, sigma) of one cell with every cutoff held fixed.
CellFit fit_cell(const CellCounts& counts, const Cutoffs& cutoffs,
                 const FitOptions& options = {});

/// Log-likelihood sum_j counts_j log p_j.
double cell_loglik(const CellCounts& counts, const CellParams& params,
                   std::span<const double> kappa);

struct CellKey {
  int group = 0;
  int period = 0;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct FitResult {
  std::vector<CellKey> keys;
  std::vector<CellFit> cells;
  std::vector<double> kappa;  // full interior cutoff vector used / estimated
  int n_free_cutoffs = 0;
  double loglik = 0.0;
  /// Covariance over (mu_c, sigma_c for each cell in `keys` order, then the
  /// free cutoffs).
  Eigen::MatrixXd cov;
  /// Counterfactual treated post-period parameters (DID fits only).
  std::optional<CellParams> theta11;

  const CellFit& cell(int d, int t) const;
  std::size_t index_of(int d, int t) const;
  Cutoffs cutoffs() const { return Cutoffs{kappa, {0, 1}}; }
};

/// Fits the given cells: J = 3 as independent fit_cell calls; J > 3 jointly
/// with shared, monotone free cutoffs above the anchor.
FitResult fit_cells(const std::vector<CellCounts>& cells, int n_categories,
                    const CutoffAnchor& anchor, const FitOptions& options = {});

/// DID first stage on a two-period dataset (periods 0, 1): cells (0,0),
/// (0,1), (1,0); the treated post-period cell never enters the likelihood.
FitResult fit_joint(const PanelDataset& data, const CutoffAnchor& anchor,
                    const FitOptions& options = {});

/// All four cells of a two-period pre-treatment dataset.
FitResult fit_pretreatment(const PanelDataset& data, const CutoffAnchor& anchor,
                           const FitOptions& options = {});

}  // namespace orddid
