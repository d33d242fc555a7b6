#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "orddid/ordered_probit.hpp"
#include "orddid/panel_data.hpp"

namespace orddid {

/// Design row Z = (1, D, t, D*t, X') for every record of a two-period panel.
struct CovariateDesign {
  Eigen::MatrixXd rows;  // records x (4 + p)
  std::size_t p = 0;

  /// Throws DomainError unless periods are {0, 1}.
  static CovariateDesign build(const PanelDataset& data);
};

/// mu = Z' gamma0, sigma = exp(Z' gamma1), coefficients on the original
/// covariate scale.
struct GammaParams {
  std::vector<double> gamma0;
  std::vector<double> gamma1;

  /// (mu, sigma) at design row (1, d, t, d*t, x).
  CellParams at(int d, int t, std::span<const double> x = {}) const;
};

struct CovariateFit {
  GammaParams gamma;
  std::vector<double> kappa;  // full interior cutoffs (first two anchored)
  int n_free_cutoffs = 0;
  double loglik = 0.0;
  /// Covariance over (gamma0, gamma1, free cutoffs), original scale.
  Eigen::MatrixXd cov;
  int iterations = 0;
};

struct CovariateFitOptions {
  MinimizeOptions minimize{};
  bool compute_cov = true;
};

/// Maximum likelihood over all records of both periods. Covariates are
/// standardized internally. Throws CollinearityError for a rank-deficient
/// design and NonIdentifiedError when a category is empty or perfectly
/// predicted.
CovariateFit fit_covariate_model(const PanelDataset& data, const CutoffAnchor& anchor = {},
                                 const CovariateFitOptions& options = {});

/// Delta_j (j = 1..J-1) averaged over treated units' post-period rows:
/// P(Y >= j | 1, 1, 1, 1, X) - P(Y >= j | 1, 0, 1, 0, X).
/// Throws EmptyCellError when there are no treated post-period rows.
std::vector<double> covariate_effects(const GammaParams& gamma, const PanelDataset& data,
                                      std::span<const double> kappa);

/// P(Y = j | Z) for every j.
std::vector<double> predicted_probs(const GammaParams& gamma, std::span<const double> z,
                                    std::span<const double> kappa);

}  // namespace orddid
