#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orddid/equivalence.hpp"
#include "orddid/identification.hpp"
#include "orddid/ordered_probit.hpp"
#include "orddid/panel_data.hpp"

namespace orddid {

enum class DgpKind {
  effect,    // treated post-period outcome drawn from `treated`
  pretrend,  // two untreated periods; treated second period drawn from theta11
};

struct DgpSpec {
  CellParams theta00{-0.5, 1.5};
  CellParams theta01{1.0, 1.0};
  CellParams theta10{-1.5, 2.0};
  std::optional<CellParams> theta11;  // empty: derived from the other three cells
  CellParams treated{1.5, 1.5};
  std::vector<double> kappa{0.0, 1.0};
  int n = 1000;  // units per group; every unit is observed in both periods
  std::uint64_t seed = 1;
  double rho = 0.0;  // within-unit latent correlation (Gaussian copula)
  DgpKind kind = DgpKind::effect;

  CellParams counterfactual() const;
  int n_categories() const { return static_cast<int>(kappa.size()) + 1; }
  /// Throws DomainError for sigma <= 0, bad cutoffs, n < 1 or |rho| >= 1.
  void validate() const;
};

/// Default cutoffs used by the simulation studies.
std::vector<double> default_sim_cutoffs(int J);

/// Long-format panel; unit i is its own cluster. Deterministic in spec.seed.
PanelDataset simulate_panel(const DgpSpec& spec);

/// Delta_j (j = 1..J-1) of `treated` against the counterfactual cell.
std::vector<double> true_effects(const DgpSpec& spec);

/// max_v |t(v)| for the four pre-period cells by dense grid plus local refinement.
double true_t_max(const DgpSpec& spec);
double true_t_max(const PreTheta& theta);

struct McOptions {
  int reps = 500;
  int boot_reps = 500;  // 0 skips the intervals (coverage reported as NaN)
  double alpha = 0.10;
  std::uint64_t seed = 20240101;
  int threads = 0;
};

struct EstimandMetrics {
  double truth = 0.0;
  double mean_estimate = 0.0;
  double abs_bias = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
};

struct McReport {
  double abs_bias = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
  std::vector<EstimandMetrics> per_estimand;
  int reps = 0;
  int n_failures = 0;
  std::string first_failure;
  /// Per repetition: Delta-hat then (lower, upper) per estimand; NaN on failure.
  std::vector<std::vector<double>> rows;
};

/// Estimator Monte Carlo: each repetition simulates spec with seed
/// stream_seed(options.seed, rep), estimates Delta and (optionally) a cluster
/// bootstrap percentile interval at level 1 - alpha.
McReport run_estimator_mc(const DgpSpec& spec, const McOptions& options);

struct EquivalenceMcOptions {
  int reps = 500;
  double alpha = 0.05;
  std::vector<double> deltas;
  GridSpec grid;
  std::uint64_t seed = 20240102;
  int threads = 0;
};

struct EquivalenceMcReport {
  double t_max = 0.0;
  std::vector<double> deltas;
  std::vector<double> rejection_rate;
  int reps = 0;
  int n_failures = 0;
  std::string first_failure;
  /// Per repetition: t_hat max, u_max, l_min; NaN on failure.
  std::vector<std::vector<double>> rows;
};

/// Equivalence-test Monte Carlo on a pretrend DGP.
EquivalenceMcReport run_equivalence_mc(const DgpSpec& spec, const EquivalenceMcOptions& options);

namespace serial {
McReport run_estimator_mc(const DgpSpec& spec, const McOptions& options);
EquivalenceMcReport run_equivalence_mc(const DgpSpec& spec, const EquivalenceMcOptions& options);
}  // namespace serial

/// Parallel-trends gap for the outcome dichotomized at threshold j:
/// [P_T1(Y >= j) - P_T0(Y >= j)] - [P_C1(Y >= j) - P_C0(Y >= j)].
/// Throws DomainError if a vector is not on the simplex or j is out of range.
double pt_gap(const std::vector<double>& treated_pre, const std::vector<double>& treated_post,
              const std::vector<double>& control_pre, const std::vector<double>& control_post,
              int threshold);

}  // namespace orddid
