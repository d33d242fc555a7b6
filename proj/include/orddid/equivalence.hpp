#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "orddid/inference.hpp"
#include "orddid/ordered_probit.hpp"

namespace orddid {

/// Pre-period quantile shift of one group:
/// v -> Phi((mu_1 + sigma_1 Phi^{-1}(v) - mu_0) / sigma_0).
struct QuantileShift {
  int group = 0;
  CellParams period0;
  CellParams period1;
};

/// Evaluates the shift at v. v outside [1e-9, 1-1e-9] is clamped; the
/// optional flag reports it.
double qtilde(const QuantileShift& shift, double v, bool* saturated = nullptr);

/// (mu00, sigma00, mu01, sigma01, mu10, sigma10, mu11, sigma11): group-0
/// cells at the two pre-periods, then group 1.
using PreTheta = std::array<double, 8>;

PreTheta pre_theta(const FitResult& pre_fit);

/// t(v) = qtilde_1(v) - qtilde_0(v).
double t_value(const PreTheta& theta, double v, bool* saturated = nullptr);

/// Closed-form d t(v) / d theta.
PreTheta t_gradient(const PreTheta& theta, double v);

struct GridSpec {
  double start = 0.001;
  double stop = 0.999;
  double step = 0.01;

  std::vector<double> points() const;
  /// Parses "start:stop:step".
  static GridSpec parse(const std::string& text);
};

struct EquivalenceResult {
  std::vector<double> grid;
  std::vector<double> t_hat;
  std::vector<double> se;
  std::vector<double> lower;
  std::vector<double> upper;
  PreTheta theta{};
  double t_max = 0.0;  // max |t_hat|
  double u_max = 0.0;
  double l_min = 0.0;
  double alpha = 0.05;
  double delta = 0.0;
  bool bands_filled = false;
  bool reject = false;
  double p_value = 1.0;
  bool saturated = false;
  double n = 0.0;  // effective n used for the bands
};

EquivalenceResult t_grid(const PreTheta& theta, const GridSpec& grid = {});
EquivalenceResult t_grid(const FitResult& pre_fit, const GridSpec& grid = {});

/// 8x8 covariance of the pre-period (mu, sigma) estimates from a four-cell
/// pre-treatment fit (inverse observed information).
Eigen::MatrixXd theta_covariance(const FitResult& pre_fit);

/// Bootstrap covariance of the same eight parameters.
Eigen::MatrixXd bootstrap_theta_covariance(const PanelDataset& pre_data, const CutoffAnchor& anchor,
                                           const BootstrapSpec& spec);

/// Fills se/lower/upper: Var(t(v)) = g' Omega g, half-width
/// Phi^{-1}(1-alpha) sqrt(Var / n). Throws CovarianceError if Omega is not
/// symmetric PSD.
EquivalenceResult pointwise_bands(EquivalenceResult result, const Eigen::MatrixXd& omega,
                                  double n, double alpha);

struct EquivalenceDecision {
  bool reject = false;
  double p_value = 1.0;
};

/// Reject non-equivalence iff max upper < delta and min lower > -delta.
/// Throws DomainError for delta <= 0. Records the decision in `result`.
EquivalenceDecision equivalence_test(EquivalenceResult& result, double delta);

/// min{c * sqrt((n1 + n0) / (n1 n0)), 1}, c = sqrt(-log(0.05)/2) or 1.2.
double default_delta(long long n1, long long n0, bool rounded_constant = false);

enum class OmegaSource { information, bootstrap };

struct EquivalenceOptions {
  CutoffAnchor anchor;
  GridSpec grid;
  double alpha = 0.05;
  std::optional<double> delta;  // empty: default_delta
  bool rounded_constant = false;
  OmegaSource omega = OmegaSource::information;
  BootstrapSpec bootstrap;  // used when omega == bootstrap
  std::optional<double> n;  // effective n; default: pre-period record count
};

/// Full diagnostic on a two-period pre-treatment dataset (periods 0, 1).
EquivalenceResult run_equivalence_test(const PanelDataset& pre_data,
                                       const EquivalenceOptions& options = {});

}  // namespace orddid
