#include "orddid/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orddid/error.hpp"
#include "orddid/normal.hpp"

namespace orddid {

double qtilde(const QuantileShift& shift, double v, bool* saturated) {
  const auto q = norm_quantile_clamped(v);
  if (saturated) *saturated = q.saturated;
  const auto& p0 = shift.period0;
  const auto& p1 = shift.period1;
  if (!(p0.sigma > 0.0) || !(p1.sigma > 0.0)) throw DomainError("qtilde: scales must be positive");
  return norm_cdf((p1.mu + p1.sigma * q.value - p0.mu) / p0.sigma);
}

PreTheta pre_theta(const FitResult& pre_fit) {
  PreTheta th{};
  const int order[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int i = 0; i < 4; ++i) {
    const auto& p = pre_fit.cell(order[i][0], order[i][1]).params;
    th[static_cast<std::size_t>(2 * i)] = p.mu;
    th[static_cast<std::size_t>(2 * i + 1)] = p.sigma;
  }
  return th;
}

double t_value(const PreTheta& th, double v, bool* saturated) {
  const QuantileShift g0{0, {th[0], th[1]}, {th[2], th[3]}};
  const QuantileShift g1{1, {th[4], th[5]}, {th[6], th[7]}};
  bool s0 = false, s1 = false;
  const double t = qtilde(g1, v, &s1) - qtilde(g0, v, &s0);
  if (saturated) *saturated = s0 || s1;
  return t;
}

PreTheta t_gradient(const PreTheta& th, double v) {
  if (!(v > 0.0 && v < 1.0)) throw DomainError("t_gradient: v must lie in (0,1)");
  for (std::size_t i = 1; i < 8; i += 2) {
    if (!(th[i] > 0.0)) throw DomainError("t_gradient: scales must be positive");
  }
  const double e = erf_inv(2.0 * v - 1.0);
  const double s00 = th[1], s01 = th[3], s10 = th[5], s11 = th[7];
  const double z0 = (th[2] - th[0]) / (s00 * kSqrt2) + e / (s00 / s01);
  const double z1 = (th[6] - th[4]) / (s10 * kSqrt2) + e / (s10 / s11);
  const double k0 = std::exp(-z0 * z0);
  const double k1 = std::exp(-z1 * z1);
  const double root2pi = kSqrt2 * kSqrtPi;
  return {k0 / (root2pi * s00),      k0 * z0 / (kSqrtPi * s00),
          -k0 / (root2pi * s00),     -k0 * e / (kSqrtPi * s00),
          -k1 / (root2pi * s10),     -k1 * z1 / (kSqrtPi * s10),
          k1 / (root2pi * s10),      k1 * e / (kSqrtPi * s10)};
}

std::vector<double> GridSpec::points() const {
  if (!(step > 0.0) || !(start > 0.0) || !(stop < 1.0) || !(start <= stop)) {
    throw DomainError("grid must satisfy 0 < start <= stop < 1 and step > 0");
  }
  std::vector<double> pts;
  const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) pts.push_back(start + static_cast<double>(i) * step);
  return pts;
}

GridSpec GridSpec::parse(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    throw ConfigError("grid must be written start:stop:step, got '" + text + "'");
  }
  try {
    GridSpec g{std::stod(a), std::stod(b), std::stod(c)};
    g.points();
    return g;
  } catch (const std::logic_error&) {
    throw ConfigError("grid values must be numbers, got '" + text + "'");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

EquivalenceResult t_grid(const PreTheta& theta, const GridSpec& grid) {
  EquivalenceResult r;
  r.theta = theta;
  r.grid = grid.points();
  r.t_hat.resize(r.grid.size());
  int saturated = 0;
  const auto m = static_cast<long long>(r.grid.size());
#pragma omp parallel for reduction(+ : saturated)
  for (long long i = 0; i < m; ++i) {
    bool s = false;
    r.t_hat[static_cast<std::size_t>(i)] = t_value(theta, r.grid[static_cast<std::size_t>(i)], &s);
    saturated += s ? 1 : 0;
  }
  r.saturated = saturated > 0;
  for (double t : r.t_hat) r.t_max = std::max(r.t_max, std::fabs(t));
  return r;
}

EquivalenceResult t_grid(const FitResult& pre_fit, const GridSpec& grid) {
  return t_grid(pre_theta(pre_fit), grid);
}

Eigen::MatrixXd theta_covariance(const FitResult& pre_fit) {
  Eigen::MatrixXd out(8, 8);
  const int order[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  Eigen::Index idx[8];
  for (int i = 0; i < 4; ++i) {
    const auto c = static_cast<Eigen::Index>(pre_fit.index_of(order[i][0], order[i][1]));
    idx[2 * i] = 2 * c;
    idx[2 * i + 1] = 2 * c + 1;
  }
  if (pre_fit.cov.rows() < 8) throw CovarianceError("pre-period fit carries no covariance");
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) out(i, j) = pre_fit.cov(idx[i], idx[j]);
  }
  return out;
}

Eigen::MatrixXd bootstrap_theta_covariance(const PanelDataset& pre_data, const CutoffAnchor& anchor,
                                           const BootstrapSpec& spec) {
  Statistic stat = [anchor](const PanelDataset& d) {
    FitOptions opt;
    opt.compute_cov = false;
    const auto th = pre_theta(fit_pretreatment(d, anchor, opt));
    return std::vector<double>(th.begin(), th.end());
  };
  const auto boot = block_bootstrap(pre_data, stat, spec);
  Eigen::MatrixXd rows(0, 8);
  std::vector<Eigen::Matrix<double, 1, 8>> ok;
  for (std::size_t r = 0; r < boot.replicates.size(); ++r) {
    if (boot.failed[r]) continue;
    Eigen::Matrix<double, 1, 8> v;
    for (int j = 0; j < 8; ++j) v[j] = boot.replicates[r][static_cast<std::size_t>(j)];
    ok.push_back(v);
  }
  if (ok.size() < 2) throw CovarianceError("bootstrap covariance needs two successful replicates");
  rows.resize(static_cast<Eigen::Index>(ok.size()), 8);
  for (std::size_t r = 0; r < ok.size(); ++r) rows.row(static_cast<Eigen::Index>(r)) = ok[r];
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(ok.size() - 1);
}

EquivalenceResult pointwise_bands(EquivalenceResult result, const Eigen::MatrixXd& omega,
                                  double n, double alpha) {
  if (omega.rows() != 8 || omega.cols() != 8) throw CovarianceError("Omega must be 8x8");
  if (!omega.allFinite()) throw CovarianceError("Omega has non-finite entries");
  if (!(n > 0.0)) throw DomainError("pointwise_bands: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("pointwise_bands: alpha must lie in (0,1)");
  const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw CovarianceError("Omega is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw CovarianceError("Omega is not positive semi-definite");
  }
  const double z = norm_quantile(1.0 - alpha);
  const std::size_t m = result.grid.size();
  result.se.assign(m, 0.0);
  result.lower.assign(m, 0.0);
  result.upper.assign(m, 0.0);
#pragma omp parallel for
  for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto q = norm_quantile_clamped(result.grid[i]);
    const double v = norm_cdf(q.value);
    const PreTheta g = t_gradient(result.theta, v);
    const Eigen::Map<const Eigen::Matrix<double, 8, 1>> gv(g.data());
    const double var = std::max(0.0, gv.dot(omega * gv));
    result.se[i] = std::sqrt(var / n);
    result.upper[i] = result.t_hat[i] + z * result.se[i];
    result.lower[i] = result.t_hat[i] - z * result.se[i];
  }
  result.u_max = *std::max_element(result.upper.begin(), result.upper.end());
  result.l_min = *std::min_element(result.lower.begin(), result.lower.end());
  result.alpha = alpha;
  result.n = n;
  result.bands_filled = true;
  return result;
}

namespace {
double one_sided_p(double margin, double se) {
  if (se > 0.0) return norm_sf(margin / se);
  if (margin > 0.0) return 0.0;
  if (margin < 0.0) return 1.0;
  return 0.5;
}
}  // namespace

EquivalenceDecision equivalence_test(EquivalenceResult& result, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("equivalence threshold delta must be positive");
  }
  if (!result.bands_filled) throw DomainError("equivalence_test: bands are not filled");
  EquivalenceDecision d;
  d.reject = result.u_max < delta && result.l_min > -delta;
  double p = 0.0;
  for (std::size_t i = 0; i < result.t_hat.size(); ++i) {
    const double se = result.se.empty() ? 0.0 : result.se[i];
    p = std::max({p, one_sided_p(delta - result.t_hat[i], se),
                  one_sided_p(delta + result.t_hat[i], se)});
  }
  d.p_value = p;
  result.delta = delta;
  result.reject = d.reject;
  result.p_value = d.p_value;
  return d;
}

double default_delta(long long n1, long long n0, bool rounded_constant) {
  if (n1 < 1 || n0 < 1) throw DomainError("default_delta: group sizes must be positive");
  const double c = rounded_constant ? 1.2 : std::sqrt(-std::log(0.05) / 2.0);
  const double a = static_cast<double>(n1), b = static_cast<double>(n0);
  return std::min(c * std::sqrt((a + b) / (a * b)), 1.0);
}

EquivalenceResult run_equivalence_test(const PanelDataset& pre_data,
                                       const EquivalenceOptions& options) {
  const FitResult fit = fit_pretreatment(pre_data, options.anchor);
  EquivalenceResult r = t_grid(fit, options.grid);
  const double n = options.n.value_or(static_cast<double>(pre_data.size()));
  const Eigen::MatrixXd cov = options.omega == OmegaSource::information
                                  ? theta_covariance(fit)
                                  : bootstrap_theta_covariance(pre_data, options.anchor,
                                                               options.bootstrap);
  r = pointwise_bands(std::move(r), n * cov, n, options.alpha);
  const double delta = options.delta.value_or(default_delta(
      static_cast<long long>(pre_data.n_units_in_group(1)),
      static_cast<long long>(pre_data.n_units_in_group(0)), options.rounded_constant));
  equivalence_test(r, delta);
  return r;
}

}  // namespace orddid
