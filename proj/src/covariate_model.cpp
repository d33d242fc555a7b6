#include "orddid/covariate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orddid/error.hpp"
#include "orddid/normal.hpp"

namespace orddid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double interval_prob(double a, double b) {
  if (b <= a) return 0.0;
  if (a >= 0.0) {
    const double sa = std::isfinite(a) ? norm_sf(a) : 0.0;
    const double sb = std::isfinite(b) ? norm_sf(b) : 0.0;
    return sa - sb;
  }
  const double fb = std::isfinite(b) ? norm_cdf(b) : 1.0;
  const double fa = std::isfinite(a) ? norm_cdf(a) : 0.0;
  return fb - fa;
}

double dot(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Likelihood on the standardized design. Parameters: gamma0 (K), gamma1 (K),
// log increments of the free cutoffs.
struct Problem {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> z;
  std::vector<int> y;
  std::size_t K = 0;
  int J = 0;
  CutoffAnchor anchor;

  std::size_t n_free() const { return static_cast<std::size_t>(J - 3); }
  std::size_t dim() const { return 2 * K + n_free(); }

  std::vector<double> kappa(std::span<const double> th) const {
    std::vector<double> k{anchor.k1, anchor.k2};
    for (std::size_t f = 0; f < n_free(); ++f) k.push_back(k.back() + std::exp(th[2 * K + f]));
    return k;
  }

  // Mean negative log-likelihood; fills grad when non-null.
  double eval(std::span<const double> th, std::span<double> grad) const {
    const auto kap = kappa(th);
    const std::size_t n = y.size();
    std::vector<double> dk(kap.size(), 0.0);
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> zi(z.row(static_cast<Eigen::Index>(i)).data(), K);
      const double mu = dot(zi, th.data());
      const double ls = dot(zi, th.data() + K);
      if (std::fabs(ls) > 700.0) return kInf;
      const double sigma = std::exp(ls);
      const int yi = y[i];
      const double lo = yi == 0 ? -kInf : (kap[static_cast<std::size_t>(yi - 1)] - mu) / sigma;
      const double hi = yi == J - 1 ? kInf : (kap[static_cast<std::size_t>(yi)] - mu) / sigma;
      const double p = interval_prob(lo, hi);
      if (!(p > 0.0)) return kInf;
      ll += std::log(p);
      if (grad.empty()) continue;
      const double flo = std::isfinite(lo) ? norm_pdf(lo) : 0.0;
      const double fhi = std::isfinite(hi) ? norm_pdf(hi) : 0.0;
      const double dmu = (flo - fhi) / sigma / p;
      const double dls = ((std::isfinite(lo) ? flo * lo : 0.0) - (std::isfinite(hi) ? fhi * hi : 0.0)) / p;
      for (std::size_t k = 0; k < K; ++k) {
        grad[k] -= dmu * zi[k];
        grad[K + k] -= dls * zi[k];
      }
      if (yi < J - 1) dk[static_cast<std::size_t>(yi)] += fhi / sigma / p;
      if (yi > 0) dk[static_cast<std::size_t>(yi - 1)] -= flo / sigma / p;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (!grad.empty()) {
      for (std::size_t f = 0; f < n_free(); ++f) {
        double tail = 0.0;
        for (std::size_t m = f + 2; m < kap.size(); ++m) tail += dk[m];
        grad[2 * K + f] = -tail * std::exp(th[2 * K + f]);
      }
      for (double& g : grad) g *= inv_n;
    }
    return -ll * inv_n;
  }
};

double pooled_quantile_cut(double mu, double sigma, double cum) {
  return mu + sigma * norm_quantile(cum);
}

}  // namespace

CovariateDesign CovariateDesign::build(const PanelDataset& data) {
  const auto& per = data.periods();
  if (per.size() != 2 || per[0] != 0 || per[1] != 1) {
    throw DomainError("covariate model needs a two-period panel with periods 0 and 1");
  }
  CovariateDesign d;
  d.p = data.n_covariates();
  const auto n = static_cast<Eigen::Index>(data.size());
  d.rows.resize(n, static_cast<Eigen::Index>(4 + d.p));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = data.records()[static_cast<std::size_t>(i)];
    const double D = r.treated, t = r.period;
    d.rows(i, 0) = 1.0;
    d.rows(i, 1) = D;
    d.rows(i, 2) = t;
    d.rows(i, 3) = D * t;
    for (std::size_t k = 0; k < d.p; ++k) {
      d.rows(i, static_cast<Eigen::Index>(4 + k)) = data.covariate(static_cast<std::size_t>(i), k);
    }
  }
  return d;
}

CellParams GammaParams::at(int d, int t, std::span<const double> x) const {
  const std::size_t K = gamma0.size();
  if (gamma1.size() != K || x.size() + 4 != K) throw DomainError("GammaParams: dimension mismatch");
  std::vector<double> z{1.0, double(d), double(t), double(d * t)};
  z.insert(z.end(), x.begin(), x.end());
  return {dot(z, gamma0.data()), std::exp(dot(z, gamma1.data()))};
}

std::vector<double> predicted_probs(const GammaParams& gamma, std::span<const double> z,
                                    std::span<const double> kappa) {
  if (z.size() != gamma.gamma0.size() || z.size() != gamma.gamma1.size()) {
    throw DomainError("predicted_probs: dimension mismatch");
  }
  return cell_probs(CellParams{dot(z, gamma.gamma0.data()), std::exp(dot(z, gamma.gamma1.data()))},
                    kappa);
}

CovariateFit fit_covariate_model(const PanelDataset& data, const CutoffAnchor& anchor,
                                 const CovariateFitOptions& options) {
  const int J = data.n_categories();
  if (J < 3) throw DomainError("covariate model needs J >= 3");
  if (!(anchor.k2 > anchor.k1)) throw DomainError("anchored cutoffs must be increasing");
  const CovariateDesign design = CovariateDesign::build(data);
  const std::size_t p = design.p;
  const std::size_t K = 4 + p;
  const auto n = static_cast<Eigen::Index>(data.size());

  // Standardize covariate columns.
  std::vector<double> mean(p, 0.0), sd(p, 1.0);
  Problem prob;
  prob.z = design.rows;
  prob.K = K;
  prob.J = J;
  prob.anchor = anchor;
  for (std::size_t k = 0; k < p; ++k) {
    const auto col = static_cast<Eigen::Index>(4 + k);
    mean[k] = design.rows.col(col).mean();
    const double var = (design.rows.col(col).array() - mean[k]).square().sum() /
                       std::max<double>(1.0, static_cast<double>(n - 1));
    if (!(var > 1e-24 * std::max(1.0, mean[k] * mean[k]))) {
      throw CollinearityError("covariate '" + data.covariate_names()[k] +
                              "' is constant and duplicates the intercept");
    }
    sd[k] = std::sqrt(var);
    prob.z.col(col) = (design.rows.col(col).array() - mean[k]) / sd[k];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(prob.z));
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(K)) {
    throw CollinearityError("covariate design matrix is rank deficient");
  }

  std::vector<long long> counts(static_cast<std::size_t>(J), 0);
  prob.y.reserve(data.size());
  for (const auto& r : data.records()) {
    prob.y.push_back(r.outcome);
    ++counts[static_cast<std::size_t>(r.outcome)];
  }
  for (int j = 0; j < J; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) {
      throw NonIdentifiedError("outcome category " + std::to_string(j) + " never occurs");
    }
  }

  // Start: per-cell three-bin inversion mapped onto the saturated
  // (1, D, t, D*t) block; cold start where a cell is degenerate.
  std::vector<double> init(prob.dim(), 0.0);
  const Cutoffs anchor_cut = Cutoffs::pair(anchor.k1, anchor.k2);
  double mu_c[2][2], ls_c[2][2];
  bool all_ok = true;
  for (int d = 0; d < 2 && all_ok; ++d) {
    for (int t = 0; t < 2 && all_ok; ++t) {
      double c3[3] = {0, 0, 0};
      double tot = 0.0;
      for (const auto& r : data.records()) {
        if (r.treated != d || r.period != t) continue;
        c3[std::min(r.outcome, 2)] += 1.0;
        tot += 1.0;
      }
      if (tot == 0.0 || c3[0] == 0.0 || c3[1] == 0.0 || c3[2] == 0.0) {
        all_ok = false;
        break;
      }
      const double f[3] = {c3[0] / tot, c3[1] / tot, c3[2] / tot};
      const CellParams cp = invert_cell_j3(f, anchor_cut);
      mu_c[d][t] = cp.mu;
      ls_c[d][t] = std::log(cp.sigma);
    }
  }
  if (all_ok) {
    init[0] = mu_c[0][0];
    init[1] = mu_c[1][0] - mu_c[0][0];
    init[2] = mu_c[0][1] - mu_c[0][0];
    init[3] = mu_c[1][1] - mu_c[1][0] - mu_c[0][1] + mu_c[0][0];
    init[K + 0] = ls_c[0][0];
    init[K + 1] = ls_c[1][0] - ls_c[0][0];
    init[K + 2] = ls_c[0][1] - ls_c[0][0];
    init[K + 3] = ls_c[1][1] - ls_c[1][0] - ls_c[0][1] + ls_c[0][0];
  } else {
    init[0] = 0.5 * (anchor.k1 + anchor.k2);
    init[K] = std::log(anchor.k2 - anchor.k1);
  }
  if (J > 3) {
    // Free cutoffs from the pooled distribution.
    const double total = static_cast<double>(data.size());
    const double f0 = static_cast<double>(counts[0]) / total;
    const double f1 = static_cast<double>(counts[1]) / total;
    const double f[3] = {f0, f1, 1.0 - f0 - f1};
    const CellParams pooled = invert_cell_j3(f, anchor_cut);
    double cum = f0 + f1, prev = anchor.k2;
    const double min_gap = 1e-2 * (anchor.k2 - anchor.k1);
    for (int m = 2; m < J - 1; ++m) {
      cum += static_cast<double>(counts[static_cast<std::size_t>(m)]) / total;
      double k = pooled_quantile_cut(pooled.mu, pooled.sigma, std::min(cum, 1.0 - 1e-9));
      if (!(k > prev + min_gap)) k = prev + min_gap;
      init[2 * K + static_cast<std::size_t>(m - 2)] = std::log(k - prev);
      prev = k;
    }
  }

  Objective obj;
  obj.value = [&prob](std::span<const double> th) { return prob.eval(th, {}); };
  obj.gradient = [&prob](std::span<const double> th, std::span<double> g) { prob.eval(th, g); };
  const MinimizeResult res = minimize(obj, init, options.minimize);
  const auto& th = res.x;
  for (std::size_t k = 0; k < 2 * K; ++k) {
    if (std::fabs(th[k]) > 25.0) {
      throw NonIdentifiedError("covariate model diverged: an outcome category is perfectly predicted");
    }
  }

  CovariateFit fit;
  fit.iterations = res.iterations;
  fit.loglik = -res.value * static_cast<double>(n);
  fit.kappa = prob.kappa(th);
  fit.n_free_cutoffs = J - 3;

  // Back to the original covariate scale: linear map A on each gamma block.
  const std::size_t dim = prob.dim();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < 2; ++b) {
    const auto off = static_cast<Eigen::Index>(b * K);
    for (Eigen::Index k = 0; k < 4; ++k) jac(off + k, off + k) = 1.0;
    for (std::size_t k = 0; k < p; ++k) {
      const auto c = off + static_cast<Eigen::Index>(4 + k);
      jac(c, c) = 1.0 / sd[k];
      jac(off, c) = -mean[k] / sd[k];
    }
  }
  for (std::size_t m = 0; m < prob.n_free(); ++m) {
    for (std::size_t f = 0; f <= m; ++f) {
      jac(static_cast<Eigen::Index>(2 * K + m), static_cast<Eigen::Index>(2 * K + f)) =
          std::exp(th[2 * K + f]);
    }
  }
  Eigen::VectorXd th_std = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(dim));
  const Eigen::VectorXd g_orig = jac.topLeftCorner(static_cast<Eigen::Index>(2 * K),
                                                   static_cast<Eigen::Index>(2 * K)) *
                                 th_std.head(static_cast<Eigen::Index>(2 * K));
  fit.gamma.gamma0.assign(g_orig.data(), g_orig.data() + K);
  fit.gamma.gamma1.assign(g_orig.data() + K, g_orig.data() + 2 * K);

  if (options.compute_cov) {
    Eigen::MatrixXd H(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<double> xp = th, gp(dim), gm(dim);
    for (std::size_t a = 0; a < dim; ++a) {
      const double h = 1e-5 * std::max(1.0, std::fabs(th[a]));
      xp[a] = th[a] + h;
      prob.eval(xp, gp);
      xp[a] = th[a] - h;
      prob.eval(xp, gm);
      xp[a] = th[a];
      for (std::size_t b = 0; b < dim; ++b) {
        H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = (gp[b] - gm[b]) / (2.0 * h);
      }
    }
    H = 0.5 * (H + H.transpose()) * static_cast<double>(n);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      throw NonIdentifiedError("covariate model information matrix is not positive definite");
    }
    const Eigen::MatrixXd cov_std =
        llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
    fit.cov = jac * cov_std * jac.transpose();
  }
  return fit;
}

std::vector<double> covariate_effects(const GammaParams& gamma, const PanelDataset& data,
                                      std::span<const double> kappa) {
  const std::size_t p = data.n_covariates();
  const std::size_t K = 4 + p;
  if (gamma.gamma0.size() != K || gamma.gamma1.size() != K) {
    throw DomainError("covariate_effects: gamma does not match the covariate count");
  }
  if (kappa.size() + 1 != static_cast<std::size_t>(data.n_categories())) {
    throw DomainError("covariate_effects: cutoff count does not match J");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data.records()[i];
    if (r.treated == 1 && r.period == 1) rows.push_back(i);
  }
  if (rows.empty()) throw EmptyCellError("covariate_effects: no treated post-period rows");
  const std::size_t Jm1 = kappa.size();
  std::vector<double> contrib(rows.size() * Jm1);
#pragma omp parallel for
  for (long long ii = 0; ii < static_cast<long long>(rows.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> x(p);
    for (std::size_t k = 0; k < p; ++k) x[k] = data.covariate(rows[i], k);
    const CellParams on = gamma.at(1, 1, x);
    const CellParams off = gamma.at(0, 1, x);
    for (std::size_t j = 0; j < Jm1; ++j) {
      const double a = norm_sf((kappa[j] - on.mu) / on.sigma);
      const double b = norm_sf((kappa[j] - off.mu) / off.sigma);
      contrib[i * Jm1 + j] = a - b;
    }
  }
  std::vector<double> delta(Jm1, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < Jm1; ++j) delta[j] += contrib[i * Jm1 + j];
  }
  for (double& d : delta) d /= static_cast<double>(rows.size());
  return delta;
}

}  // namespace orddid
