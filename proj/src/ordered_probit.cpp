#include "orddid/ordered_probit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "orddid/error.hpp"
#include "orddid/identification.hpp"
#include "orddid/normal.hpp"

namespace orddid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_or_zero(double z) { return std::isfinite(z) ? norm_pdf(z) : 0.0; }

// P(a <= Z < b) for a standard normal Z, accurate in both tails.
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

void require_sigma(const CellParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.mu)) {
    throw DomainError("cell parameters require finite mu and sigma > 0");
  }
}

int nonempty_categories(const CellCounts& c) {
  return static_cast<int>(std::count_if(c.counts.begin(), c.counts.end(),
                                        [](long long x) { return x > 0; }));
}

std::string cell_name(const CellCounts& c) {
  return "(group " + std::to_string(c.group) + ", period " + std::to_string(c.period) + ")";
}

void check_identifiable(const CellCounts& c) {
  if (nonempty_categories(c) < 2) {
    throw NonIdentifiedError("cell " + cell_name(c) +
                             ": all mass in one category, location/scale not identified");
  }
  if (c.counts.size() == 3 && nonempty_categories(c) < 3) {
    throw NonIdentifiedError("cell " + cell_name(c) +
                             ": an empty category puts the J=3 MLE on the sigma -> 0 boundary");
  }
}

// Score of one cell's log-likelihood with respect to the standardized cutoffs
// z_k = (kappa_k - mu)/sigma, k = 1..J-1. Returns loglik (or -inf).
double cell_score_z(const CellCounts& c, const CellParams& p, std::span<const double> kappa,
                    std::vector<double>& z, std::vector<double>& dl_dz) {
  const std::size_t J = c.counts.size();
  z.resize(J - 1);
  dl_dz.assign(J - 1, 0.0);
  for (std::size_t k = 0; k + 1 < J; ++k) z[k] = (kappa[k] - p.mu) / p.sigma;
  double ll = 0.0;
  std::vector<double> w(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (c.counts[j] == 0) continue;
    const double lo = j == 0 ? -kInf : z[j - 1];
    const double hi = j + 1 == J ? kInf : z[j];
    const double pj = interval_prob(lo, hi);
    if (!(pj > 0.0)) return -kInf;
    ll += static_cast<double>(c.counts[j]) * std::log(pj);
    w[j] = static_cast<double>(c.counts[j]) / pj;
  }
  for (std::size_t k = 0; k + 1 < J; ++k) dl_dz[k] = norm_pdf(z[k]) * (w[k] - w[k + 1]);
  return ll;
}

// Parameter layout for the joint problem: per cell (mu, log sigma), then
// log increments of the free cutoffs above kappa_2.
struct JointLayout {
  std::size_t n_cells;
  int J;
  CutoffAnchor anchor;
  int n_free() const { return J - 3; }
  std::size_t dim() const { return 2 * n_cells + static_cast<std::size_t>(n_free()); }

  std::vector<double> kappa(std::span<const double> x) const {
    std::vector<double> k{anchor.k1, anchor.k2};
    for (int f = 0; f < n_free(); ++f) {
      k.push_back(k.back() + std::exp(x[2 * n_cells + static_cast<std::size_t>(f)]));
    }
    return k;
  }
};

std::vector<double> collapsed_three(const CellCounts& c) {
  const double n = static_cast<double>(c.n);
  double top = 0.0;
  for (std::size_t j = 2; j < c.counts.size(); ++j) top += static_cast<double>(c.counts[j]);
  return {static_cast<double>(c.counts[0]) / n, static_cast<double>(c.counts[1]) / n, top / n};
}

CellParams initial_params(const CellCounts& c, const CutoffAnchor& anchor, InitStrategy init) {
  const CellParams cold{0.5 * (anchor.k1 + anchor.k2), anchor.k2 - anchor.k1};
  if (init == InitStrategy::cold) return cold;
  const auto p = collapsed_three(c);
  if (p[0] <= 0.0 || p[1] <= 0.0 || p[2] <= 0.0) return cold;
  return invert_cell_j3(p, Cutoffs::pair(anchor.k1, anchor.k2));
}

// Observed information by central differences of an analytic score.
Eigen::MatrixXd information_by_differences(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& score,
    const Eigen::VectorXd& theta) {
  const Eigen::Index n = theta.size();
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-5 * std::max(1.0, std::fabs(theta[i]));
    Eigen::VectorXd tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    H.col(i) = -(score(tp) - score(tm)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd invert_information(const Eigen::MatrixXd& info) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw NonIdentifiedError("observed information is not positive definite at the optimum");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

void Cutoffs::validate() const {
  if (kappa.size() < 2) throw DomainError("cutoffs: need at least two interior cutoffs");
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    if (!std::isfinite(kappa[k])) throw DomainError("cutoffs must be finite");
    if (k > 0 && !(kappa[k] > kappa[k - 1])) {
      throw DomainError("cutoffs must be strictly increasing");
    }
  }
}

std::vector<double> cell_probs(const CellParams& params, std::span<const double> kappa) {
  require_sigma(params);
  const std::size_t J = kappa.size() + 1;
  std::vector<double> p(J);
  double lo = -kInf;
  for (std::size_t j = 0; j < J; ++j) {
    const double hi = j + 1 == J ? kInf : (kappa[j] - params.mu) / params.sigma;
    p[j] = interval_prob(lo, hi);
    lo = hi;
  }
  return p;
}

std::vector<double> cell_probs(const CellParams& params, const Cutoffs& cutoffs) {
  cutoffs.validate();
  return cell_probs(params, std::span<const double>(cutoffs.kappa));
}

CellParams invert_cell_j3(std::span<const double> probs, const Cutoffs& cutoffs) {
  if (probs.size() != 3) throw DomainError("invert_cell_j3 expects three probabilities");
  cutoffs.validate();
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) {
      throw NonIdentifiedError("invert_cell_j3: probabilities must lie strictly inside (0,1)");
    }
  }
  const double k1 = cutoffs.kappa[0];
  const double k2 = cutoffs.kappa[1];
  const double z_lo = norm_quantile(probs[0]);
  const double z_hi = -norm_quantile(probs[2]);  // Phi^{-1}(p0 + p1)
  if (!(z_hi > z_lo)) throw NonIdentifiedError("invert_cell_j3: degenerate middle category");
  const double sigma = (k2 - k1) / (z_hi - z_lo);
  return {k1 - sigma * z_lo, sigma};
}

double cell_loglik(const CellCounts& counts, const CellParams& params,
                   std::span<const double> kappa) {
  require_sigma(params);
  std::vector<double> z, g;
  return cell_score_z(counts, params, kappa, z, g);
}

CellFit fit_cell(const CellCounts& counts, const Cutoffs& cutoffs, const FitOptions& options) {
  cutoffs.validate();
  if (static_cast<int>(counts.counts.size()) != cutoffs.n_categories()) {
    throw DomainError("fit_cell: counts and cutoffs disagree on J");
  }
  check_identifiable(counts);
  const std::vector<double> kappa = cutoffs.kappa;
  const double n = static_cast<double>(counts.n);

  Objective obj;
  obj.value = [&](std::span<const double> x) {
    const CellParams p{x[0], std::exp(x[1])};
    std::vector<double> z, g;
    const double ll = cell_score_z(counts, p, kappa, z, g);
    return std::isfinite(ll) ? -ll / n : kInf;
  };
  obj.gradient = [&](std::span<const double> x, std::span<double> grad) {
    const CellParams p{x[0], std::exp(x[1])};
    std::vector<double> z, g;
    cell_score_z(counts, p, kappa, z, g);
    double dmu = 0.0, ds = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      dmu += -g[k] / p.sigma;
      ds += -g[k] * z[k];
    }
    grad[0] = -dmu / n;
    grad[1] = -ds / n;
  };

  const CellParams init =
      initial_params(counts, CutoffAnchor{kappa[0], kappa[1]}, options.init);
  const auto res = minimize(obj, {init.mu, std::log(init.sigma)}, options.minimize);
  if (res.x[1] < -30.0 || res.x[1] > 30.0) {
    throw NonIdentifiedError("fit_cell: scale diverged for cell " + cell_name(counts));
  }

  CellFit fit;
  fit.params = {res.x[0], std::exp(res.x[1])};
  fit.loglik = -res.value * n;
  fit.converged = true;
  if (options.compute_cov) {
    auto score = [&](const Eigen::VectorXd& th) {
      std::vector<double> z, g;
      const CellParams p{th[0], th[1]};
      cell_score_z(counts, p, kappa, z, g);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(2);
      for (std::size_t k = 0; k < g.size(); ++k) {
        s[0] += -g[k] / p.sigma;
        s[1] += -g[k] * z[k] / p.sigma;
      }
      return s;
    };
    Eigen::VectorXd theta(2);
    theta << fit.params.mu, fit.params.sigma;
    fit.cov = invert_information(information_by_differences(score, theta));
  }
  return fit;
}

const CellFit& FitResult::cell(int d, int t) const { return cells[index_of(d, t)]; }

std::size_t FitResult::index_of(int d, int t) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].group == d && keys[i].period == t) return i;
  }
  throw DomainError("fit has no cell (group " + std::to_string(d) + ", period " +
                    std::to_string(t) + ")");
}

namespace {

FitResult fit_cells_j3(const std::vector<CellCounts>& cells, const CutoffAnchor& anchor,
                       const FitOptions& options) {
  FitResult out;
  out.kappa = {anchor.k1, anchor.k2};
  const auto cut = Cutoffs::pair(anchor.k1, anchor.k2);
  const auto m = static_cast<Eigen::Index>(cells.size());
  out.cov = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.keys.push_back({cells[i].group, cells[i].period});
    out.cells.push_back(fit_cell(cells[i], cut, options));
    out.loglik += out.cells.back().loglik;
    const auto b = static_cast<Eigen::Index>(2 * i);
    out.cov.block<2, 2>(b, b) = out.cells.back().cov;
  }
  return out;
}

FitResult fit_cells_joint(const std::vector<CellCounts>& cells, int J,
                          const CutoffAnchor& anchor, const FitOptions& options) {
  const JointLayout layout{cells.size(), J, anchor};
  double n_total = 0.0;
  for (const auto& c : cells) n_total += static_cast<double>(c.n);

  // Natural-parameter score: (mu, sigma) per cell then free kappa values.
  auto natural_loglik_score = [&](std::span<const double> mus, std::span<const double> sigmas,
                                  std::span<const double> kappa, Eigen::VectorXd* score) {
    double ll = 0.0;
    std::vector<double> z, g;
    if (score) score->setZero(static_cast<Eigen::Index>(2 * cells.size() + (J - 3)));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const CellParams p{mus[c], sigmas[c]};
      const double lc = cell_score_z(cells[c], p, kappa, z, g);
      if (!std::isfinite(lc)) return -kInf;
      ll += lc;
      if (!score) continue;
      auto& s = *score;
      for (std::size_t k = 0; k < g.size(); ++k) {
        s[static_cast<Eigen::Index>(2 * c)] += -g[k] / p.sigma;
        s[static_cast<Eigen::Index>(2 * c + 1)] += -g[k] * z[k] / p.sigma;
        if (k >= 2) s[static_cast<Eigen::Index>(2 * cells.size() + k - 2)] += g[k] / p.sigma;
      }
    }
    return ll;
  };

  auto unpack = [&](std::span<const double> x, std::vector<double>& mus,
                    std::vector<double>& sigmas) {
    mus.resize(cells.size());
    sigmas.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      mus[c] = x[2 * c];
      sigmas[c] = std::exp(x[2 * c + 1]);
    }
  };

  Objective obj;
  obj.value = [&](std::span<const double> x) {
    std::vector<double> mus, sigmas;
    unpack(x, mus, sigmas);
    const auto kappa = layout.kappa(x);
    const double ll = natural_loglik_score(mus, sigmas, kappa, nullptr);
    return std::isfinite(ll) ? -ll / n_total : kInf;
  };
  obj.gradient = [&](std::span<const double> x, std::span<double> grad) {
    std::vector<double> mus, sigmas;
    unpack(x, mus, sigmas);
    const auto kappa = layout.kappa(x);
    Eigen::VectorXd s;
    natural_loglik_score(mus, sigmas, kappa, &s);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      grad[2 * c] = -s[static_cast<Eigen::Index>(2 * c)] / n_total;
      grad[2 * c + 1] = -s[static_cast<Eigen::Index>(2 * c + 1)] * sigmas[c] / n_total;
    }
    // d kappa_m / d eta_f = exp(eta_f) for every m at or above f.
    double tail = 0.0;
    for (int f = J - 4; f >= 0; --f) {
      tail += s[static_cast<Eigen::Index>(2 * cells.size()) + f];
      const std::size_t idx = 2 * cells.size() + static_cast<std::size_t>(f);
      grad[idx] = -tail * std::exp(x[idx]) / n_total;
    }
  };

  // Initial values.
  std::vector<double> x0(layout.dim());
  std::vector<CellParams> init(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    init[c] = initial_params(cells[c], anchor, options.init);
    x0[2 * c] = init[c].mu;
    x0[2 * c + 1] = std::log(init[c].sigma);
  }
  double prev = anchor.k2;
  const double min_gap = 1e-3 * (anchor.k2 - anchor.k1);
  for (int f = 0; f < J - 3; ++f) {
    const int k = f + 2;  // zero-based cutoff index kappa[k]
    double est = prev + (anchor.k2 - anchor.k1);
    if (options.init == InitStrategy::closed_form) {
      double wsum = 0.0, acc = 0.0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        long long below = 0;
        for (int j = 0; j <= k; ++j) below += cells[c].counts[static_cast<std::size_t>(j)];
        const double F = static_cast<double>(below) / static_cast<double>(cells[c].n);
        if (F <= 0.0 || F >= 1.0) continue;
        acc += static_cast<double>(cells[c].n) * (init[c].mu + init[c].sigma * norm_quantile(F));
        wsum += static_cast<double>(cells[c].n);
      }
      if (wsum > 0.0) est = acc / wsum;
    }
    est = std::max(est, prev + min_gap);
    x0[2 * cells.size() + static_cast<std::size_t>(f)] = std::log(est - prev);
    prev = est;
  }

  MinimizeOptions mopt = options.minimize;
  mopt.max_iter = std::max(mopt.max_iter, 2000);
  const auto res = minimize(obj, x0, mopt);

  FitResult out;
  out.kappa = layout.kappa(res.x);
  out.n_free_cutoffs = J - 3;
  out.loglik = -res.value * n_total;
  for (std::size_t f = 0; f < static_cast<std::size_t>(J - 3); ++f) {
    const double gap = out.kappa[f + 2] - out.kappa[f + 1];
    if (!(gap > 1e-8)) {
      throw ConvergenceError("fit_joint: free cutoffs collapsed (monotonicity boundary)", res.x,
                             res.value, res.grad_norm, res.iterations);
    }
  }
  std::vector<double> mus, sigmas;
  unpack(res.x, mus, sigmas);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (res.x[2 * c + 1] < -30.0 || res.x[2 * c + 1] > 30.0) {
      throw NonIdentifiedError("fit_joint: scale diverged for cell " + cell_name(cells[c]));
    }
    out.keys.push_back({cells[c].group, cells[c].period});
    CellFit cf;
    cf.params = {mus[c], sigmas[c]};
    std::vector<double> z, g;
    cf.loglik = cell_score_z(cells[c], cf.params, out.kappa, z, g);
    cf.converged = true;
    out.cells.push_back(cf);
  }

  if (options.compute_cov) {
    const auto m = cells.size();
    Eigen::VectorXd theta(static_cast<Eigen::Index>(2 * m + (J - 3)));
    for (std::size_t c = 0; c < m; ++c) {
      theta[static_cast<Eigen::Index>(2 * c)] = mus[c];
      theta[static_cast<Eigen::Index>(2 * c + 1)] = sigmas[c];
    }
    for (int f = 0; f < J - 3; ++f) {
      theta[static_cast<Eigen::Index>(2 * m) + f] = out.kappa[static_cast<std::size_t>(f + 2)];
    }
    auto score = [&](const Eigen::VectorXd& th) {
      std::vector<double> ms(m), ss(m);
      for (std::size_t c = 0; c < m; ++c) {
        ms[c] = th[static_cast<Eigen::Index>(2 * c)];
        ss[c] = th[static_cast<Eigen::Index>(2 * c + 1)];
      }
      std::vector<double> kappa{anchor.k1, anchor.k2};
      for (int f = 0; f < J - 3; ++f) kappa.push_back(th[static_cast<Eigen::Index>(2 * m) + f]);
      Eigen::VectorXd s;
      natural_loglik_score(ms, ss, kappa, &s);
      return s;
    };
    out.cov = invert_information(information_by_differences(score, theta));
    for (std::size_t c = 0; c < m; ++c) {
      out.cells[c].cov = out.cov.block<2, 2>(static_cast<Eigen::Index>(2 * c),
                                             static_cast<Eigen::Index>(2 * c));
    }
  }
  return out;
}

}  // namespace

FitResult fit_cells(const std::vector<CellCounts>& cells, int n_categories,
                    const CutoffAnchor& anchor, const FitOptions& options) {
  Cutoffs::pair(anchor.k1, anchor.k2).validate();
  if (n_categories < 3) throw DomainError("fit_cells: J must be at least 3");
  for (const auto& c : cells) {
    if (static_cast<int>(c.counts.size()) != n_categories) {
      throw DomainError("fit_cells: cell counts have the wrong number of categories");
    }
    check_identifiable(c);
  }
  if (n_categories == 3) return fit_cells_j3(cells, anchor, options);
  return fit_cells_joint(cells, n_categories, anchor, options);
}

FitResult fit_joint(const PanelDataset& data, const CutoffAnchor& anchor,
                    const FitOptions& options) {
  std::vector<CellCounts> cells{cell_counts(data, 0, 0), cell_counts(data, 0, 1),
                                cell_counts(data, 1, 0)};
  FitResult fit = fit_cells(cells, data.n_categories(), anchor, options);
  fit.theta11 = counterfactual_params(fit.cell(0, 0).params, fit.cell(0, 1).params,
                                      fit.cell(1, 0).params);
  return fit;
}

FitResult fit_pretreatment(const PanelDataset& data, const CutoffAnchor& anchor,
                           const FitOptions& options) {
  std::vector<CellCounts> cells{cell_counts(data, 0, 0), cell_counts(data, 0, 1),
                                cell_counts(data, 1, 0), cell_counts(data, 1, 1)};
  return fit_cells(cells, data.n_categories(), anchor, options);
}

}  // namespace orddid
