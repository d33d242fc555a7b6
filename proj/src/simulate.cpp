#include "orddid/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "orddid/error.hpp"
#include "orddid/inference.hpp"
#include "orddid/normal.hpp"
#include "orddid/rng.hpp"

namespace orddid {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_cell(const CellParams& p, const char* name) {
  if (!std::isfinite(p.mu) || !(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw DomainError(std::string("simulation cell ") + name + " needs finite mu and sigma > 0");
  }
}

int categorize(double y, const std::vector<double>& kappa) {
  return static_cast<int>(std::upper_bound(kappa.begin(), kappa.end(), y) - kappa.begin());
}

}  // namespace

CellParams DgpSpec::counterfactual() const {
  return theta11 ? *theta11 : counterfactual_params(theta00, theta01, theta10);
}

void DgpSpec::validate() const {
  check_cell(theta00, "theta00");
  check_cell(theta01, "theta01");
  check_cell(theta10, "theta10");
  check_cell(treated, "treated");
  if (theta11) check_cell(*theta11, "theta11");
  Cutoffs{kappa, {0, 1}}.validate();
  if (kappa.size() < 2) throw DomainError("simulation needs at least two cutoffs");
  if (n < 1) throw DomainError("simulation needs n >= 1");
  if (!(std::fabs(rho) < 1.0)) throw DomainError("rho must lie in (-1, 1)");
}

std::vector<double> default_sim_cutoffs(int J) {
  switch (J) {
    case 3: return {0.0, 1.0};
    case 5: return {-0.5, 0.0, 0.5, 1.0};
    case 7: return {-0.5, -0.2, 0.1, 0.4, 0.7, 1.0};
    default: throw DomainError("no default simulation cutoffs for J = " + std::to_string(J));
  }
}

PanelDataset simulate_panel(const DgpSpec& spec) {
  spec.validate();
  const CellParams post1 = spec.kind == DgpKind::effect ? spec.treated : spec.counterfactual();
  const CellParams cells[2][2] = {{spec.theta00, spec.theta01}, {spec.theta10, post1}};
  const double tail = std::sqrt(1.0 - spec.rho * spec.rho);
  Rng rng(spec.seed);
  std::vector<Record> rec;
  rec.reserve(static_cast<std::size_t>(4 * spec.n));
  std::int32_t unit = 0;
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < spec.n; ++i, ++unit) {
      const double u0 = rng.normal();
      const double u1 = spec.rho * u0 + tail * rng.normal();
      const double u[2] = {u0, u1};
      for (int t = 0; t < 2; ++t) {
        const double y = cells[d][t].mu + cells[d][t].sigma * u[t];
        rec.push_back({unit, t, categorize(y, spec.kappa), static_cast<std::uint8_t>(d), unit});
      }
    }
  }
  PanelDataset::Options opt;
  opt.n_categories = spec.n_categories();
  opt.has_clusters = true;
  return PanelDataset(std::move(rec), opt);
}

std::vector<double> true_effects(const DgpSpec& spec) {
  spec.validate();
  const auto obs = cell_probs(spec.treated, spec.kappa);
  const auto cf = cell_probs(spec.counterfactual(), spec.kappa);
  return effects_from_probs(obs, cf).delta;
}

double true_t_max(const PreTheta& theta) {
  auto f = [&](double v) { return std::fabs(t_value(theta, v)); };
  const int m = 200000;
  double best_v = 0.5, best = -1.0;
  for (int i = 1; i < m; ++i) {
    const double v = static_cast<double>(i) / m;
    const double fv = f(v);
    if (fv > best) {
      best = fv;
      best_v = v;
    }
  }
  // Golden-section refinement on the bracketing cell.
  double a = std::max(1e-12, best_v - 1.0 / m), b = std::min(1.0 - 1e-12, best_v + 1.0 / m);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d)) b = d; else a = c;
  }
  return std::max(best, f(0.5 * (a + b)));
}

double true_t_max(const DgpSpec& spec) {
  spec.validate();
  const CellParams c11 = spec.counterfactual();
  return true_t_max(PreTheta{spec.theta00.mu, spec.theta00.sigma, spec.theta01.mu,
                             spec.theta01.sigma, spec.theta10.mu, spec.theta10.sigma, c11.mu,
                             c11.sigma});
}

namespace {

template <bool Parallel, class Body>
void for_reps(int reps, int threads, Body&& body) {
  if constexpr (Parallel) {
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (int r = 0; r < reps; ++r) body(r);
  } else {
    for (int r = 0; r < reps; ++r) body(r);
  }
}

template <bool Parallel>
McReport estimator_mc(const DgpSpec& spec, const McOptions& o) {
  if (o.reps < 2) throw DomainError("Monte Carlo needs at least 2 repetitions");
  if (o.boot_reps < 0) throw DomainError("boot_reps must be >= 0");
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const auto truth = true_effects(spec);
  const std::size_t m = truth.size();
  const int J = spec.n_categories();
  const CutoffAnchor anchor{spec.kappa[0], spec.kappa[1]};
  const bool with_ci = o.boot_reps > 0;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(o.reps));
  std::vector<std::string> errors(static_cast<std::size_t>(o.reps));
  for_reps<Parallel>(o.reps, o.threads, [&](int r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    row.assign(3 * m, kNaN);
    try {
      DgpSpec s = spec;
      s.seed = stream_seed(o.seed, static_cast<std::uint64_t>(r));
      const PanelDataset data = simulate_panel(s);
      Statistic stat = [anchor, J](const PanelDataset& d) {
        const auto full = did_statistic(d, anchor);
        return std::vector<double>(full.begin() + J, full.end());
      };
      const auto est = stat(data);
      for (std::size_t j = 0; j < m; ++j) row[j] = est[j];
      if (with_ci) {
        BootstrapSpec b;
        b.n_reps = o.boot_reps;
        b.seed = stream_seed(o.seed, static_cast<std::uint64_t>(r), 1);
        b.alpha_levels = {o.alpha};
        const auto boot = serial::block_bootstrap(data, stat, b);
        for (std::size_t j = 0; j < m; ++j) {
          row[m + 2 * j] = boot.intervals.stats[j].intervals[0].lower;
          row[m + 2 * j + 1] = boot.intervals.stats[j].intervals[0].upper;
        }
      }
    } catch (const Error& e) {
      std::fill(row.begin(), row.end(), kNaN);
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  });

  McReport rep;
  rep.reps = o.reps;
  rep.per_estimand.resize(m);
  std::vector<double> sum(m, 0.0), sq(m, 0.0), cover(m, 0.0);
  int ok = 0;
  for (int r = 0; r < o.reps; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!errors[static_cast<std::size_t>(r)].empty()) {
      if (rep.n_failures++ == 0) rep.first_failure = errors[static_cast<std::size_t>(r)];
      continue;
    }
    ++ok;
    for (std::size_t j = 0; j < m; ++j) {
      const double e = row[j] - truth[j];
      sum[j] += e;
      sq[j] += e * e;
      if (with_ci && row[m + 2 * j] <= truth[j] && truth[j] <= row[m + 2 * j + 1]) cover[j] += 1.0;
    }
  }
  if (ok == 0) throw ConvergenceError("every Monte Carlo repetition failed: " + rep.first_failure, {}, kNaN, kNaN, 0);
  for (std::size_t j = 0; j < m; ++j) {
    auto& pe = rep.per_estimand[j];
    pe.truth = truth[j];
    pe.mean_estimate = truth[j] + sum[j] / ok;
    pe.abs_bias = std::fabs(sum[j] / ok);
    pe.rmse = std::sqrt(sq[j] / ok);
    pe.coverage = with_ci ? cover[j] / ok : kNaN;
    rep.abs_bias += pe.abs_bias / static_cast<double>(m);
    rep.rmse += pe.rmse / static_cast<double>(m);
    rep.coverage += pe.coverage / static_cast<double>(m);
  }
  if (!with_ci) {
    for (auto& row : rows) row.resize(m);
  }
  rep.rows = std::move(rows);
  return rep;
}

template <bool Parallel>
EquivalenceMcReport equivalence_mc(const DgpSpec& spec, const EquivalenceMcOptions& o) {
  if (o.reps < 2) throw DomainError("Monte Carlo needs at least 2 repetitions");
  if (o.deltas.empty()) throw DomainError("equivalence Monte Carlo needs at least one delta");
  for (double d : o.deltas) {
    if (!(d > 0.0)) throw DomainError("equivalence threshold delta must be positive");
  }
  EquivalenceMcReport rep;
  rep.t_max = true_t_max(spec);
  rep.deltas = o.deltas;
  rep.reps = o.reps;
  const CutoffAnchor anchor{spec.kappa[0], spec.kappa[1]};
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(o.reps));
  std::vector<std::string> errors(static_cast<std::size_t>(o.reps));
  for_reps<Parallel>(o.reps, o.threads, [&](int r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    row.assign(3, kNaN);
    try {
      DgpSpec s = spec;
      s.kind = DgpKind::pretrend;
      s.seed = stream_seed(o.seed, static_cast<std::uint64_t>(r));
      const PanelDataset data = simulate_panel(s);
      const FitResult fit = fit_pretreatment(data, anchor);
      const double n = static_cast<double>(data.size());
      EquivalenceResult e = t_grid(fit, o.grid);
      e = pointwise_bands(std::move(e), n * theta_covariance(fit), n, o.alpha);
      row = {e.t_max, e.u_max, e.l_min};
    } catch (const Error& e) {
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  });
  rep.rejection_rate.assign(o.deltas.size(), 0.0);
  int ok = 0;
  for (int r = 0; r < o.reps; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!errors[static_cast<std::size_t>(r)].empty()) {
      if (rep.n_failures++ == 0) rep.first_failure = errors[static_cast<std::size_t>(r)];
      continue;
    }
    ++ok;
    for (std::size_t k = 0; k < o.deltas.size(); ++k) {
      if (row[1] < o.deltas[k] && row[2] > -o.deltas[k]) rep.rejection_rate[k] += 1.0;
    }
  }
  if (ok == 0) throw ConvergenceError("every Monte Carlo repetition failed: " + rep.first_failure, {}, kNaN, kNaN, 0);
  for (double& x : rep.rejection_rate) x /= ok;
  rep.rows = std::move(rows);
  return rep;
}

}  // namespace

McReport run_estimator_mc(const DgpSpec& spec, const McOptions& options) {
  return estimator_mc<true>(spec, options);
}

EquivalenceMcReport run_equivalence_mc(const DgpSpec& spec, const EquivalenceMcOptions& options) {
  return equivalence_mc<true>(spec, options);
}

namespace serial {
McReport run_estimator_mc(const DgpSpec& spec, const McOptions& options) {
  return estimator_mc<false>(spec, options);
}
EquivalenceMcReport run_equivalence_mc(const DgpSpec& spec, const EquivalenceMcOptions& options) {
  return equivalence_mc<false>(spec, options);
}
}  // namespace serial

double pt_gap(const std::vector<double>& treated_pre, const std::vector<double>& treated_post,
              const std::vector<double>& control_pre, const std::vector<double>& control_post,
              int threshold) {
  const std::vector<double>* v[4] = {&treated_pre, &treated_post, &control_pre, &control_post};
  const std::size_t J = treated_pre.size();
  for (const auto* p : v) {
    if (p->size() != J || J < 2) throw DomainError("pt_gap: vectors must share a length >= 2");
    double s = 0.0;
    for (double x : *p) {
      if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pt_gap: probabilities must lie in [0,1]");
      s += x;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw DomainError("pt_gap: probabilities must sum to 1");
  }
  if (threshold < 1 || threshold >= static_cast<int>(J)) {
    throw DomainError("pt_gap: threshold must lie in 1..J-1");
  }
  auto upper = [threshold](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(threshold); j < p.size(); ++j) s += p[j];
    return s;
  };
  return (upper(treated_post) - upper(treated_pre)) - (upper(control_post) - upper(control_pre));
}

}  // namespace orddid
