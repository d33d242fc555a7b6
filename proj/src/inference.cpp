#include "orddid/inference.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>

#include "orddid/error.hpp"
#include "orddid/normal.hpp"
#include "orddid/rng.hpp"

namespace orddid {

double Rng::normal() { return norm_quantile(uniform()); }

ClusterIndex::ClusterIndex(const PanelDataset& data) {
  std::map<std::int32_t, std::vector<std::size_t>> by_cluster;
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    by_cluster[data.resampling_cluster(recs[i])].push_back(i);
  }
  offsets_.push_back(0);
  for (const auto& [id, rows] : by_cluster) {
    std::map<std::int32_t, std::int32_t> local;
    std::int32_t treated = 0;
    for (std::size_t r : rows) {
      auto [it, inserted] = local.emplace(recs[r].unit, static_cast<std::int32_t>(local.size()));
      if (inserted) treated += recs[r].treated;
      rows_.push_back(r);
      local_unit_.push_back(it->second);
    }
    units_in_cluster_.push_back(static_cast<std::int32_t>(local.size()));
    treated_units_in_cluster_.push_back(treated);
    offsets_.push_back(rows_.size());
  }
}

PanelDataset ClusterIndex::resample(const PanelDataset& data, std::uint64_t seed,
                                    std::uint64_t rep) const {
  Rng rng(stream_seed(seed, rep));
  const std::size_t C = n_clusters();
  const std::size_t k = data.n_covariates();
  const auto& recs = data.records();
  std::vector<Record> out;
  out.reserve(recs.size() + recs.size() / 4);
  std::vector<double> cov;
  std::size_t next_unit = 0, treated_units = 0;
  for (std::size_t draw = 0; draw < C; ++draw) {
    const std::size_t c = rng.index(C);
    for (std::size_t p = offsets_[c]; p < offsets_[c + 1]; ++p) {
      Record r = recs[rows_[p]];
      r.unit = static_cast<std::int32_t>(next_unit) + local_unit_[p];
      r.cluster = static_cast<std::int32_t>(draw);
      out.push_back(r);
      for (std::size_t j = 0; j < k; ++j) cov.push_back(data.covariate(rows_[p], j));
    }
    next_unit += static_cast<std::size_t>(units_in_cluster_[c]);
    treated_units += static_cast<std::size_t>(treated_units_in_cluster_[c]);
  }
  return make_resampled(data, std::move(out), std::move(cov), next_unit, treated_units);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IntervalSet summarize_replicates(const std::vector<double>& point,
                                 const std::vector<std::vector<double>>& replicates,
                                 const std::vector<double>& alpha_levels) {
  IntervalSet set;
  for (std::size_t s = 0; s < point.size(); ++s) {
    std::vector<double> col;
    col.reserve(replicates.size());
    for (const auto& row : replicates) {
      if (s < row.size() && std::isfinite(row[s])) col.push_back(row[s]);
    }
    StatInterval si;
    si.point = point[s];
    if (col.size() >= 2) {
      double mean = 0.0;
      for (double x : col) mean += x;
      mean /= static_cast<double>(col.size());
      double ss = 0.0;
      for (double x : col) ss += (x - mean) * (x - mean);
      si.se = std::sqrt(ss / static_cast<double>(col.size() - 1));
    }
    std::sort(col.begin(), col.end());
    for (double a : alpha_levels) {
      si.intervals.push_back({a, sorted_quantile(col, a / 2.0), sorted_quantile(col, 1.0 - a / 2.0)});
    }
    set.stats.push_back(std::move(si));
  }
  return set;
}

namespace {

void validate_spec(const BootstrapSpec& spec) {
  if (spec.n_reps < 1) throw DomainError("bootstrap: n_reps must be at least 1");
  for (double a : spec.alpha_levels) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("bootstrap: alpha levels must lie in (0,1)");
  }
}

template <bool Parallel>
BootstrapResult run_bootstrap(const PanelDataset& data, const Statistic& statistic,
                              const BootstrapSpec& spec) {
  validate_spec(spec);
  const ClusterIndex index(data);
  if (index.n_clusters() < 2) {
    throw DomainError("bootstrap: need at least two clusters, found " +
                      std::to_string(index.n_clusters()));
  }
  const std::vector<double> point = statistic(data);
  const std::size_t width = point.size();
  const auto reps = static_cast<std::size_t>(spec.n_reps);

  BootstrapResult out;
  out.replicates.assign(reps, std::vector<double>(width, std::numeric_limits<double>::quiet_NaN()));
  out.failed.assign(reps, 0);
  std::vector<std::string> messages(reps);
  std::exception_ptr fatal;

  auto run_one = [&](std::size_t r) {
    try {
      const PanelDataset sample = index.resample(data, spec.seed, r);
      auto value = statistic(sample);
      if (value.size() != width) throw DomainError("statistic changed length across replicates");
      out.replicates[r] = std::move(value);
    } catch (const Error& e) {
      out.failed[r] = 1;
      messages[r] = e.what();
    }
  };

  if constexpr (Parallel) {
    const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (long long r = 0; r < static_cast<long long>(reps); ++r) {
      try {
        run_one(static_cast<std::size_t>(r));
      } catch (...) {
#pragma omp critical(orddid_bootstrap_fatal)
        if (!fatal) fatal = std::current_exception();
      }
    }
  } else {
    for (std::size_t r = 0; r < reps; ++r) {
      try {
        run_one(r);
      } catch (...) {
        if (!fatal) fatal = std::current_exception();
      }
    }
  }
  if (fatal) std::rethrow_exception(fatal);

  for (std::size_t r = 0; r < reps; ++r) {
    if (out.failed[r]) {
      ++out.n_failures;
      if (out.first_failure.empty()) out.first_failure = messages[r];
    }
  }
  out.reliability_warning = out.n_failures * 10 > spec.n_reps;
  out.intervals = summarize_replicates(point, out.replicates, spec.alpha_levels);
  return out;
}

}  // namespace

BootstrapResult block_bootstrap(const PanelDataset& data, const Statistic& statistic,
                                const BootstrapSpec& spec) {
  return run_bootstrap<true>(data, statistic, spec);
}

namespace serial {
BootstrapResult block_bootstrap(const PanelDataset& data, const Statistic& statistic,
                                const BootstrapSpec& spec) {
  return run_bootstrap<false>(data, statistic, spec);
}
}  // namespace serial

}  // namespace orddid
