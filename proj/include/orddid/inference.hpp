#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orddid/panel_data.hpp"

namespace orddid {

struct BootstrapSpec {
  int n_reps = 2000;
  std::uint64_t seed = 0;
  std::vector<double> alpha_levels{0.05, 0.10};
  int threads = 0;  // 0: OpenMP default
};

struct Interval {
  double alpha = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Bootstrap summary of one statistic component. Percentile intervals are
/// reported as computed; lower <= point <= upper is not enforced.
struct StatInterval {
  double point = 0.0;
  double se = 0.0;
  std::vector<Interval> intervals;
};

struct IntervalSet {
  std::vector<StatInterval> stats;
};

struct BootstrapResult {
  IntervalSet intervals;
  std::vector<std::vector<double>> replicates;  // n_reps rows; failed rows are NaN
  std::vector<std::uint8_t> failed;
  int n_failures = 0;
  bool reliability_warning = false;  // more than 10% of replicates failed
  std::string first_failure;
};

using Statistic = std::function<std::vector<double>(const PanelDataset&)>;

/// Clusters of a dataset in CSR form, reused across replicates.
class ClusterIndex {
 public:
  explicit ClusterIndex(const PanelDataset& data);
  std::size_t n_clusters() const noexcept { return offsets_.size() - 1; }

  /// Replicate `rep` of the cluster bootstrap: draws n_clusters clusters with
  /// replacement from stream (seed, rep); each copy gets fresh unit ids.
  PanelDataset resample(const PanelDataset& data, std::uint64_t seed, std::uint64_t rep) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> rows_;
  std::vector<std::int32_t> local_unit_;  // per row in rows_ order
  std::vector<std::int32_t> units_in_cluster_;
  std::vector<std::int32_t> treated_units_in_cluster_;
};

/// Cluster (block) bootstrap. Replicate r depends only on (seed, r); the
/// result is identical for any thread count. Throws DomainError with fewer
/// than two clusters.
BootstrapResult block_bootstrap(const PanelDataset& data, const Statistic& statistic,
                                const BootstrapSpec& spec);

/// Summaries from a replicate matrix (rows with NaN are skipped).
IntervalSet summarize_replicates(const std::vector<double>& point,
                                 const std::vector<std::vector<double>>& replicates,
                                 const std::vector<double>& alpha_levels);

/// Type-7 sample quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double q);

namespace serial {
/// Single-threaded reference for block_bootstrap; same results bit for bit.
BootstrapResult block_bootstrap(const PanelDataset& data, const Statistic& statistic,
                                const BootstrapSpec& spec);
}  // namespace serial

}  // namespace orddid
