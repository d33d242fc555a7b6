#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orddid {

/// One (unit, period) observation. Units and clusters are dense integer ids;
/// their original tokens live in PanelDataset's label tables.
struct Record {
  std::int32_t unit = 0;
  std::int32_t period = 0;
  std::int32_t outcome = 0;  // category index in [0, J)
  std::uint8_t treated = 0;  // treatment-group flag D_i
  std::int32_t cluster = 0;
};

struct DropReport {
  std::size_t rows_read = 0;
  std::size_t rows_filtered = 0;  // excluded by --filter, not counted as drops
  std::size_t rows_dropped = 0;   // missing values in a required column
  std::map<std::string, std::size_t> missing_by_column;
};

/// Validated long-format panel. Immutable after construction.
class PanelDataset {
 public:
  struct Options {
    int n_categories = 0;
    bool has_clusters = false;
    std::vector<std::string> covariate_names;
  };

  /// Validates: J >= 3, outcome in range, one record per (unit, period),
  /// treated constant within unit. `covariates` is row-major
  /// records x covariate_names.size().
  PanelDataset(std::vector<Record> records, Options options,
               std::vector<double> covariates = {});

  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  int n_categories() const noexcept { return n_categories_; }
  bool has_clusters() const noexcept { return has_clusters_; }
  const std::vector<int>& periods() const noexcept { return periods_; }

  std::size_t n_covariates() const noexcept { return covariate_names_.size(); }
  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }
  double covariate(std::size_t row, std::size_t k) const {
    return covariates_[row * covariate_names_.size() + k];
  }
  const std::vector<double>& covariate_matrix() const noexcept { return covariates_; }

  /// Cluster used for resampling: declared cluster, or the unit itself.
  std::int32_t resampling_cluster(const Record& r) const noexcept {
    return has_clusters_ ? r.cluster : r.unit;
  }

  std::size_t n_units() const noexcept { return n_units_; }
  std::size_t n_units_in_group(int d) const noexcept { return d ? n_treated_units_ : n_units_ - n_treated_units_; }
  std::size_t n_clusters() const;

  // Label tables (optional; filled by load_csv).
  std::vector<std::string> unit_labels;
  std::vector<std::string> cluster_labels;
  std::vector<long long> category_codes;  // original code of category j
  DropReport drop_report;

 private:
  struct Unchecked {};
  PanelDataset(Unchecked, std::vector<Record> records, Options options,
               std::vector<double> covariates, std::size_t n_units,
               std::size_t n_treated_units);
  friend PanelDataset make_resampled(const PanelDataset&, std::vector<Record>,
                                     std::vector<double>, std::size_t, std::size_t);

  std::vector<Record> records_;
  int n_categories_ = 0;
  bool has_clusters_ = false;
  std::vector<int> periods_;
  std::vector<std::string> covariate_names_;
  std::vector<double> covariates_;
  std::size_t n_units_ = 0;
  std::size_t n_treated_units_ = 0;
};

/// Builds a dataset from records that are valid by construction (bootstrap
/// replicates). Skips the per-record validation pass.
PanelDataset make_resampled(const PanelDataset& like, std::vector<Record> records,
                            std::vector<double> covariates, std::size_t n_units,
                            std::size_t n_treated_units);

struct CellCounts {
  int group = 0;
  int period = 0;
  std::vector<long long> counts;
  long long n = 0;

  std::vector<double> frequencies() const;
};

/// Counts of each category in cell (d, t). Throws EmptyCellError if empty.
CellCounts cell_counts(const PanelDataset& data, int d, int t);

/// Restricts to two distinct periods and relabels them (first -> 0,
/// second -> 1). Throws DomainError for unknown or equal periods.
PanelDataset select_periods(const PanelDataset& data, int first, int second);

/// The two pre-treatment periods used by the equivalence diagnostic.
PanelDataset subset_pretreatment(const PanelDataset& data, std::pair<int, int> pre_periods);

/// Column mapping for load_csv. Empty cluster means no clustering declared.
struct CsvSchema {
  std::string unit = "id";
  std::string period = "time";
  std::string outcome = "y";
  std::string treat = "treat";
  std::string cluster;
  std::vector<std::string> covariates;
  std::vector<std::pair<std::string, std::string>> filters;  // keep rows where col == value
};

PanelDataset load_csv(const std::string& path, const CsvSchema& schema);

/// Writes columns id,time,y,treat[,cluster][,covariates...] using the stored
/// labels/codes, so load_csv with the default schema reads it back.
void write_csv(const PanelDataset& data, const std::string& path);

/// Splits one CSV line honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace orddid
