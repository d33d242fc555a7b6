#include "orddid/panel_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include "orddid/error.hpp"

namespace orddid {

namespace {

std::vector<int> distinct_periods(const std::vector<Record>& records) {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.period);
  return {s.begin(), s.end()};
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA"; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc() && ptr == end) return v;
  // Accept integral decimals such as "2.0".
  double d = 0.0;
  auto [p2, ec2] = std::from_chars(s.data(), end, d);
  if (ec2 == std::errc() && p2 == end && d == static_cast<double>(static_cast<long long>(d))) {
    return static_cast<long long>(d);
  }
  return std::nullopt;
}

std::optional<double> parse_double(const std::string& s) {
  double d = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, d);
  if (ec == std::errc() && ptr == end) return d;
  return std::nullopt;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

PanelDataset::PanelDataset(std::vector<Record> records, Options options,
                           std::vector<double> covariates)
    : records_(std::move(records)),
      n_categories_(options.n_categories),
      has_clusters_(options.has_clusters),
      covariate_names_(std::move(options.covariate_names)),
      covariates_(std::move(covariates)) {
  if (n_categories_ < 3) {
    throw DataError("outcome must have at least 3 categories, got " +
                    std::to_string(n_categories_));
  }
  if (covariates_.size() != records_.size() * covariate_names_.size()) {
    throw DataError("covariate matrix size does not match records x covariates");
  }
  for (double x : covariates_) {
    if (!std::isfinite(x)) throw DataError("covariate values must be finite");
  }
  std::unordered_map<std::int32_t, std::uint8_t> group_of_unit;
  std::set<std::pair<std::int32_t, std::int32_t>> seen;
  std::size_t treated_units = 0;
  for (const auto& r : records_) {
    if (r.outcome < 0 || r.outcome >= n_categories_) {
      throw DataError("outcome " + std::to_string(r.outcome) + " of unit " +
                      std::to_string(r.unit) + " outside [0, J)");
    }
    if (r.treated > 1) throw DataError("treatment flag must be 0 or 1");
    if (!seen.emplace(r.unit, r.period).second) {
      throw DataError("duplicate record for unit " + std::to_string(r.unit) +
                      " in period " + std::to_string(r.period));
    }
    auto [it, inserted] = group_of_unit.emplace(r.unit, r.treated);
    if (inserted) {
      treated_units += r.treated;
    } else if (it->second != r.treated) {
      throw DataError("treatment group changes within unit " + std::to_string(r.unit));
    }
  }
  n_units_ = group_of_unit.size();
  n_treated_units_ = treated_units;
  periods_ = distinct_periods(records_);
}

PanelDataset::PanelDataset(Unchecked, std::vector<Record> records, Options options,
                           std::vector<double> covariates, std::size_t n_units,
                           std::size_t n_treated_units)
    : records_(std::move(records)),
      n_categories_(options.n_categories),
      has_clusters_(options.has_clusters),
      covariate_names_(std::move(options.covariate_names)),
      covariates_(std::move(covariates)),
      n_units_(n_units),
      n_treated_units_(n_treated_units) {
  periods_ = distinct_periods(records_);
}

PanelDataset make_resampled(const PanelDataset& like, std::vector<Record> records,
                            std::vector<double> covariates, std::size_t n_units,
                            std::size_t n_treated_units) {
  PanelDataset::Options opt{like.n_categories(), like.has_clusters(), like.covariate_names()};
  PanelDataset out(PanelDataset::Unchecked{}, std::move(records), std::move(opt),
                   std::move(covariates), n_units, n_treated_units);
  out.category_codes = like.category_codes;
  return out;
}

std::size_t PanelDataset::n_clusters() const {
  std::set<std::int32_t> s;
  for (const auto& r : records_) s.insert(resampling_cluster(r));
  return s.size();
}

std::vector<double> CellCounts::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    f[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
  }
  return f;
}

CellCounts cell_counts(const PanelDataset& data, int d, int t) {
  CellCounts c;
  c.group = d;
  c.period = t;
  c.counts.assign(static_cast<std::size_t>(data.n_categories()), 0);
  for (const auto& r : data.records()) {
    if (r.treated == d && r.period == t) {
      ++c.counts[static_cast<std::size_t>(r.outcome)];
      ++c.n;
    }
  }
  if (c.n == 0) {
    throw EmptyCellError("cell (group " + std::to_string(d) + ", period " +
                         std::to_string(t) + ") has no records");
  }
  return c;
}

PanelDataset select_periods(const PanelDataset& data, int first, int second) {
  if (first == second) throw DomainError("period selection requires two distinct periods");
  const auto& ps = data.periods();
  for (int p : {first, second}) {
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) {
      throw DomainError("unknown period " + std::to_string(p));
    }
  }
  std::vector<Record> out;
  std::vector<double> cov;
  const std::size_t k = data.n_covariates();
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    Record r = recs[i];
    if (r.period != first && r.period != second) continue;
    r.period = r.period == first ? 0 : 1;
    out.push_back(r);
    for (std::size_t c = 0; c < k; ++c) cov.push_back(data.covariate(i, c));
  }
  PanelDataset result(std::move(out),
                      {data.n_categories(), data.has_clusters(), data.covariate_names()},
                      std::move(cov));
  result.unit_labels = data.unit_labels;
  result.cluster_labels = data.cluster_labels;
  result.category_codes = data.category_codes;
  result.drop_report = data.drop_report;
  return result;
}

PanelDataset subset_pretreatment(const PanelDataset& data, std::pair<int, int> pre_periods) {
  return select_periods(data, pre_periods.first, pre_periods.second);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

PanelDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("input file '" + path + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column '" + name + "' in " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_unit = column(schema.unit);
  const std::size_t c_period = column(schema.period);
  const std::size_t c_outcome = column(schema.outcome);
  const std::size_t c_treat = column(schema.treat);
  const bool clustered = !schema.cluster.empty();
  const std::size_t c_cluster = clustered ? column(schema.cluster) : 0;
  std::vector<std::size_t> c_cov;
  for (const auto& name : schema.covariates) c_cov.push_back(column(name));
  std::vector<std::pair<std::size_t, std::string>> filters;
  for (const auto& [col, val] : schema.filters) filters.emplace_back(column(col), val);

  struct Raw {
    std::string unit, cluster;
    long long period, outcome, treat;
    std::vector<double> cov;
  };
  std::vector<Raw> rows;
  DropReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++report.rows_read;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    bool keep = true;
    for (const auto& [col, val] : filters) keep = keep && f[col] == val;
    if (!keep) {
      ++report.rows_filtered;
      continue;
    }
    bool missing = false;
    auto check = [&](std::size_t col, const std::string& name) {
      if (is_missing(f[col])) {
        ++report.missing_by_column[name];
        missing = true;
      }
    };
    check(c_unit, schema.unit);
    check(c_period, schema.period);
    check(c_outcome, schema.outcome);
    check(c_treat, schema.treat);
    if (clustered) check(c_cluster, schema.cluster);
    for (std::size_t k = 0; k < c_cov.size(); ++k) check(c_cov[k], schema.covariates[k]);
    if (missing) {
      ++report.rows_dropped;
      continue;
    }
    Raw r;
    r.unit = f[c_unit];
    r.cluster = clustered ? f[c_cluster] : std::string{};
    auto need_int = [&](std::size_t col, const std::string& name) {
      auto v = parse_int(f[col]);
      if (!v) {
        throw DataError("line " + std::to_string(line_no) + ": column '" + name +
                        "' value '" + f[col] + "' is not an integer");
      }
      return *v;
    };
    r.period = need_int(c_period, schema.period);
    r.outcome = need_int(c_outcome, schema.outcome);
    r.treat = need_int(c_treat, schema.treat);
    if (r.treat != 0 && r.treat != 1) {
      throw DataError("line " + std::to_string(line_no) + ": treatment must be 0 or 1");
    }
    for (std::size_t k = 0; k < c_cov.size(); ++k) {
      auto v = parse_double(f[c_cov[k]]);
      if (!v || !std::isfinite(*v)) {
        throw DataError("line " + std::to_string(line_no) + ": covariate '" +
                        schema.covariates[k] + "' is not numeric");
      }
      r.cov.push_back(*v);
    }
    rows.push_back(std::move(r));
  }

  std::set<long long> codes;
  for (const auto& r : rows) codes.insert(r.outcome);
  if (codes.size() < 3) {
    throw DataError("outcome column '" + schema.outcome + "' has " +
                    std::to_string(codes.size()) + " distinct values; need J >= 3");
  }
  std::vector<long long> code_list(codes.begin(), codes.end());
  std::map<long long, int> code_index;
  for (std::size_t j = 0; j < code_list.size(); ++j) code_index[code_list[j]] = static_cast<int>(j);

  std::unordered_map<std::string, std::int32_t> unit_ids, cluster_ids;
  std::vector<std::string> unit_labels, cluster_labels;
  std::vector<Record> records;
  std::vector<double> cov;
  std::set<std::pair<std::int32_t, long long>> seen;
  records.reserve(rows.size());
  for (const auto& r : rows) {
    auto [uit, unew] = unit_ids.emplace(r.unit, static_cast<std::int32_t>(unit_labels.size()));
    if (unew) unit_labels.push_back(r.unit);
    if (!seen.emplace(uit->second, r.period).second) {
      throw DataError("duplicate record: unit '" + r.unit + "' appears more than once in period " +
                      std::to_string(r.period));
    }
    Record rec;
    rec.unit = uit->second;
    rec.period = static_cast<std::int32_t>(r.period);
    rec.outcome = code_index.at(r.outcome);
    rec.treated = static_cast<std::uint8_t>(r.treat);
    if (clustered) {
      auto [cit, cnew] =
          cluster_ids.emplace(r.cluster, static_cast<std::int32_t>(cluster_labels.size()));
      if (cnew) cluster_labels.push_back(r.cluster);
      rec.cluster = cit->second;
    }
    records.push_back(rec);
    cov.insert(cov.end(), r.cov.begin(), r.cov.end());
  }

  PanelDataset data(std::move(records),
                    {static_cast<int>(code_list.size()), clustered, schema.covariates},
                    std::move(cov));
  data.unit_labels = std::move(unit_labels);
  data.cluster_labels = std::move(cluster_labels);
  data.category_codes = std::move(code_list);
  data.drop_report = report;
  return data;
}

void write_csv(const PanelDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "id,time,y,treat";
  if (data.has_clusters()) out << ",cluster";
  for (const auto& name : data.covariate_names()) out << ',' << quote_if_needed(name);
  out << '\n';
  out << std::setprecision(17);
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const auto u = static_cast<std::size_t>(r.unit);
    out << quote_if_needed(u < data.unit_labels.size() ? data.unit_labels[u] : std::to_string(r.unit))
        << ',' << r.period << ','
        << (data.category_codes.empty()
                ? static_cast<long long>(r.outcome)
                : data.category_codes[static_cast<std::size_t>(r.outcome)])
        << ',' << static_cast<int>(r.treated);
    if (data.has_clusters()) {
      const auto c = static_cast<std::size_t>(r.cluster);
      out << ',' << quote_if_needed(c < data.cluster_labels.size() ? data.cluster_labels[c]
                                                                  : std::to_string(r.cluster));
    }
    for (std::size_t k = 0; k < data.n_covariates(); ++k) out << ',' << data.covariate(i, k);
    out << '\n';
  }
}

}  // namespace orddid
