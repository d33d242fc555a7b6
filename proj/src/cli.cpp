#include "orddid/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "orddid/bounds.hpp"
#include "orddid/covariate_model.hpp"
#include "orddid/equivalence.hpp"
#include "orddid/error.hpp"
#include "orddid/golden.hpp"
#include "orddid/identification.hpp"
#include "orddid/inference.hpp"
#include "orddid/simulate.hpp"

namespace orddid {
namespace {

using json = nlohmann::ordered_json;
constexpr int kSchemaVersion = 1;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (const auto& item : split(s, ',')) v.push_back(parse_double(item, what));
  if (v.empty()) throw ConfigError(what + " is empty");
  return v;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct DataArgs {
  std::string input;
  std::string unit = "id";
  std::string outcome = "y";
  std::string time = "time";
  std::string treat = "treat";
  std::string cluster;
  std::vector<std::string> filters;
  std::string covariates;
  std::string cut = "0,1";
  std::string output;
  std::uint64_t seed = 1;
  int threads = 0;

  CsvSchema schema() const {
    CsvSchema s;
    s.unit = unit;
    s.period = time;
    s.outcome = outcome;
    s.treat = treat;
    s.cluster = cluster;
    if (!covariates.empty()) s.covariates = split(covariates, ',');
    for (const auto& f : filters) {
      const auto eq = f.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--filter expects column=value, got '" + f + "'");
      }
      s.filters.emplace_back(f.substr(0, eq), f.substr(eq + 1));
    }
    return s;
  }

  CutoffAnchor anchor() const {
    const auto k = parse_doubles(cut, "--cut");
    if (k.size() != 2) throw ConfigError("--cut expects two values, e.g. 0,1");
    if (!(k[1] > k[0])) throw ConfigError("--cut values must be increasing");
    return {k[0], k[1]};
  }

  json to_json() const {
    json j;
    j["input"] = input;
    j["columns"] = {{"unit", unit}, {"outcome", outcome}, {"time", time}, {"treat", treat},
                    {"cluster", cluster}, {"covariates", covariates}};
    j["filters"] = filters;
    j["cut"] = parse_doubles(cut, "--cut");
    j["seed"] = seed;
    return j;
  }
};

void add_data_options(CLI::App* app, DataArgs& a) {
  app->add_option("--input", a.input, "Long-format CSV panel")->required();
  app->add_option("--unit", a.unit, "Unit id column");
  app->add_option("--outcome", a.outcome, "Ordinal outcome column");
  app->add_option("--time", a.time, "Period column");
  app->add_option("--treat", a.treat, "Treatment group column (0/1)");
  app->add_option("--cluster", a.cluster, "Cluster column for the block bootstrap");
  app->add_option("--filter", a.filters, "Keep rows where column=value (repeatable)");
  app->add_option("--cut", a.cut, "Anchored cutoffs kappa1,kappa2");
  app->add_option("--seed", a.seed, "Master seed");
  app->add_option("--output", a.output, "Result document path (JSON)");
  app->add_option("--threads", a.threads, "Worker threads (0: default)");
}

json data_summary(const PanelDataset& raw, const PanelDataset& d) {
  json j;
  j["n_records"] = d.size();
  j["n_units"] = d.n_units();
  j["n_treated_units"] = d.n_units_in_group(1);
  j["n_control_units"] = d.n_units_in_group(0);
  j["n_clusters"] = d.n_clusters();
  j["n_categories"] = d.n_categories();
  j["category_codes"] = raw.category_codes;
  j["rows_read"] = raw.drop_report.rows_read;
  j["rows_filtered"] = raw.drop_report.rows_filtered;
  j["rows_dropped_missing"] = raw.drop_report.rows_dropped;
  return j;
}

json fit_json(const FitResult& fit) {
  json cells = json::array();
  for (std::size_t c = 0; c < fit.cells.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(2 * c);
    const bool has_cov = fit.cov.rows() > i + 1;
    cells.push_back({{"group", fit.keys[c].group},
                     {"period", fit.keys[c].period},
                     {"mu", fit.cells[c].params.mu},
                     {"sigma", fit.cells[c].params.sigma},
                     {"se_mu", has_cov ? std::sqrt(fit.cov(i, i)) : NAN},
                     {"se_sigma", has_cov ? std::sqrt(fit.cov(i + 1, i + 1)) : NAN}});
  }
  json j;
  j["cells"] = cells;
  j["cutoffs"] = fit.kappa;
  j["n_free_cutoffs"] = fit.n_free_cutoffs;
  j["loglik"] = fit.loglik;
  if (fit.theta11) j["theta11"] = {{"mu", fit.theta11->mu}, {"sigma", fit.theta11->sigma}};
  return j;
}

std::vector<std::string> stat_names(int J) {
  std::vector<std::string> n;
  for (int j = 0; j < J; ++j) n.push_back("zeta_" + std::to_string(j));
  for (int j = 1; j < J; ++j) n.push_back("Delta_" + std::to_string(j));
  return n;
}

std::string sibling(const std::string& output, const std::string& suffix) {
  std::filesystem::path p(output);
  p.replace_extension("");
  return p.string() + suffix;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

void emit(const json& doc, const std::string& output, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    write_text(output, text);
    out << output << "\n";
  }
}

std::string rows_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string s = "rep";
  for (const auto& h : header) s += "," + h;
  s += "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    s += std::to_string(r);
    for (double x : rows[r]) s += "," + fmt(x);
    s += "\n";
  }
  return s;
}

// ---- fit / bounds ---------------------------------------------------------

struct FitArgs {
  DataArgs data;
  int pre = 0;
  int post = 1;
  int boot = 0;
  std::string alpha = "0.05,0.10";
};

int cmd_fit(const FitArgs& a, bool bounds_only, std::ostream& out) {
  const CsvSchema schema = a.data.schema();
  const CutoffAnchor anchor = a.data.anchor();
  const auto alphas = parse_doubles(a.alpha, "--alpha");
  for (double al : alphas) {
    if (!(al > 0.0 && al < 1.0)) throw ConfigError("--alpha values must lie in (0,1)");
  }
  if (a.boot < 0) throw ConfigError("--boot must be >= 0");
  if (a.boot > 0 && a.data.cluster.empty()) {
    throw ConfigError("--cluster is required when a bootstrap is requested (--boot > 0)");
  }
  const PanelDataset raw = load_csv(a.data.input, schema);
  const PanelDataset data = select_periods(raw, a.pre, a.post);
  const DidEstimate est = estimate_did(data, anchor);
  const int J = data.n_categories();

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = bounds_only ? "bounds" : "fit";
  json cfg = a.data.to_json();
  cfg["pre"] = a.pre;
  cfg["post"] = a.post;
  if (!bounds_only) {
    cfg["boot"] = a.boot;
    cfg["alpha"] = alphas;
  }
  doc["config"] = cfg;
  doc["data"] = data_summary(raw, data);
  doc["fit"] = fit_json(est.fit);
  doc["counterfactual_probs"] = est.effects.counterfactual;
  doc["observed_treated_probs"] = est.effects.observed_treated;
  doc["zeta"] = est.effects.zeta;
  doc["delta"] = est.effects.delta;

  if (bounds_only) {
    const auto eta = eta_bounds(est.effects.counterfactual, est.effects.delta);
    const auto tau = tau_bounds(est.effects.counterfactual, est.effects.delta);
    doc["eta_bounds"] = {{"lower", eta.lower}, {"upper", eta.upper}, {"clamped", eta.clamped}};
    doc["tau_bounds"] = {{"lower", tau.lower}, {"upper", tau.upper}, {"clamped", tau.clamped}};
    emit(doc, a.data.output, out);
    return kExitOk;
  }

  if (data.n_covariates() > 0) {
    const CovariateFit cf = fit_covariate_model(data, anchor);
    doc["covariate_model"] = {
        {"covariates", data.covariate_names()},
        {"gamma0", cf.gamma.gamma0},
        {"gamma1", cf.gamma.gamma1},
        {"cutoffs", cf.kappa},
        {"delta", covariate_effects(cf.gamma, data, cf.kappa)},
        {"note", "covariate-adjusted Delta contrasts D=1 with D=0 at t=1 and does not impose "
                 "distributional parallel trends; it is not the counterfactual-based Delta above"}};
  }

  if (a.boot > 0) {
    BootstrapSpec spec;
    spec.n_reps = a.boot;
    spec.seed = a.data.seed;
    spec.alpha_levels = alphas;
    spec.threads = a.data.threads;
    const Statistic stat = [anchor](const PanelDataset& d) { return did_statistic(d, anchor); };
    const BootstrapResult boot = block_bootstrap(data, stat, spec);
    const auto names = stat_names(J);
    json stats = json::array();
    for (std::size_t k = 0; k < boot.intervals.stats.size(); ++k) {
      const auto& s = boot.intervals.stats[k];
      json iv = json::array();
      for (const auto& i : s.intervals) {
        iv.push_back({{"alpha", i.alpha}, {"lower", i.lower}, {"upper", i.upper}});
      }
      stats.push_back({{"name", names[k]}, {"point", s.point}, {"se", s.se}, {"intervals", iv}});
    }
    doc["bootstrap"] = {{"reps", a.boot},
                        {"seed", a.data.seed},
                        {"failures", boot.n_failures},
                        {"reliability_warning", boot.reliability_warning},
                        {"first_failure", boot.first_failure},
                        {"stats", stats}};
    if (!a.data.output.empty()) {
      const std::string path = sibling(a.data.output, "_replicates.csv");
      write_text(path, rows_csv(names, boot.replicates));
      doc["bootstrap"]["replicates_csv"] = std::filesystem::path(path).filename().string();
    }
  }
  emit(doc, a.data.output, out);
  return kExitOk;
}

// ---- equivtest ------------------------------------------------------------

struct EquivArgs {
  DataArgs data;
  int pre1 = 0;
  int pre2 = 1;
  std::string delta = "auto";
  std::string grid = "0.001:0.999:0.01";
  double alpha = 0.05;
  std::string omega = "information";
  int boot = 0;
  bool rounded = false;
};

int cmd_equivtest(const EquivArgs& a, std::ostream& out) {
  EquivalenceOptions opt;
  opt.anchor = a.data.anchor();
  opt.grid = GridSpec::parse(a.grid);
  opt.alpha = a.alpha;
  opt.rounded_constant = a.rounded;
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw ConfigError("--alpha must lie in (0,1)");
  if (a.delta != "auto") {
    const double d = parse_double(a.delta, "--delta");
    if (!(d > 0.0)) throw DomainError("equivalence threshold --delta must be positive");
    opt.delta = d;
  }
  if (a.omega == "bootstrap") {
    if (a.boot < 2) throw ConfigError("--omega bootstrap needs --boot >= 2");
    if (a.data.cluster.empty()) throw ConfigError("--cluster is required when a bootstrap is requested");
    opt.omega = OmegaSource::bootstrap;
    opt.bootstrap.n_reps = a.boot;
    opt.bootstrap.seed = a.data.seed;
    opt.bootstrap.threads = a.data.threads;
  } else if (a.omega != "information") {
    throw ConfigError("--omega must be 'information' or 'bootstrap'");
  }
  const PanelDataset raw = load_csv(a.data.input, a.data.schema());
  const PanelDataset data = subset_pretreatment(raw, {a.pre1, a.pre2});
  const EquivalenceResult r = run_equivalence_test(data, opt);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "equivtest";
  json cfg = a.data.to_json();
  cfg["pre1"] = a.pre1;
  cfg["pre2"] = a.pre2;
  cfg["delta"] = a.delta;
  cfg["grid"] = a.grid;
  cfg["alpha"] = a.alpha;
  cfg["omega"] = a.omega;
  cfg["boot"] = a.boot;
  cfg["rounded_delta_constant"] = a.rounded;
  doc["config"] = cfg;
  doc["data"] = data_summary(raw, data);
  doc["theta"] = r.theta;
  doc["n"] = r.n;
  doc["t_max"] = r.t_max;
  doc["u_max"] = r.u_max;
  doc["l_min"] = r.l_min;
  doc["delta"] = r.delta;
  doc["reject_nonequivalence"] = r.reject;
  doc["p_value"] = r.p_value;
  doc["quantile_clamped"] = r.saturated;
  doc["grid"] = {{"v", r.grid}, {"t_hat", r.t_hat}, {"lower", r.lower}, {"upper", r.upper}, {"se", r.se}};
  if (!a.data.output.empty()) {
    std::string csv = "v,t_hat,lower,upper,se\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      csv += fmt(r.grid[i]) + "," + fmt(r.t_hat[i]) + "," + fmt(r.lower[i]) + "," +
             fmt(r.upper[i]) + "," + fmt(r.se[i]) + "\n";
    }
    const std::string path = sibling(a.data.output, "_grid.csv");
    write_text(path, csv);
    doc["grid_csv"] = std::filesystem::path(path).filename().string();
  }
  emit(doc, a.data.output, out);
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

CellParams cell_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("config key '" + key + "' must be [mu, sigma]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json cell_json(const CellParams& c) { return json::array({c.mu, c.sigma}); }

struct SimArgs {
  std::string config;
  std::string output;
  int threads = 0;
};

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  std::ifstream in(a.config);
  if (!in) throw ConfigError("cannot open config " + a.config);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "mode", "theta00", "theta01", "theta10", "theta11", "treated", "J", "cutoffs", "n",
      "seed", "rho", "reps", "boot_reps", "alpha", "deltas", "delta_offsets", "grid"};
  for (const auto& [key, _] : cfg.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  const std::string mode = cfg.value("mode", "estimator");
  DgpSpec spec;
  try {
    if (cfg.contains("theta00")) spec.theta00 = cell_from(cfg["theta00"], "theta00");
    if (cfg.contains("theta01")) spec.theta01 = cell_from(cfg["theta01"], "theta01");
    if (cfg.contains("theta10")) spec.theta10 = cell_from(cfg["theta10"], "theta10");
    if (cfg.contains("theta11")) spec.theta11 = cell_from(cfg["theta11"], "theta11");
    if (cfg.contains("treated")) spec.treated = cell_from(cfg["treated"], "treated");
    if (cfg.contains("cutoffs")) {
      spec.kappa = cfg["cutoffs"].get<std::vector<double>>();
    } else {
      spec.kappa = default_sim_cutoffs(cfg.value("J", 3));
    }
    spec.n = cfg.value("n", 1000);
    spec.seed = cfg.value("seed", std::uint64_t{1});
    spec.rho = cfg.value("rho", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  spec.validate();

  json resolved;
  resolved["mode"] = mode;
  resolved["theta00"] = cell_json(spec.theta00);
  resolved["theta01"] = cell_json(spec.theta01);
  resolved["theta10"] = cell_json(spec.theta10);
  if (spec.theta11) resolved["theta11"] = cell_json(*spec.theta11);
  resolved["treated"] = cell_json(spec.treated);
  resolved["cutoffs"] = spec.kappa;
  resolved["n"] = spec.n;
  resolved["seed"] = spec.seed;
  resolved["rho"] = spec.rho;

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "simulate";

  if (mode == "panel") {
    if (a.output.empty()) throw ConfigError("panel mode needs --output for the CSV");
    doc["config"] = resolved;
    write_csv(simulate_panel(spec), a.output);
    out << a.output << "\n";
    return kExitOk;
  }
  if (mode == "estimator") {
    McOptions o;
    o.reps = cfg.value("reps", 500);
    o.boot_reps = cfg.value("boot_reps", 500);
    o.alpha = cfg.value("alpha", 0.10);
    o.seed = spec.seed;
    o.threads = a.threads;
    resolved["reps"] = o.reps;
    resolved["boot_reps"] = o.boot_reps;
    resolved["alpha"] = o.alpha;
    doc["config"] = resolved;
    const McReport r = run_estimator_mc(spec, o);
    const auto cf = spec.counterfactual();
    doc["counterfactual"] = cell_json(cf);
    doc["reps"] = r.reps;
    doc["failures"] = r.n_failures;
    doc["first_failure"] = r.first_failure;
    doc["abs_bias"] = r.abs_bias;
    doc["rmse"] = r.rmse;
    doc["coverage"] = r.coverage;
    json per = json::array();
    for (std::size_t j = 0; j < r.per_estimand.size(); ++j) {
      const auto& e = r.per_estimand[j];
      per.push_back({{"name", "Delta_" + std::to_string(j + 1)},
                     {"truth", e.truth},
                     {"mean_estimate", e.mean_estimate},
                     {"abs_bias", e.abs_bias},
                     {"rmse", e.rmse},
                     {"coverage", e.coverage}});
    }
    doc["per_estimand"] = per;
    if (!a.output.empty()) {
      std::vector<std::string> header;
      const std::size_t m = r.per_estimand.size();
      for (std::size_t j = 1; j <= m; ++j) header.push_back("Delta_" + std::to_string(j));
      if (o.boot_reps > 0) {
        for (std::size_t j = 1; j <= m; ++j) {
          header.push_back("lower_" + std::to_string(j));
          header.push_back("upper_" + std::to_string(j));
        }
      }
      const std::string path = sibling(a.output, "_reps.csv");
      write_text(path, rows_csv(header, r.rows));
      doc["reps_csv"] = std::filesystem::path(path).filename().string();
    }
    emit(doc, a.output, out);
    return kExitOk;
  }
  if (mode == "equivalence") {
    EquivalenceMcOptions o;
    o.reps = cfg.value("reps", 500);
    o.alpha = cfg.value("alpha", 0.05);
    o.seed = spec.seed;
    o.threads = a.threads;
    if (cfg.contains("grid")) o.grid = GridSpec::parse(cfg["grid"].get<std::string>());
    const double tmax = true_t_max(spec);
    if (cfg.contains("deltas")) {
      o.deltas = cfg["deltas"].get<std::vector<double>>();
    } else {
      const auto offs = cfg.value("delta_offsets", std::vector<double>{-0.05, -0.01, 0.0, 0.01, 0.05, 0.10});
      for (double off : offs) o.deltas.push_back(tmax + off);
      resolved["delta_offsets"] = offs;
    }
    resolved["reps"] = o.reps;
    resolved["alpha"] = o.alpha;
    resolved["grid"] = cfg.value("grid", std::string("0.001:0.999:0.01"));
    doc["config"] = resolved;
    const EquivalenceMcReport r = run_equivalence_mc(spec, o);
    doc["t_max"] = r.t_max;
    doc["reps"] = r.reps;
    doc["failures"] = r.n_failures;
    doc["first_failure"] = r.first_failure;
    json table = json::array();
    for (std::size_t k = 0; k < r.deltas.size(); ++k) {
      table.push_back({{"delta", r.deltas[k]}, {"rejection_rate", r.rejection_rate[k]}});
    }
    doc["rejection"] = table;
    if (!a.output.empty()) {
      const std::string path = sibling(a.output, "_reps.csv");
      write_text(path, rows_csv({"t_max_hat", "u_max", "l_min"}, r.rows));
      doc["reps_csv"] = std::filesystem::path(path).filename().string();
    }
    emit(doc, a.output, out);
    return kExitOk;
  }
  throw ConfigError("config key 'mode' must be estimator, equivalence or panel");
}

int cmd_golden(const std::string& dir, std::ostream& out) {
  const GoldenReport rep = run_golden_suite(dir);
  for (const auto& c : rep.cases) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) {
      out << " expected=[";
      for (std::size_t i = 0; i < c.expected.size(); ++i) out << (i ? "," : "") << fmt(c.expected[i]);
      out << "] actual=[";
      for (std::size_t i = 0; i < c.actual.size(); ++i) out << (i ? "," : "") << fmt(c.actual[i]);
      out << "] tol=" << fmt(c.tolerance);
      if (!c.message.empty()) out << " (" << c.message << ")";
    }
    out << "\n";
  }
  return rep.all_passed() ? kExitOk : kExitNumeric;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::domain:
      return kExitConfig;
    case ErrorKind::data:
    case ErrorKind::empty_cell:
    case ErrorKind::collinearity:
      return kExitData;
    default:
      return kExitNumeric;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difference-in-differences for ordinal outcomes"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate distributional and cumulative effects");
  add_data_options(fit_cmd, fit.data);
  fit_cmd->add_option("--covariates", fit.data.covariates, "Covariate columns (comma separated)");
  fit_cmd->add_option("--pre", fit.pre, "Pre-treatment period");
  fit_cmd->add_option("--post", fit.post, "Post-treatment period");
  fit_cmd->add_option("--boot", fit.boot, "Bootstrap replicates (0: none)");
  fit_cmd->add_option("--alpha", fit.alpha, "Interval levels, e.g. 0.05,0.10");

  FitArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "Bounds on the share benefiting from treatment");
  add_data_options(bnd_cmd, bnd.data);
  bnd_cmd->add_option("--pre", bnd.pre, "Pre-treatment period");
  bnd_cmd->add_option("--post", bnd.post, "Post-treatment period");

  EquivArgs eq;
  auto* eq_cmd = app.add_subcommand("equivtest", "Pre-trend equivalence test");
  add_data_options(eq_cmd, eq.data);
  eq_cmd->add_option("--pre1", eq.pre1, "First pre-treatment period");
  eq_cmd->add_option("--pre2", eq.pre2, "Second pre-treatment period");
  eq_cmd->add_option("--delta", eq.delta, "Equivalence threshold or 'auto'");
  eq_cmd->add_option("--grid", eq.grid, "Quantile grid start:stop:step");
  eq_cmd->add_option("--alpha", eq.alpha, "Test level");
  eq_cmd->add_option("--omega", eq.omega, "Covariance source: information or bootstrap");
  eq_cmd->add_option("--boot", eq.boot, "Bootstrap replicates for --omega bootstrap");
  eq_cmd->add_flag("--rounded-delta", eq.rounded, "Use the rounded constant 1.2 for delta auto");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo studies and simulated panels");
  sim_cmd->add_option("--config", sim.config, "Simulation config (JSON)")->required();
  sim_cmd->add_option("--output", sim.output, "Report path (JSON) or CSV path in panel mode");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: default)");

  std::string golden_dir = "fixtures/golden";
  auto* gold_cmd = app.add_subcommand("golden", "Run the golden fixture suite");
  gold_cmd->add_option("--dir", golden_dir, "Fixture directory");

  std::vector<const char*> argv{"orddid"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, false, out);
    if (*bnd_cmd) return cmd_fit(bnd, true, out);
    if (*eq_cmd) return cmd_equivtest(eq, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*gold_cmd) return cmd_golden(golden_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace orddid
