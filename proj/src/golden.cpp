#include "orddid/golden.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "orddid/bounds.hpp"
#include "orddid/equivalence.hpp"
#include "orddid/error.hpp"
#include "orddid/identification.hpp"
#include "orddid/ordered_probit.hpp"
#include "orddid/simulate.hpp"

namespace orddid {
namespace {

using nlohmann::json;

CellParams cell(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

std::vector<double> evaluate(const std::string& kind, const json& in) {
  if (kind == "default_delta") {
    return {default_delta(in.at("n1").get<long long>(), in.at("n0").get<long long>(),
                          in.value("rounded_constant", false))};
  }
  if (kind == "counterfactual_params") {
    const auto c = counterfactual_params(cell(in.at("theta00")), cell(in.at("theta01")),
                                         cell(in.at("theta10")));
    return {c.mu, c.sigma};
  }
  if (kind == "pt_gap") {
    return {pt_gap(in.at("treated_pre"), in.at("treated_post"), in.at("control_pre"),
                   in.at("control_post"), in.at("threshold").get<int>())};
  }
  if (kind == "cell_inversion") {
    const auto k = in.at("cutoffs").get<std::vector<double>>();
    const auto p = in.at("probs").get<std::vector<double>>();
    const auto c = invert_cell_j3(p, Cutoffs{k, {0, 1}});
    return {c.mu, c.sigma};
  }
  if (kind == "cell_probs") {
    return cell_probs(cell(in.at("theta")), Cutoffs{in.at("cutoffs").get<std::vector<double>>(), {0, 1}});
  }
  if (kind == "eta_bounds" || kind == "tau_bounds") {
    const auto p = in.at("counterfactual_probs").get<std::vector<double>>();
    const auto d = in.at("delta").get<std::vector<double>>();
    const auto b = kind == "eta_bounds" ? eta_bounds(p, d) : tau_bounds(p, d);
    return {b.lower, b.upper};
  }
  if (kind == "true_t_max") {
    return {true_t_max(PreTheta{in.at("theta").get<std::vector<double>>().at(0),
                                in.at("theta")[1], in.at("theta")[2], in.at("theta")[3],
                                in.at("theta")[4], in.at("theta")[5], in.at("theta")[6],
                                in.at("theta")[7]})};
  }
  throw DataError("unknown golden case kind '" + kind + "'");
}

}  // namespace

bool GoldenReport::all_passed() const { return n_failed() == 0 && !cases.empty(); }

int GoldenReport::n_failed() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(),
                                        [](const GoldenOutcome& c) { return !c.passed; }));
}

GoldenReport run_golden_suite(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("golden fixture directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no golden fixtures in " + dir);

  GoldenReport report;
  for (const auto& f : files) {
    std::ifstream in(f);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError("malformed golden fixture " + f.string() + ": " + e.what());
    }
    const json cases = doc.is_array() ? doc : json::array({doc});
    for (const auto& c : cases) {
      GoldenOutcome o;
      o.file = f.filename().string();
      o.name = c.value("name", o.file);
      try {
        o.tolerance = c.at("tolerance").get<double>();
        const json& exp = c.at("expected");
        o.expected = exp.is_array() ? exp.get<std::vector<double>>()
                                    : std::vector<double>{exp.get<double>()};
        o.actual = evaluate(c.at("kind").get<std::string>(), c.at("input"));
        o.passed = o.actual.size() == o.expected.size();
        for (std::size_t i = 0; o.passed && i < o.actual.size(); ++i) {
          o.passed = std::fabs(o.actual[i] - o.expected[i]) <= o.tolerance;
        }
      } catch (const std::exception& e) {
        o.passed = false;
        o.message = e.what();
      }
      report.cases.push_back(std::move(o));
    }
  }
  return report;
}

}  // namespace orddid
