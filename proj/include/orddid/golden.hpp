#pragma once

#include <string>
#include <vector>

namespace orddid {

struct GoldenOutcome {
  std::string name;
  std::string file;
  bool passed = false;
  std::vector<double> expected;
  std::vector<double> actual;
  double tolerance = 0.0;
  std::string message;  // set when the case could not be evaluated
};

struct GoldenReport {
  std::vector<GoldenOutcome> cases;
  bool all_passed() const;
  int n_failed() const;
};

/// Evaluates every *.json fixture under `dir` (sorted by file name). Throws
/// DataError if the directory is missing or holds no fixtures.
GoldenReport run_golden_suite(const std::string& dir);

}  // namespace orddid
