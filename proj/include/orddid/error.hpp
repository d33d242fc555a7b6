#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace orddid {

// Every failure raised by the library derives from Error so callers (the CLI,
// the bootstrap) can catch one type and still dispatch on kind().
enum class ErrorKind {
  domain,
  data,
  empty_cell,
  non_identified,
  convergence,
  covariance,
  collinearity,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// Malformed input data: CSV schema problems, duplicate records, J < 3.
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct EmptyCellError : Error {
  explicit EmptyCellError(const std::string& what)
      : Error(ErrorKind::empty_cell, what) {}
};

struct NonIdentifiedError : Error {
  explicit NonIdentifiedError(const std::string& what)
      : Error(ErrorKind::non_identified, what) {}
};

struct CovarianceError : Error {
  explicit CovarianceError(const std::string& what)
      : Error(ErrorKind::covariance, what) {}
};

struct CollinearityError : Error {
  explicit CollinearityError(const std::string& what)
      : Error(ErrorKind::collinearity, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Raised by the optimizer. Carries the best iterate seen so callers can
/// inspect how far the search got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_point,
                   double best_value, double grad_norm, int iterations)
      : Error(ErrorKind::convergence, what),
        best_point_(std::move(best_point)),
        best_value_(best_value),
        grad_norm_(grad_norm),
        iterations_(iterations) {}

  const std::vector<double>& best_point() const noexcept { return best_point_; }
  double best_value() const noexcept { return best_value_; }
  double grad_norm() const noexcept { return grad_norm_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> best_point_;
  double best_value_;
  double grad_norm_;
  int iterations_;
};

}  // namespace orddid
