#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace orddid {

/// Smooth objective for minimize(). When `gradient` is empty a central
/// finite-difference gradient is used.
struct Objective {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

struct MinimizeOptions {
  double grad_tol = 1e-9;    // converged when ||grad||_inf <= grad_tol
  double step_tol = 1e-12;   // or when the accepted step is this small
  double stall_grad_tol = 1e-6;  // gradient bound accepted on a step stall
  int max_iter = 500;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// BFGS with backtracking (Armijo) line search. Deterministic for fixed
/// inputs. Throws DomainError for tol <= 0 and ConvergenceError if the
/// objective is non-finite at `init` or the iteration budget runs out.
MinimizeResult minimize(const Objective& objective, std::vector<double> init,
                        const MinimizeOptions& options = {});

/// Convenience overload matching the (objective, init, tol) contract.
MinimizeResult minimize(const Objective& objective, std::vector<double> init,
                        double tol);

/// Central-difference gradient with step h_i = rel_step * max(1, |x_i|).
std::vector<double> numeric_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double rel_step = 1e-6);

}  // namespace orddid
