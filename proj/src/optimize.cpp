#include "orddid/optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "orddid/error.hpp"

namespace orddid {

namespace {

using Vec = Eigen::VectorXd;

double inf_norm(const Vec& g) { return g.size() ? g.cwiseAbs().maxCoeff() : 0.0; }

struct Evaluator {
  const Objective& obj;

  double value(const Vec& x) const {
    return obj.value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  Vec gradient(const Vec& x) const {
    Vec g(x.size());
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    if (obj.gradient) {
      obj.gradient(xs, std::span<double>(g.data(), static_cast<std::size_t>(g.size())));
    } else {
      auto ng = numeric_gradient(obj.value, xs);
      for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = ng[static_cast<std::size_t>(i)];
    }
    return g;
  }
};

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<double> numeric_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double rel_step) {
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::fabs(x[i]));
    const double orig = xp[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

MinimizeResult minimize(const Objective& objective, std::vector<double> init,
                        double tol) {
  if (!(tol > 0.0)) throw DomainError("minimize: tolerance must be positive");
  MinimizeOptions opt;
  opt.grad_tol = tol;
  return minimize(objective, std::move(init), opt);
}

MinimizeResult minimize(const Objective& objective, std::vector<double> init,
                        const MinimizeOptions& options) {
  if (!(options.grad_tol > 0.0) || !(options.step_tol > 0.0)) {
    throw DomainError("minimize: tolerances must be positive");
  }
  const Evaluator eval{objective};
  const auto n = static_cast<Eigen::Index>(init.size());
  Vec x = Eigen::Map<const Vec>(init.data(), n);

  double fx = eval.value(x);
  if (!std::isfinite(fx)) {
    throw ConvergenceError("minimize: objective is not finite at the initial point",
                           init, fx, std::numeric_limits<double>::quiet_NaN(), 0);
  }
  Vec g = eval.gradient(x);
  if (!g.allFinite()) {
    throw ConvergenceError("minimize: gradient is not finite at the initial point",
                           init, fx, std::numeric_limits<double>::quiet_NaN(), 0);
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double gnorm = inf_norm(g);
    if (gnorm <= options.grad_tol) return {to_std(x), fx, gnorm, iter};

    Vec dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }

    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    Vec x_new;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      f_new = eval.value(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    const double step_len = accepted ? (x_new - x).cwiseAbs().maxCoeff() : 0.0;
    if (!accepted || step_len <= options.step_tol) {
      if (accepted) {
        x = x_new;
        fx = f_new;
        g = eval.gradient(x);
      }
      const double gn = inf_norm(g);
      if (gn <= options.stall_grad_tol) return {to_std(x), fx, gn, iter + 1};
      throw ConvergenceError("minimize: line search stalled away from a stationary point",
                             to_std(x), fx, gn, iter + 1);
    }

    Vec g_new = eval.gradient(x_new);
    const Vec s = x_new - x;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vec hy = h_inv * y;
      h_inv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }
    x = x_new;
    fx = f_new;
    g = g_new;
  }
  const double gn = inf_norm(g);
  if (gn <= options.grad_tol) return {to_std(x), fx, gn, options.max_iter};
  throw ConvergenceError("minimize: iteration budget exhausted", to_std(x), fx, gn,
                         options.max_iter);
}

}  // namespace orddid
