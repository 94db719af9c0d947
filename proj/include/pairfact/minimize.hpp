#ifndef PAIRFACT_MINIMIZE_HPP
#define PAIRFACT_MINIMIZE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "pairfact/common.hpp"

namespace pairfact {

struct MinimizeOptions {
  double ftol = 1e-7;   // stop when the relative loss decrease falls below this
  int max_iter = 300;
  double armijo_c = 1e-4;
  double min_step = 1e-14;
};

struct MinimizeResult {
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_trace;  // objective value after each accepted step
};

// Objective contract: f(params, grad) returns the loss; when grad is non-null
// it is resized and filled with the exact gradient.
using Objective =
    std::function<double(const std::vector<double>&, std::vector<double>*)>;

// Coordinate-wise feasibility projection; identity when unconstrained.
using Projection = std::function<void(std::vector<double>&)>;

// Projected gradient descent with Armijo backtracking. The step size adapts
// across iterations (doubling after success, halving inside the line search),
// and the accepted objective values are nonincreasing by construction.
inline MinimizeResult minimize_projected(std::vector<double>& params,
                                         const Objective& objective,
                                         const Projection& project,
                                         const MinimizeOptions& options) {
  project(params);
  std::vector<double> grad;
  double f = objective(params, &grad);
  if (!std::isfinite(f)) {
    throw NumericalError("objective is non-finite at the starting point");
  }

  MinimizeResult result;
  result.loss = f;
  double step = 1.0;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    std::vector<double> trial(params.size());
    bool accepted = false;
    double f_new = f;
    while (step >= options.min_step) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        trial[i] = params[i] - step * grad[i];
      }
      project(trial);
      // Generalized Armijo test for projected steps: sufficient decrease
      // against the inner product of the gradient and the actual move.
      double move_dot_grad = 0.0;
      for (std::size_t i = 0; i < params.size(); ++i) {
        move_dot_grad += grad[i] * (params[i] - trial[i]);
      }
      if (move_dot_grad <= 0.0) break;  // stationary: projection undoes the step
      f_new = objective(trial, nullptr);
      if (std::isfinite(f_new) && f_new <= f - options.armijo_c * move_dot_grad) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    params.swap(trial);
    double decrease = f - f_new;
    f = f_new;
    result.iterations = iter + 1;
    result.loss = f;
    result.loss_trace.push_back(f);
    if (!std::isfinite(f)) {
      throw NumericalError("objective diverged to a non-finite value");
    }
    if (decrease < options.ftol * std::max(1.0, std::fabs(f))) {
      result.converged = true;
      break;
    }
    f = objective(params, &grad);
    step = std::min(step * 2.0, 1e6);
  }
  return result;
}

}  // namespace pairfact

#endif  // PAIRFACT_MINIMIZE_HPP
