#pragma once

// Projected limited-memory BFGS for box-constrained minimization. Every
// accepted step strictly decreases the objective, so the returned point is
// never worse than the start.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace racing {

struct BoxLbfgsSettings {
  int max_iterations = 60;
  int memory = 8;
  double grad_tol = 1e-4;  // on the projected gradient, infinity norm
  double cost_tol = 1e-8;  // absolute decrease per iteration
  int max_line_search = 20;
  double armijo = 1e-4;
};

enum class SolveStatus { GradientTolerance, CostTolerance, IterationLimit, LineSearchFailed, NonFiniteStart };

const char* to_string(SolveStatus s);

struct BoxLbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double f_start = 0.0;
  int iterations = 0;
  int evaluations = 0;
  SolveStatus status = SolveStatus::IterationLimit;
};

// Value-and-gradient callback; returns f(x) and fills grad. A non-finite
// return marks the point as infeasible.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;
using ValueOnly = std::function<double(std::span<const double> x)>;

// `f` is used by the line search; `fg` at accepted points.
BoxLbfgsResult minimize_box_lbfgs(const ValueOnly& f, const ValueAndGradient& fg, std::vector<double> x0,
                                  std::span<const double> lower, std::span<const double> upper,
                                  const BoxLbfgsSettings& settings);

}  // namespace racing
