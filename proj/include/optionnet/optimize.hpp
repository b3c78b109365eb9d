#pragma once

#include <functional>
#include <string>
#include <vector>

#include "optionnet/common.hpp"

namespace optionnet {

struct OptimizerConfig {
  int memory = 10;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-8;
  double loss_tolerance = 1e-12;  // relative decrease over plateau_window iterations
  int plateau_window = 20;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 25;
  int restart_cycle = 50;  // stride of the on_cycle callback
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double lambda_used = 0.0;
  double seconds = 0.0;  // since minimize() started
};

enum class StopReason {
  gradient_tolerance,
  loss_plateau,
  max_iterations,
  line_search_failed,
};
const char* to_string(StopReason r);

struct TrainHistory {
  std::vector<IterationRecord> records;  // one per accepted step, plus iteration 0
  StopReason reason = StopReason::max_iterations;
  int iterations = 0;  // accepted steps
};

struct MinimizeCallbacks {
  // Called every restart_cycle accepted steps. Returning true signals the
  // objective changed (e.g. a loss-weight refresh): the curvature memory is
  // cleared and the objective re-evaluated.
  std::function<bool(int, const Vec&)> on_cycle;
  // Observer after every accepted step: (iteration, theta, loss, grad norm).
  std::function<void(int, const Vec&, double, double)> on_iteration;
  // Lambda recorded in history rows (diagnostic only).
  std::function<double()> current_lambda;
};

// Two-loop-recursion L-BFGS with a strong-Wolfe bracketing/zoom line search.
// fg fills the gradient and returns the objective. theta is updated in
// place to the final iterate.
TrainHistory minimize(const std::function<double(const Vec&, Vec&)>& fg, Vec& theta,
                      const OptimizerConfig& cfg, const MinimizeCallbacks& cb = {});

}  // namespace optionnet
