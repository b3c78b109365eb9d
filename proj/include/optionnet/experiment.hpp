#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "optionnet/fd.hpp"
#include "optionnet/grid.hpp"
#include "optionnet/loss.hpp"
#include "optionnet/network.hpp"
#include "optionnet/optimize.hpp"
#include "optionnet/problem.hpp"

namespace optionnet {

// standard: plain Xavier everywhere. scaled: last-layer weights multiplied
// by v_max so the untrained network already spans the payoff's range.
enum class InitMode { standard, scaled };
enum class VmaxMode { auto_payoff_max, explicit_value };

struct SamplingConfig {
  int n_interior = 1000;
  int n_boundary = 150;
  int n_terminal = 150;
  std::uint64_t seed = 1;
};

struct ReferenceConfig {
  int fd_time_steps = 75;
  int fd_space_nodes = 101;
  PsorParams psor;
};

struct OutputConfig {
  std::string dir = "out";
  int eval_time_steps = 75;  // the grid carries eval_time_steps + 1 levels
  int eval_space_nodes = 101;
  int snapshot_stride = 0;  // record the error every this many iterations; 0 = off
};

struct ExperimentConfig {
  std::string name = "experiment";
  PricingProblem problem;
  std::vector<int> hidden_layers{20, 20, 20, 20};
  InitMode init_mode = InitMode::scaled;
  VmaxMode v_max_mode = VmaxMode::auto_payoff_max;
  double v_max = 0.0;  // read only in explicit mode
  SamplingConfig sampling;
  LossConfig loss;
  OptimizerConfig optimizer;
  ReferenceConfig reference;
  OutputConfig outputs;

  Architecture architecture() const;
  // Multiplier applied to the last-layer draw: 1 for standard init, else the
  // configured or payoff-derived value scale.
  double effective_v_max() const;
  void validate() const;
};

struct RunReport {
  std::string name;
  double error = 0.0;  // relative L2 vs the reference surface
  LossBreakdown final_loss;
  double lambda_used = 0.0;
  double lambda_estimate = 0.0;  // optimal-weight estimate at the final iterate
  double wall_seconds = 0.0;
  int iterations = 0;
  StopReason stop = StopReason::max_iterations;
  bool converged = false;
  std::vector<std::pair<int, double>> error_curve;  // (iteration, error) per snapshot
  std::vector<std::pair<std::string, std::string>> artifacts;  // kind -> path
};

// JSON config IO. Reading fills absent keys with defaults; writing spells
// every field out, so the written-back effective config reproduces the run.
ExperimentConfig load_config(const std::string& path);
void write_effective_config(const ExperimentConfig& cfg, const std::string& path);

// Network value on a tensor grid over [0,T] x [0,S_max]^dim.
GridSurface evaluate_network_surface(const PricingProblem& p, const NetworkParams& net,
                                     int n_time_nodes, int n_space_nodes);

// Closed forms for European problems on the output grid; fd_american for
// American ones, whose grid then also hosts the comparison.
GridSurface reference_surface(const ExperimentConfig& cfg);

// init -> sample -> minimize -> evaluate -> compare -> export. Writes the
// effective config, candidate/reference/error surfaces, run log, checkpoint,
// and report into outputs.dir; non-convergence still produces a report.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  double s_inf = 0.0;
  double error = 0.0;
  double grad_interior = 0.0;  // gradient norms at initialization
  double grad_boundary = 0.0;
};

// Domain-size study on the 2D European max-call: for each S_inf the strike
// is S_inf / 4 and the run repeats with the requested init mode, recording
// the final error next to the initialization gradient norms.
std::vector<SweepRow> domain_sweep(const ExperimentConfig& base,
                                   const std::vector<double>& s_max_list, InitMode init_mode);

InitMode init_mode_from_string(const std::string& s);
VmaxMode v_max_mode_from_string(const std::string& s);
const char* to_string(InitMode m);
const char* to_string(VmaxMode m);

}  // namespace optionnet
