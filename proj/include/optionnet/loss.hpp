#pragma once

#include <string>
#include <utility>

#include "optionnet/network.hpp"
#include "optionnet/problem.hpp"
#include "optionnet/sampling.hpp"

namespace optionnet {

enum class LossMode { fixed_lambda, variance_normalization, optimal_lambda };

struct LossConfig {
  LossMode mode = LossMode::fixed_lambda;
  double lambda = 0.5;
  double p = 2.0;
  void validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double interior_term = 0.0;
  double boundary_term = 0.0;
  double terminal_term = 0.0;
  double lambda_used = 0.5;
};

// Monte Carlo loss over a fixed collocation set, with exact parameter
// gradients. Point evaluation runs over fixed-size chunks whose partial sums
// are combined in chunk order, so results are bitwise identical with and
// without OpenMP at any thread count.
class LossEvaluator {
 public:
  LossEvaluator(const PricingProblem& problem, const CollocationSet& pts, LossConfig cfg);

  LossBreakdown loss(const NetworkParams& params) const;
  LossBreakdown loss_grad(const NetworkParams& params, Vec& grad) const;

  // Single naive loop over points, no chunking; the reference implementation
  // the parallel kernel is tested against.
  LossBreakdown loss_grad_serial(const NetworkParams& params, Vec& grad) const;

  // Measure-weighted MC estimate of the optimal loss weight from the current
  // solution magnitudes; in [0,1], 0.5 when the network is uninformative.
  double estimate_optimal_lambda(const NetworkParams& params) const;

  // Euclidean norms of the parameter gradients of the unweighted interior
  // term and of the unweighted boundary+terminal term.
  std::pair<double, double> gradient_norms(const NetworkParams& params) const;

  void set_lambda(double lam) { lambda_ = lam; }
  double lambda() const { return lambda_; }
  const LossConfig& config() const { return cfg_; }
  const PricingProblem& problem() const { return problem_; }

 private:
  struct Phase1;
  struct PointEval;
  struct SeedSpec;

  Phase1 forward_sums(const NetworkParams& params, bool chunked) const;
  LossBreakdown assemble(const Phase1& s) const;
  PointEval eval_interior(JetEvaluator& ev, const Vec& theta, std::size_t i, Jet* jet_out) const;
  void accumulate_grads(const NetworkParams& params, const SeedSpec& spec, bool chunked,
                        Vec& grad) const;
  LossBreakdown loss_grad_impl(const NetworkParams& params, Vec& grad, bool chunked) const;
  LossBreakdown loss_grad_fused(const NetworkParams& params, Vec& grad, bool chunked) const;

  PricingProblem problem_;
  const CollocationSet& pts_;
  LossConfig cfg_;
  double lambda_;
  bool american_;

  std::vector<ResidualCoeffs> coeffs_;  // per interior point
  Vec payoff_interior_;                 // H at interior points
  Vec target_boundary_;                 // G at boundary points
  Vec payoff_terminal_;                 // H at terminal points
  double measure_interior_ = 0.0;       // T * prod S_max
  double measure_faces_ = 0.0;          // total admissible face area (incl. T)
  double measure_terminal_ = 0.0;       // prod S_max
};

// Convenience wrappers over LossEvaluator.
LossBreakdown weighted_loss(const NetworkParams& params, const PricingProblem& problem,
                            const CollocationSet& pts, const LossConfig& cfg);
LossBreakdown variance_normalized_loss(const NetworkParams& params, const PricingProblem& problem,
                                       const CollocationSet& pts, const LossConfig& cfg);
double optimal_lambda(const NetworkParams& params, const PricingProblem& problem,
                      const CollocationSet& pts);
std::pair<double, double> gradient_norms(const NetworkParams& params,
                                         const PricingProblem& problem, const CollocationSet& pts,
                                         const LossConfig& cfg);

LossMode loss_mode_from_string(const std::string& s);
const char* to_string(LossMode m);

}  // namespace optionnet
