#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "optionnet/common.hpp"
#include "optionnet/problem.hpp"

namespace optionnet {

struct Architecture {
  int input_dim = 2;                         // 1 + number of assets
  std::vector<int> hidden_layers{20, 20, 20, 20};
  // Activation is tanh on every hidden layer, linear on the single output.

  int n_affine() const { return (int)hidden_layers.size() + 1; }
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

// Flattened parameters: for each affine layer, the weight matrix row-major
// [out][in] followed by the bias vector.
struct NetworkParams {
  Architecture arch;
  Vec theta;
};

struct LayerSpan {
  std::size_t w_off = 0, b_off = 0;
  int in = 0, out = 0;
};
std::vector<LayerSpan> layer_spans(const Architecture& a);
std::size_t param_count(const Architecture& a);

// Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases. The
// last-layer weights are the plain Xavier draw multiplied by v_max, so the
// draw sequence is independent of v_max and scaling by v_max is exact.
NetworkParams init_network(const Architecture& a, double v_max, std::uint64_t seed);

double forward(const NetworkParams& p, const double* y);
Jet input_jet(const NetworkParams& p, const double* y);

// JSON checkpoint; round-trips theta exactly.
void save_checkpoint(const NetworkParams& p, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

// Evaluates (value, gradient w.r.t. inputs, spatial Hessian) per point and
// backpropagates cotangent jets to parameter space. Holds per-layer scratch,
// so use one instance per thread. backward() consumes the intermediates of
// the preceding eval() on the same instance.
class JetEvaluator {
 public:
  explicit JetEvaluator(const Architecture& arch);

  double value(const Vec& theta, const double* y) const;
  Jet eval(const Vec& theta, const double* y);

  // Value-only forward that records the activations, for points where no
  // input derivatives are needed. backward_value() consumes its tape (or the
  // tape of a full eval()) and accumulates sv * dvalue/dtheta into grad at a
  // fraction of the full backward cost.
  double value_tape(const Vec& theta, const double* y);
  void backward_value(const Vec& theta, double sv, Vec& grad) const;

  // Accumulates d<seed, jet>/dtheta into grad (size param_count). The seed is
  // a cotangent jet; for 2D the cross cotangent is read as
  // seed.hess_xx[0][1] + seed.hess_xx[1][0] since the network stores the
  // mixed derivative once.
  void backward(const Vec& theta, const Jet& seed, Vec& grad) const;

 private:
  Architecture arch_;
  std::vector<LayerSpan> spans_;
  int D_, S_, P_, L_;   // input dim, spatial dims, Hessian pairs, affine layers
  int pi_[3], pj_[3];   // pair -> spatial indices
  double y_[3];
  // Per hidden layer: activations and their input jets, pre- and post-tanh.
  std::vector<Vec> z_, Ja_, Jz_, Ha_, Hz_;
  // Reverse-pass scratch.
  mutable Vec zb_, Jb_, Hb_, zb2_, Jb2_, Hb2_;
};

// Exact gradient of a scalar functional of the network over a point list.
// First sweep: `collect` sees every point's jet in order (gather totals).
// Second sweep: `seed` returns each point's cotangent jet, typically built
// from those totals; contributions accumulate into the returned vector.
Vec objective_gradient(const NetworkParams& params, const std::vector<Vec>& points,
                       const std::function<void(std::size_t, const Jet&)>& collect,
                       const std::function<Jet(std::size_t, const Jet&)>& seed);

}  // namespace optionnet
