#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "optionnet/common.hpp"
#include "optionnet/problem.hpp"

namespace optionnet {

// Tensor-grid price surface on uniform axes, values stored time-major then
// asset 1 then asset 2.
struct GridSurface {
  PricingProblem problem;
  Vec t_axis;
  std::vector<Vec> s_axes;
  Vec values;

  int dim() const { return (int)s_axes.size(); }
  std::size_t n_time() const { return t_axis.size(); }
  std::size_t n_space(int asset) const { return s_axes[asset].size(); }
  std::size_t node_count() const;
  std::size_t index(std::size_t it, std::size_t i1, std::size_t i2 = 0) const;
  double& at(std::size_t it, std::size_t i1, std::size_t i2 = 0);
  double at(std::size_t it, std::size_t i1, std::size_t i2 = 0) const;
};

// Uniform axes over [0,T] x [0,S_max]^dim including endpoints; values zero.
GridSurface make_surface(const PricingProblem& p, int n_time, int n_space);

// CSV with '#'-prefixed axis header lines followed by one row per node
// (t, S..., value), 17 significant digits.
void write_surface_csv(const GridSurface& g, const std::string& path);
GridSurface read_surface_csv(const std::string& path, const PricingProblem& p);

// Discrete relative L2 error over all nodes: ||cand - ref|| / ||ref||.
// Requires identical axes.
double relative_l2_error(const GridSurface& candidate, const GridSurface& reference);

}  // namespace optionnet
