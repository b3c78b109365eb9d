#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "optionnet/common.hpp"
#include "optionnet/problem.hpp"

namespace optionnet {

// Monte Carlo collocation sets in scaled coordinates [t, x1, (x2)].
// boundary_union is the spatial-boundary points followed by the terminal
// points; it feeds the variance-normalization denominator.
struct CollocationSet {
  std::vector<Vec> interior;
  std::vector<Vec> boundary;
  std::vector<std::array<int, 2>> boundary_faces;  // {asset, side} per boundary point
  std::vector<Vec> terminal;
  std::vector<Vec> boundary_union;
  std::uint64_t seed = 0;

  std::size_t n_interior() const { return interior.size(); }
  std::size_t n_boundary() const { return boundary.size(); }
  std::size_t n_terminal() const { return terminal.size(); }
  std::size_t n_union() const { return boundary_union.size(); }
};

// i.i.d. uniform over the open box (0,T) x prod (0, S_max); scaled output.
std::vector<Vec> sample_interior(std::size_t n, const PricingProblem& p, std::uint64_t seed);

// Uniform over the admissible spatial faces (rule != none) crossed with
// t in (0,T); faces chosen proportionally to their area. Face tags are
// written to *faces when given.
std::vector<Vec> sample_boundary(std::size_t n, const PricingProblem& p, std::uint64_t seed,
                                 std::vector<std::array<int, 2>>* faces = nullptr);

// Scaled t exactly 1, spatial coordinates uniform over the open spatial box.
std::vector<Vec> sample_terminal(std::size_t n, const PricingProblem& p, std::uint64_t seed);

// All three sets from one master seed via fixed stream offsets.
CollocationSet sample_collocation(const PricingProblem& p, std::size_t n_interior,
                                  std::size_t n_boundary, std::size_t n_terminal,
                                  std::uint64_t seed);

}  // namespace optionnet
