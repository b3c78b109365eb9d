#pragma once

#include <vector>

#include "optionnet/common.hpp"
#include "optionnet/grid.hpp"
#include "optionnet/problem.hpp"

namespace optionnet {

struct PsorParams {
  double omega = 1.2;
  double tol = 1e-8;
  int max_sweeps = 10000;
};

// Fixed-offset sparse matrix on a tensor grid (tridiagonal in 1D, 9-point in
// 2D). Entries that would reach outside the grid are stored as exact zeros
// and never dereferenced.
struct StencilMatrix {
  std::size_t n = 0;
  std::vector<long long> offsets;
  Vec coef;  // n x offsets.size(), row-major
  double diag(std::size_t k) const;
};

// out = A u. Rows are independent, so the parallel version is bitwise
// identical to the serial one at any thread count.
void apply_stencil(const StencilMatrix& A, const Vec& u, Vec& out);
void apply_stencil_serial(const StencilMatrix& A, const Vec& u, Vec& out);

// Crank-Nicolson finite differences (central, 4-point cross stencil) with a
// Rannacher start-up (the first two steps run as four implicit-Euler half
// steps); the per-step linear complementarity problem is solved by projected
// SOR with lexicographic sweeps. n_time counts steps, so the returned
// surface has n_time + 1 time levels; n_space counts nodes per asset.
GridSurface fd_american(const PricingProblem& p, int n_time, int n_space,
                        const PsorParams& psor = {});

}  // namespace optionnet
