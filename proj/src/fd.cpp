#include "optionnet/fd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace optionnet {

double StencilMatrix::diag(std::size_t k) const {
  // slot 0 always holds the offset-0 entry, see assemble() below
  return coef[k * offsets.size()];
}

void apply_stencil_serial(const StencilMatrix& A, const Vec& u, Vec& out) {
  const std::size_t e = A.offsets.size();
  out.resize(A.n);
  for (std::size_t k = 0; k < A.n; ++k) {
    const double* row = &A.coef[k * e];
    double acc = 0.0;
    for (std::size_t m = 0; m < e; ++m) {
      if (row[m] != 0.0) acc += row[m] * u[k + (std::size_t)A.offsets[m]];
    }
    out[k] = acc;
  }
}

void apply_stencil(const StencilMatrix& A, const Vec& u, Vec& out) {
  const std::size_t e = A.offsets.size();
  out.resize(A.n);
  const long long n = (long long)A.n;
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < n; ++k) {
    const double* row = &A.coef[(std::size_t)k * e];
    double acc = 0.0;
    for (std::size_t m = 0; m < e; ++m) {
      if (row[m] != 0.0) acc += row[m] * u[(std::size_t)(k + A.offsets[m])];
    }
    out[(std::size_t)k] = acc;
  }
}

namespace {

// M = I + scale*A, with the Dirichlet rows of A (all zero) turning into
// plain identity rows.
StencilMatrix shifted_identity(const StencilMatrix& A, double scale) {
  StencilMatrix M;
  M.n = A.n;
  M.offsets = A.offsets;
  const std::size_t e = A.offsets.size();
  M.coef.resize(A.coef.size());
  for (std::size_t k = 0; k < A.n; ++k) {
    for (std::size_t m = 0; m < e; ++m) M.coef[k * e + m] = scale * A.coef[k * e + m];
    M.coef[k * e] += 1.0;
  }
  return M;
}

// Projected SOR on M1 u = q, u >= obstacle at PDE rows; Dirichlet rows are
// left untouched and only feed their neighbours. Converged when the largest
// complementarity residual |min(u - H, M1 u - q)| over PDE rows drops below
// tol.
void psor_solve(const StencilMatrix& M1, const Vec& q, const Vec& obstacle,
                const std::vector<signed char>& pde, const PsorParams& ps, Vec& u,
                Vec& scratch) {
  const std::size_t e = M1.offsets.size();
  double worst = 0.0;
  for (int sweep = 0; sweep < ps.max_sweeps; ++sweep) {
    for (std::size_t k = 0; k < M1.n; ++k) {
      if (!pde[k]) continue;
      const double* row = &M1.coef[k * e];
      double acc = 0.0;
      for (std::size_t m = 1; m < e; ++m) {
        if (row[m] != 0.0) acc += row[m] * u[k + (std::size_t)M1.offsets[m]];
      }
      const double gs = (q[k] - acc) / row[0];
      u[k] = std::max(u[k] + ps.omega * (gs - u[k]), obstacle[k]);
    }
    apply_stencil(M1, u, scratch);
    worst = 0.0;
    for (std::size_t k = 0; k < M1.n; ++k) {
      if (!pde[k]) continue;
      const double res = std::min(u[k] - obstacle[k], scratch[k] - q[k]);
      worst = std::max(worst, std::fabs(res));
    }
    if (worst < ps.tol) return;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg,
                "psor did not converge: residual %.3e after %d sweeps (tol %.1e)", worst,
                ps.max_sweeps, ps.tol);
  throw std::runtime_error(msg);
}

}  // namespace

GridSurface fd_american(const PricingProblem& p, int n_time, int n_space,
                        const PsorParams& psor) {
  p.validate();
  if (p.style != Style::american)
    throw std::invalid_argument("fd_american: problem style must be american");
  if (n_time < 1) throw std::invalid_argument("fd_american: n_time must be >= 1");
  if (n_space < 3) throw std::invalid_argument("fd_american: n_space must be >= 3");
  if (!(psor.omega > 0.0 && psor.omega < 2.0))
    throw std::invalid_argument("fd_american: omega must lie in (0, 2)");
  if (!(psor.tol > 0.0) || psor.max_sweeps < 1)
    throw std::invalid_argument("fd_american: bad psor tolerance or sweep limit");
  for (int a = 0; a < p.dim; ++a) {
    if (p.rules[a][1] == FaceRule::none)
      throw std::invalid_argument("fd_american: the S_max faces need a boundary condition");
  }

  const int dim = p.dim;
  const int ns = n_space;
  const int nj = dim == 2 ? ns : 1;  // stride of the asset-1 index
  const std::size_t n = (std::size_t)ns * (std::size_t)nj;
  const double h0 = p.s_max[0] / (ns - 1);
  const double h1 = dim == 2 ? p.s_max[1] / (ns - 1) : 0.0;

  // Node classification: first admissible face in (asset, side) order wins,
  // so corners shared with a bare face still get their Dirichlet value.
  std::vector<signed char> pde(n, 1);
  std::vector<signed char> face_asset(n, -1), face_side(n, -1);
  Vec obstacle(n);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nj; ++j) {
      const std::size_t k = (std::size_t)i * nj + j;
      const double x[2] = {i * h0, j * h1};
      obstacle[k] = payoff(p, x);
      for (int a = 0; a < dim && pde[k]; ++a) {
        for (int side = 0; side < 2 && pde[k]; ++side) {
          const int c = a == 0 ? i : j;
          if (c != (side == 0 ? 0 : ns - 1)) continue;
          if (p.rules[a][side] == FaceRule::none) continue;
          pde[k] = 0;
          face_asset[k] = (signed char)a;
          face_side[k] = (signed char)side;
        }
      }
    }
  }

  // Spatial operator A u = sum_i (1/2 sigma_i^2 S_i^2 u_ii + (r-delta_i) S_i u_i)
  // + rho sigma_1 sigma_2 S_1 S_2 u_12 - r u with central differences and the
  // 4-point cross stencil. Bare faces at S_i = 0 need no special casing: every
  // coefficient in that direction carries a factor S_i and vanishes there.
  StencilMatrix A;
  A.n = n;
  if (dim == 1) {
    A.offsets = {0, -1, 1};
  } else {
    A.offsets = {0,      -nj,    nj,     -1,    1,
                 -nj - 1, -nj + 1, nj - 1, nj + 1};
  }
  const std::size_t e = A.offsets.size();
  A.coef.assign(n * e, 0.0);
  const double r = p.market.r;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nj; ++j) {
      const std::size_t k = (std::size_t)i * nj + j;
      if (!pde[k]) continue;
      double* row = &A.coef[k * e];
      const double s0 = i * h0;
      const double a0 = 0.5 * p.market.sigma[0] * p.market.sigma[0] * s0 * s0 / (h0 * h0);
      const double c0 = (r - p.market.delta[0]) * s0 / (2.0 * h0);
      if (dim == 1) {
        row[0] = -2.0 * a0 - r;
        row[1] = a0 - c0;
        row[2] = a0 + c0;
      } else {
        const double s1 = j * h1;
        const double a1 = 0.5 * p.market.sigma[1] * p.market.sigma[1] * s1 * s1 / (h1 * h1);
        const double c1 = (r - p.market.delta[1]) * s1 / (2.0 * h1);
        const double cross = p.market.rho * p.market.sigma[0] * p.market.sigma[1] * s0 * s1 /
                             (4.0 * h0 * h1);
        row[0] = -2.0 * a0 - 2.0 * a1 - r;
        row[1] = a0 - c0;
        row[2] = a0 + c0;
        row[3] = a1 - c1;
        row[4] = a1 + c1;
        row[5] = cross;
        row[6] = -cross;
        row[7] = -cross;
        row[8] = cross;
      }
    }
  }

  const double dt = p.market.T / n_time;
  // Implicit Euler over dt/2 and Crank-Nicolson over dt share the same lhs.
  const StencilMatrix M1 = shifted_identity(A, -0.5 * dt);
  const StencilMatrix M0c = shifted_identity(A, 0.5 * dt);  // Crank-Nicolson rhs

  GridSurface surf = make_surface(p, n_time + 1, ns);
  Vec u = obstacle;  // terminal condition
  Vec q(n), scratch(n);
  for (std::size_t k = 0; k < n; ++k) surf.values[(std::size_t)n_time * n + k] = u[k];

  auto pin_dirichlet = [&](double t) {
    for (std::size_t k = 0; k < n; ++k) {
      if (pde[k]) continue;
      const int i = (int)(k / nj), j = (int)(k % nj);
      const double x[2] = {i * h0, j * h1};
      u[k] = boundary_target(p, t, x, face_asset[k], face_side[k]);
    }
  };

  for (int step = 0; step < n_time; ++step) {
    const int level = n_time - 1 - step;
    const double t_level = level * dt;
    if (step < 2) {
      // Rannacher start: two implicit-Euler half steps damp the payoff kink.
      for (int half = 0; half < 2; ++half) {
        const double t_half = p.market.T - step * dt - 0.5 * (half + 1) * dt;
        q = u;
        pin_dirichlet(t_half);
        psor_solve(M1, q, obstacle, pde, psor, u, scratch);
      }
    } else {
      apply_stencil(M0c, u, q);
      pin_dirichlet(t_level);
      psor_solve(M1, q, obstacle, pde, psor, u, scratch);
    }
    for (std::size_t k = 0; k < n; ++k) surf.values[(std::size_t)level * n + k] = u[k];
  }
  return surf;
}

}  // namespace optionnet
