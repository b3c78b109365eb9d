#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "optionnet/fd.hpp"
#include "optionnet/loss.hpp"
#include "optionnet/network.hpp"
#include "optionnet/sampling.hpp"

using namespace optionnet;

namespace {

double seconds_now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Loss + gradient over a full collocation set: chunked (OpenMP) kernel vs
// the naive serial loop.
void bench_loss_grad() {
  MarketParams m;
  m.r = 0.04;
  m.sigma = {0.25, 0.25};
  m.delta = {0.01, 0.01};
  m.rho = 0.1;
  m.T = 0.5;
  m.K = 15.0;
  const PricingProblem p = make_problem(2, Style::american, PayoffKind::max_call, m);
  const CollocationSet pts = sample_collocation(p, 1000, 150, 150, 1);
  LossConfig lc;
  const LossEvaluator ev(p, pts, lc);

  Architecture arch;
  arch.input_dim = p.input_dim();
  const NetworkParams net = init_network(arch, payoff_domain_max(p), 7);

  Vec g_par, g_ser;
  ev.loss_grad(net, g_par);  // warm-up
  const int reps_par = 10, reps_ser = 3;
  double t0 = seconds_now();
  for (int i = 0; i < reps_par; ++i) ev.loss_grad(net, g_par);
  const double t_par = (seconds_now() - t0) / reps_par;
  t0 = seconds_now();
  for (int i = 0; i < reps_ser; ++i) ev.loss_grad_serial(net, g_ser);
  const double t_ser = (seconds_now() - t0) / reps_ser;

  std::printf("loss_grad      %8.2f ms   serial %8.2f ms   speedup %.2fx   max|dg| %.2e\n",
              1e3 * t_par, 1e3 * t_ser, t_ser / t_par, max_abs_diff(g_par, g_ser));
}

// Stencil application (the finite-difference rhs assembly) on a synthetic
// 9-point matrix the size of the 2D pricing grid.
void bench_stencil() {
  const int n1 = 256;
  StencilMatrix A;
  A.n = (std::size_t)n1 * n1;
  A.offsets = {0, -n1, n1, -1, 1, -n1 - 1, -n1 + 1, n1 - 1, n1 + 1};
  const std::size_t e = A.offsets.size();
  A.coef.assign(A.n * e, 0.0);
  Rng rng(123);
  Vec u(A.n);
  for (std::size_t k = 0; k < A.n; ++k) {
    u[k] = rng.uniform(-1.0, 1.0);
    for (std::size_t m = 0; m < e; ++m) {
      const long long t = (long long)k + A.offsets[m];
      if (t >= 0 && t < (long long)A.n) A.coef[k * e + m] = rng.uniform(-1.0, 1.0);
    }
  }

  Vec out_par, out_ser;
  apply_stencil(A, u, out_par);  // warm-up
  const int reps = 200;
  double t0 = seconds_now();
  for (int i = 0; i < reps; ++i) apply_stencil(A, u, out_par);
  const double t_par = (seconds_now() - t0) / reps;
  t0 = seconds_now();
  for (int i = 0; i < reps; ++i) apply_stencil_serial(A, u, out_ser);
  const double t_ser = (seconds_now() - t0) / reps;

  std::printf("apply_stencil  %8.3f ms   serial %8.3f ms   speedup %.2fx   max|dv| %.2e\n",
              1e3 * t_par, 1e3 * t_ser, t_ser / t_par, max_abs_diff(out_par, out_ser));
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif
  bench_loss_grad();
  bench_stencil();
  return 0;
}
