#include "optionnet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optionnet {

namespace {

constexpr std::size_t kChunk = 64;
constexpr double kTinyDenominator = 1e-30;

double ppow(double x, double p) {
  if (p == 2.0) return x * x;
  return std::pow(std::abs(x), p);
}

// d/dx |x|^p
double dppow(double x, double p) {
  if (p == 2.0) return 2.0 * x;
  if (x == 0.0) return 0.0;
  return p * std::pow(std::abs(x), p - 1.0) * (x > 0.0 ? 1.0 : -1.0);
}

// d/dx x^p on x >= 0
double dppow_nonneg(double x, double p) {
  if (p == 2.0) return 2.0 * x;
  if (x == 0.0) return 0.0;
  return p * std::pow(x, p - 1.0);
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Runs body(chunk, begin, end) over fixed-size chunks. Callers combine the
// per-chunk partials serially in chunk order, which keeps results identical
// whether or not the chunks execute in parallel.
template <class Body>
void parallel_chunks(std::size_t n, const Body& body) {
  const long long nc = (long long)((n + kChunk - 1) / kChunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < nc; ++c) {
    const std::size_t b = (std::size_t)c * kChunk;
    body((std::size_t)c, b, std::min(b + kChunk, n));
  }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

void LossConfig::validate() const {
  if (mode == LossMode::fixed_lambda && (lambda <= 0.0 || lambda >= 1.0))
    throw std::invalid_argument("lambda must lie in (0,1)");
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
}

struct LossEvaluator::Phase1 {
  double sum_rp = 0.0;    // interior: sum |r|^p
  double sum_dvn = 0.0;   // interior: sum of normalization integrand^p
  double sum_dlam = 0.0;  // interior: sum max(|H-v|, termwise)^p
  double sum_mb = 0.0;    // boundary: sum |v-G|^p
  double sum_vb = 0.0;    // boundary: sum |v|^p
  double sum_mt = 0.0;    // terminal: sum |v-H|^p
  double sum_vt = 0.0;    // terminal: sum |v|^p
  Vec val_b, val_t;       // per-point network values
};

struct LossEvaluator::PointEval {
  double r = 0.0;       // trained residual (LCP form when American)
  double d_vn = 0.0;    // variance-normalization denominator integrand
  double d_lam = 0.0;   // optimal-lambda denominator integrand
  double hv = 0.0;      // H - v
  bool obstacle = false;    // r took the H - v branch
  bool obstacle_d = false;  // d took the |H - v| branch
};

LossEvaluator::LossEvaluator(const PricingProblem& problem, const CollocationSet& pts,
                             LossConfig cfg)
    : problem_(problem),
      pts_(pts),
      cfg_(cfg),
      lambda_(cfg.lambda),
      american_(problem.style == Style::american) {
  problem_.validate();
  cfg_.validate();
  if (pts.interior.empty() || pts.boundary.empty() || pts.terminal.empty())
    throw std::invalid_argument("empty collocation sets");
  if (pts.boundary_faces.size() != pts.boundary.size())
    throw std::invalid_argument("boundary points lack face tags");
  coeffs_.reserve(pts.n_interior());
  payoff_interior_.reserve(pts.n_interior());
  double fin[3];
  for (const Vec& y : pts.interior) {
    coeffs_.push_back(residual_coeffs(problem_, y.data()));
    unscale_point(problem_, y.data(), fin);
    payoff_interior_.push_back(payoff(problem_, fin + 1));
  }
  target_boundary_.reserve(pts.n_boundary());
  for (std::size_t j = 0; j < pts.n_boundary(); ++j) {
    unscale_point(problem_, pts.boundary[j].data(), fin);
    const auto [a, side] = pts.boundary_faces[j];
    target_boundary_.push_back(boundary_target(problem_, fin[0], fin + 1, a, side));
  }
  payoff_terminal_.reserve(pts.n_terminal());
  for (const Vec& y : pts.terminal) {
    unscale_point(problem_, y.data(), fin);
    payoff_terminal_.push_back(payoff(problem_, fin + 1));
  }
  double space = 1.0;
  for (double s : problem_.s_max) space *= s;
  measure_interior_ = problem_.market.T * space;
  measure_terminal_ = space;
  measure_faces_ = 0.0;
  for (int a = 0; a < problem_.dim; ++a)
    for (int side = 0; side < 2; ++side)
      if (problem_.rules[a][side] != FaceRule::none)
        measure_faces_ += problem_.market.T * (problem_.dim == 1 ? 1.0 : problem_.s_max[1 - a]);
}

LossEvaluator::PointEval LossEvaluator::eval_interior(JetEvaluator& ev, const Vec& theta,
                                                      std::size_t i, Jet* jet_out) const {
  const Jet jet = ev.eval(theta, pts_.interior[i].data());
  const ResidualCoeffs& c = coeffs_[i];
  double lr = c.c_t * jet.grad_t + c.c_v * jet.value;
  double lt = std::abs(c.c_t * jet.grad_t) + std::abs(c.c_v * jet.value);
  for (int k = 0; k < problem_.dim; ++k) {
    const double conv = c.c_x[k] * jet.grad_x[k];
    const double diff = c.c_xx[k] * jet.hess_xx[k][k];
    lr += conv + diff;
    lt += std::abs(conv) + std::abs(diff);
  }
  if (problem_.dim == 2) {
    const double cross = c.c_cross * jet.hess_xx[0][1];
    lr += cross;
    lt += std::abs(cross);
  }
  PointEval pe;
  pe.hv = payoff_interior_[i] - jet.value;
  if (american_) {
    pe.obstacle = pe.hv >= lr;
    pe.r = pe.obstacle ? pe.hv : lr;
  } else {
    pe.r = lr;
  }
  pe.obstacle_d = std::abs(pe.hv) >= lt;
  pe.d_lam = pe.obstacle_d ? std::abs(pe.hv) : lt;
  pe.d_vn = american_ ? pe.d_lam : lt;
  if (jet_out) *jet_out = jet;
  return pe;
}

LossEvaluator::Phase1 LossEvaluator::forward_sums(const NetworkParams& params,
                                                  bool chunked) const {
  const Vec& theta = params.theta;
  const double p = cfg_.p;
  Phase1 s;
  s.val_b.resize(pts_.n_boundary());
  s.val_t.resize(pts_.n_terminal());
  if (chunked) {
    {
      std::vector<std::array<double, 3>> part(chunk_count(pts_.n_interior()), {0.0, 0.0, 0.0});
      parallel_chunks(pts_.n_interior(), [&](std::size_t c, std::size_t b, std::size_t e) {
        JetEvaluator ev(params.arch);
        double a0 = 0.0, a1 = 0.0, a2 = 0.0;
        for (std::size_t i = b; i < e; ++i) {
          const PointEval pe = eval_interior(ev, theta, i, nullptr);
          a0 += ppow(pe.r, p);
          a1 += ppow(pe.d_vn, p);
          a2 += ppow(pe.d_lam, p);
        }
        part[c] = {a0, a1, a2};
      });
      for (const auto& a : part) {
        s.sum_rp += a[0];
        s.sum_dvn += a[1];
        s.sum_dlam += a[2];
      }
    }
    {
      std::vector<std::array<double, 2>> part(chunk_count(pts_.n_boundary()), {0.0, 0.0});
      parallel_chunks(pts_.n_boundary(), [&](std::size_t c, std::size_t b, std::size_t e) {
        JetEvaluator ev(params.arch);
        double a0 = 0.0, a1 = 0.0;
        for (std::size_t j = b; j < e; ++j) {
          const double v = ev.value_tape(theta, pts_.boundary[j].data());
          s.val_b[j] = v;
          a0 += ppow(v - target_boundary_[j], p);
          a1 += ppow(v, p);
        }
        part[c] = {a0, a1};
      });
      for (const auto& a : part) {
        s.sum_mb += a[0];
        s.sum_vb += a[1];
      }
    }
    {
      std::vector<std::array<double, 2>> part(chunk_count(pts_.n_terminal()), {0.0, 0.0});
      parallel_chunks(pts_.n_terminal(), [&](std::size_t c, std::size_t b, std::size_t e) {
        JetEvaluator ev(params.arch);
        double a0 = 0.0, a1 = 0.0;
        for (std::size_t j = b; j < e; ++j) {
          const double v = ev.value_tape(theta, pts_.terminal[j].data());
          s.val_t[j] = v;
          a0 += ppow(v - payoff_terminal_[j], p);
          a1 += ppow(v, p);
        }
        part[c] = {a0, a1};
      });
      for (const auto& a : part) {
        s.sum_mt += a[0];
        s.sum_vt += a[1];
      }
    }
  } else {
    JetEvaluator ev(params.arch);
    for (std::size_t i = 0; i < pts_.n_interior(); ++i) {
      const PointEval pe = eval_interior(ev, theta, i, nullptr);
      s.sum_rp += ppow(pe.r, p);
      s.sum_dvn += ppow(pe.d_vn, p);
      s.sum_dlam += ppow(pe.d_lam, p);
    }
    for (std::size_t j = 0; j < pts_.n_boundary(); ++j) {
      const double v = ev.value_tape(theta, pts_.boundary[j].data());
      s.val_b[j] = v;
      s.sum_mb += ppow(v - target_boundary_[j], p);
      s.sum_vb += ppow(v, p);
    }
    for (std::size_t j = 0; j < pts_.n_terminal(); ++j) {
      const double v = ev.value_tape(theta, pts_.terminal[j].data());
      s.val_t[j] = v;
      s.sum_mt += ppow(v - payoff_terminal_[j], p);
      s.sum_vt += ppow(v, p);
    }
  }
  return s;
}

namespace {
struct UnionStats {
  double vbar = 0.0;
  double dv = 0.0;  // mean |v - vbar|^p
};
}  // namespace

static UnionStats union_stats(const Vec& val_b, const Vec& val_t, double p) {
  UnionStats u;
  const std::size_t n = val_b.size() + val_t.size();
  for (double v : val_b) u.vbar += v;
  for (double v : val_t) u.vbar += v;
  u.vbar /= (double)n;
  for (double v : val_b) u.dv += ppow(v - u.vbar, p);
  for (double v : val_t) u.dv += ppow(v - u.vbar, p);
  u.dv /= (double)n;
  return u;
}

LossBreakdown LossEvaluator::assemble(const Phase1& s) const {
  const double nI = (double)pts_.n_interior();
  const double nB = (double)pts_.n_boundary();
  const double n0 = (double)pts_.n_terminal();
  LossBreakdown out;
  out.lambda_used = lambda_;
  const double mean_i = s.sum_rp / nI;
  const double mean_b = s.sum_mb / nB;
  const double mean_t = s.sum_mt / n0;
  if (cfg_.mode == LossMode::variance_normalization) {
    out.interior_term = s.sum_dvn < kTinyDenominator ? s.sum_rp : s.sum_rp / s.sum_dvn;
    const UnionStats u = union_stats(s.val_b, s.val_t, cfg_.p);
    if (u.dv < kTinyDenominator) {
      out.boundary_term = mean_b;
      out.terminal_term = mean_t;
    } else {
      out.boundary_term = mean_b / u.dv;
      out.terminal_term = mean_t / u.dv;
    }
    out.total = out.interior_term + out.boundary_term + out.terminal_term;
  } else {
    out.interior_term = mean_i;
    out.boundary_term = mean_b;
    out.terminal_term = mean_t;
    out.total = lambda_ * mean_i + (1.0 - lambda_) * (mean_b + mean_t);
  }
  return out;
}

LossBreakdown LossEvaluator::loss(const NetworkParams& params) const {
  return assemble(forward_sums(params, true));
}

struct LossEvaluator::SeedSpec {
  double cI = 0.0;  // factor on d|r|^p/dtheta per interior point
  double aD = 0.0;  // factor on d(d_vn^p)/dtheta per interior point
  double cB = 0.0;  // factor on d|m|^p/dtheta per boundary point
  double cT = 0.0;  // factor on d|m|^p/dtheta per terminal point
  const Vec* uv = nullptr;  // extra value seed per boundary-union index
};

// Builds the interior cotangent jet: fr scales the residual branch, fd the
// normalization-denominator branch.
static Jet build_interior_seed(const PricingProblem& problem, bool american, bool obstacle,
                        bool obstacle_d, double hv, const Jet& jet, const ResidualCoeffs& c,
                        double fr, double fd) {
  Jet s;
  s.dim = problem.dim;
  if (fr != 0.0) {
    if (american && obstacle) {
      s.value -= fr;
    } else {
      s.grad_t += fr * c.c_t;
      s.value += fr * c.c_v;
      for (int k = 0; k < problem.dim; ++k) {
        s.grad_x[k] += fr * c.c_x[k];
        s.hess_xx[k][k] += fr * c.c_xx[k];
      }
      if (problem.dim == 2) s.hess_xx[0][1] += fr * c.c_cross;
    }
  }
  if (fd != 0.0) {
    if (american && obstacle_d) {
      s.value -= fd * sgn(hv);
    } else {
      s.grad_t += fd * sgn(c.c_t * jet.grad_t) * c.c_t;
      s.value += fd * sgn(c.c_v * jet.value) * c.c_v;
      for (int k = 0; k < problem.dim; ++k) {
        s.grad_x[k] += fd * sgn(c.c_x[k] * jet.grad_x[k]) * c.c_x[k];
        s.hess_xx[k][k] += fd * sgn(c.c_xx[k] * jet.hess_xx[k][k]) * c.c_xx[k];
      }
      if (problem.dim == 2) s.hess_xx[0][1] += fd * sgn(c.c_cross * jet.hess_xx[0][1]) * c.c_cross;
    }
  }
  return s;
}

void LossEvaluator::accumulate_grads(const NetworkParams& params, const SeedSpec& spec,
                                     bool chunked, Vec& grad) const {
  const Vec& theta = params.theta;
  const double p = cfg_.p;
  const std::size_t np = theta.size();
  const bool do_interior = spec.cI != 0.0 || spec.aD != 0.0;
  const bool do_bt = spec.cB != 0.0 || spec.cT != 0.0 || spec.uv != nullptr;

  auto interior_point = [&](JetEvaluator& ev, std::size_t i, Vec& g) {
    Jet jet;
    const PointEval pe = eval_interior(ev, theta, i, &jet);
    const double fr = spec.cI * dppow(pe.r, p);
    const double fd = spec.aD * dppow_nonneg(pe.d_vn, p);
    if (fr == 0.0 && fd == 0.0) return;
    // When every active branch took the obstacle, the seed touches only the
    // value and the cheap scalar backward applies.
    if ((fr == 0.0 || (american_ && pe.obstacle)) && (fd == 0.0 || (american_ && pe.obstacle_d))) {
      const double sv = -fr - fd * sgn(pe.hv);
      if (sv != 0.0) ev.backward_value(theta, sv, g);
      return;
    }
    const Jet seed = build_interior_seed(problem_, american_, pe.obstacle, pe.obstacle_d, pe.hv,
                                         jet, coeffs_[i], fr, fd);
    ev.backward(theta, seed, g);
  };
  auto boundary_point = [&](JetEvaluator& ev, std::size_t j, Vec& g) {
    const double v = ev.value_tape(theta, pts_.boundary[j].data());
    double sv = spec.cB * dppow(v - target_boundary_[j], p);
    if (spec.uv) sv += (*spec.uv)[j];
    if (sv != 0.0) ev.backward_value(theta, sv, g);
  };
  auto terminal_point = [&](JetEvaluator& ev, std::size_t j, Vec& g) {
    const double v = ev.value_tape(theta, pts_.terminal[j].data());
    double sv = spec.cT * dppow(v - payoff_terminal_[j], p);
    if (spec.uv) sv += (*spec.uv)[pts_.n_boundary() + j];
    if (sv != 0.0) ev.backward_value(theta, sv, g);
  };

  if (!chunked) {
    JetEvaluator ev(params.arch);
    if (do_interior)
      for (std::size_t i = 0; i < pts_.n_interior(); ++i) interior_point(ev, i, grad);
    if (do_bt) {
      for (std::size_t j = 0; j < pts_.n_boundary(); ++j) boundary_point(ev, j, grad);
      for (std::size_t j = 0; j < pts_.n_terminal(); ++j) terminal_point(ev, j, grad);
    }
    return;
  }

  auto run_pass = [&](std::size_t n, auto&& point_fn) {
    std::vector<Vec> part(chunk_count(n));
    parallel_chunks(n, [&](std::size_t c, std::size_t b, std::size_t e) {
      JetEvaluator ev(params.arch);
      part[c].assign(np, 0.0);
      for (std::size_t i = b; i < e; ++i) point_fn(ev, i, part[c]);
    });
    for (const Vec& g : part)
      for (std::size_t k = 0; k < np; ++k) grad[k] += g[k];
  };
  if (do_interior) run_pass(pts_.n_interior(), interior_point);
  if (do_bt) {
    run_pass(pts_.n_boundary(), boundary_point);
    run_pass(pts_.n_terminal(), terminal_point);
  }
}

// In the fixed-weight modes every point's cotangent factor is a constant
// (lambda / n), so the forward sums and the gradient accumulate in one sweep
// instead of two. Variance normalization needs the global sums before any
// seed is known and keeps the two-sweep path below.
LossBreakdown LossEvaluator::loss_grad_fused(const NetworkParams& params, Vec& grad,
                                             bool chunked) const {
  const Vec& theta = params.theta;
  const double p = cfg_.p;
  const std::size_t np = theta.size();
  const double cI = lambda_ / (double)pts_.n_interior();
  const double cB = (1.0 - lambda_) / (double)pts_.n_boundary();
  const double cT = (1.0 - lambda_) / (double)pts_.n_terminal();
  Phase1 s;  // sums only; the fixed-lambda assembly never reads the values

  auto interior_point = [&](JetEvaluator& ev, std::size_t i, double& a0, Vec& g) {
    Jet jet;
    const PointEval pe = eval_interior(ev, theta, i, &jet);
    a0 += ppow(pe.r, p);
    const double fr = cI * dppow(pe.r, p);
    if (fr == 0.0) return;
    if (american_ && pe.obstacle) {
      ev.backward_value(theta, -fr, g);
    } else {
      const Jet seed =
          build_interior_seed(problem_, american_, pe.obstacle, false, pe.hv, jet, coeffs_[i],
                              fr, 0.0);
      ev.backward(theta, seed, g);
    }
  };
  auto boundary_point = [&](JetEvaluator& ev, std::size_t j, double& a0, Vec& g) {
    const double v = ev.value_tape(theta, pts_.boundary[j].data());
    a0 += ppow(v - target_boundary_[j], p);
    const double sv = cB * dppow(v - target_boundary_[j], p);
    if (sv != 0.0) ev.backward_value(theta, sv, g);
  };
  auto terminal_point = [&](JetEvaluator& ev, std::size_t j, double& a0, Vec& g) {
    const double v = ev.value_tape(theta, pts_.terminal[j].data());
    a0 += ppow(v - payoff_terminal_[j], p);
    const double sv = cT * dppow(v - payoff_terminal_[j], p);
    if (sv != 0.0) ev.backward_value(theta, sv, g);
  };

  if (chunked) {
    auto run_pass = [&](std::size_t n, auto&& point_fn, double& total) {
      std::vector<double> psum(chunk_count(n), 0.0);
      std::vector<Vec> part(chunk_count(n));
      parallel_chunks(n, [&](std::size_t c, std::size_t b, std::size_t e) {
        JetEvaluator ev(params.arch);
        part[c].assign(np, 0.0);
        double a0 = 0.0;
        for (std::size_t i = b; i < e; ++i) point_fn(ev, i, a0, part[c]);
        psum[c] = a0;
      });
      for (std::size_t c = 0; c < part.size(); ++c) {
        total += psum[c];
        for (std::size_t k = 0; k < np; ++k) grad[k] += part[c][k];
      }
    };
    run_pass(pts_.n_interior(), interior_point, s.sum_rp);
    run_pass(pts_.n_boundary(), boundary_point, s.sum_mb);
    run_pass(pts_.n_terminal(), terminal_point, s.sum_mt);
  } else {
    JetEvaluator ev(params.arch);
    for (std::size_t i = 0; i < pts_.n_interior(); ++i) interior_point(ev, i, s.sum_rp, grad);
    for (std::size_t j = 0; j < pts_.n_boundary(); ++j) boundary_point(ev, j, s.sum_mb, grad);
    for (std::size_t j = 0; j < pts_.n_terminal(); ++j) terminal_point(ev, j, s.sum_mt, grad);
  }
  return assemble(s);
}

LossBreakdown LossEvaluator::loss_grad_impl(const NetworkParams& params, Vec& grad,
                                            bool chunked) const {
  grad.assign(params.theta.size(), 0.0);
  if (cfg_.mode != LossMode::variance_normalization) return loss_grad_fused(params, grad, chunked);
  const double nB = (double)pts_.n_boundary();
  const double n0 = (double)pts_.n_terminal();
  const Phase1 s = forward_sums(params, chunked);
  const LossBreakdown out = assemble(s);
  SeedSpec spec;
  Vec uv;
  if (s.sum_dvn < kTinyDenominator) {
    spec.cI = 1.0;
  } else {
    spec.cI = 1.0 / s.sum_dvn;
    spec.aD = -s.sum_rp / (s.sum_dvn * s.sum_dvn);
  }
  const UnionStats u = union_stats(s.val_b, s.val_t, cfg_.p);
  const double nb_num = s.sum_mb / nB + s.sum_mt / n0;
  if (u.dv < kTinyDenominator) {
    spec.cB = 1.0 / nB;
    spec.cT = 1.0 / n0;
  } else {
    spec.cB = 1.0 / (u.dv * nB);
    spec.cT = 1.0 / (u.dv * n0);
    const std::size_t nu = pts_.n_union();
    uv.resize(nu);
    double gbar = 0.0;
    for (std::size_t k = 0; k < nu; ++k) {
      const double v = k < s.val_b.size() ? s.val_b[k] : s.val_t[k - s.val_b.size()];
      uv[k] = dppow(v - u.vbar, cfg_.p) / (double)nu;
      gbar += uv[k];
    }
    gbar /= (double)nu;
    const double scale = -nb_num / (u.dv * u.dv);
    for (double& x : uv) x = scale * (x - gbar);
    spec.uv = &uv;
  }
  accumulate_grads(params, spec, chunked, grad);
  return out;
}

LossBreakdown LossEvaluator::loss_grad(const NetworkParams& params, Vec& grad) const {
  return loss_grad_impl(params, grad, true);
}

LossBreakdown LossEvaluator::loss_grad_serial(const NetworkParams& params, Vec& grad) const {
  return loss_grad_impl(params, grad, false);
}

double LossEvaluator::estimate_optimal_lambda(const NetworkParams& params) const {
  const Phase1 s = forward_sums(params, true);
  const double num = measure_faces_ * (s.sum_vb / (double)pts_.n_boundary()) +
                     measure_terminal_ * (s.sum_vt / (double)pts_.n_terminal());
  const double den = measure_interior_ * (s.sum_dlam / (double)pts_.n_interior());
  if (num + den < kTinyDenominator) return 0.5;
  return std::clamp(num / (num + den), 0.0, 1.0);
}

std::pair<double, double> LossEvaluator::gradient_norms(const NetworkParams& params) const {
  Vec gi(params.theta.size(), 0.0), gb(params.theta.size(), 0.0);
  SeedSpec si, sb;
  si.cI = 1.0 / (double)pts_.n_interior();
  sb.cB = 1.0 / (double)pts_.n_boundary();
  sb.cT = 1.0 / (double)pts_.n_terminal();
  accumulate_grads(params, si, true, gi);
  accumulate_grads(params, sb, true, gb);
  auto norm = [](const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  return {norm(gi), norm(gb)};
}

LossBreakdown weighted_loss(const NetworkParams& params, const PricingProblem& problem,
                            const CollocationSet& pts, const LossConfig& cfg) {
  if (cfg.mode != LossMode::fixed_lambda)
    throw std::invalid_argument("weighted_loss requires fixed_lambda mode");
  return LossEvaluator(problem, pts, cfg).loss(params);
}

LossBreakdown variance_normalized_loss(const NetworkParams& params, const PricingProblem& problem,
                                       const CollocationSet& pts, const LossConfig& cfg) {
  if (cfg.mode != LossMode::variance_normalization)
    throw std::invalid_argument("variance_normalized_loss requires variance_normalization mode");
  return LossEvaluator(problem, pts, cfg).loss(params);
}

double optimal_lambda(const NetworkParams& params, const PricingProblem& problem,
                      const CollocationSet& pts) {
  LossConfig cfg;
  cfg.mode = LossMode::optimal_lambda;
  return LossEvaluator(problem, pts, cfg).estimate_optimal_lambda(params);
}

std::pair<double, double> gradient_norms(const NetworkParams& params,
                                         const PricingProblem& problem, const CollocationSet& pts,
                                         const LossConfig& cfg) {
  return LossEvaluator(problem, pts, cfg).gradient_norms(params);
}

LossMode loss_mode_from_string(const std::string& s) {
  if (s == "fixed_lambda") return LossMode::fixed_lambda;
  if (s == "variance_normalization") return LossMode::variance_normalization;
  if (s == "optimal_lambda") return LossMode::optimal_lambda;
  throw std::invalid_argument("unknown loss mode: " + s);
}

const char* to_string(LossMode m) {
  switch (m) {
    case LossMode::fixed_lambda: return "fixed_lambda";
    case LossMode::variance_normalization: return "variance_normalization";
    case LossMode::optimal_lambda: return "optimal_lambda";
  }
  return "?";
}

}  // namespace optionnet
