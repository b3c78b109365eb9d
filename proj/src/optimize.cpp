#include "optionnet/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace optionnet {

void OptimizerConfig::validate() const {
  if (memory < 1) throw std::invalid_argument("memory must be >= 1");
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    throw std::invalid_argument("need 0 < c1 < c2 < 1");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (max_line_search_steps < 2) throw std::invalid_argument("max_line_search_steps too small");
  if (restart_cycle < 1) throw std::invalid_argument("restart_cycle must be >= 1");
  if (plateau_window < 1) throw std::invalid_argument("plateau_window must be >= 1");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::gradient_tolerance: return "gradient_tolerance";
    case StopReason::loss_plateau: return "loss_plateau";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::line_search_failed: return "line_search_failed";
  }
  return "?";
}

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0, f = 0.0;
};

// phi(a) = f(x + a d). Evaluations fill g_new so the accepted gradient is
// available without an extra call.
struct LinePhi {
  const std::function<double(const Vec&, Vec&)>& fg;
  const Vec& x;
  const Vec& d;
  Vec& xtrial;
  Vec& g_new;
  double operator()(double a, double& dphi) {
    for (std::size_t i = 0; i < x.size(); ++i) xtrial[i] = x[i] + a * d[i];
    double f = fg(xtrial, g_new);
    if (!std::isfinite(f)) {
      dphi = std::numeric_limits<double>::infinity();
      return std::numeric_limits<double>::infinity();
    }
    dphi = dot(g_new, d);
    return f;
  }
};

// Minimizer of the quadratic through (lo, f_lo, d_lo) and (hi, f_hi),
// safeguarded to the inner 10-90% of the interval; bisection otherwise.
double interp_quadratic(double lo, double f_lo, double d_lo, double hi, double f_hi) {
  const double h = hi - lo;
  const double denom = 2.0 * (f_hi - f_lo - d_lo * h);
  double a = lo + 0.5 * h;
  if (std::isfinite(denom) && denom != 0.0) {
    const double cand = lo - d_lo * h * h / denom;
    const double u = (cand - lo) / h;
    if (std::isfinite(cand) && u > 0.1 && u < 0.9) a = cand;
  }
  return a;
}

// Strong-Wolfe line search, bracketing then zoom (Nocedal & Wright 3.5/3.6).
LineSearchResult wolfe_search(LinePhi& phi, double f0, double dphi0, double alpha0,
                              const OptimizerConfig& cfg) {
  const double c1 = cfg.wolfe_c1, c2 = cfg.wolfe_c2;
  int evals = 0;
  auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi) {
    LineSearchResult r;
    while (evals < cfg.max_line_search_steps) {
      const double a = interp_quadratic(lo, f_lo, d_lo, hi, f_hi);
      double d_a;
      const double f_a = phi(a, d_a);
      ++evals;
      if (f_a > f0 + c1 * a * dphi0 || f_a >= f_lo) {
        hi = a;
        f_hi = f_a;
      } else {
        if (std::abs(d_a) <= -c2 * dphi0) {
          r.ok = true;
          r.alpha = a;
          r.f = f_a;
          return r;
        }
        if (d_a * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
        }
        lo = a;
        f_lo = f_a;
        d_lo = d_a;
      }
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return LineSearchResult{};
  };

  double a_prev = 0.0, f_prev = f0, d_prev = dphi0;
  double a = alpha0;
  const double a_max = 1e6;
  while (evals < cfg.max_line_search_steps) {
    double d_a;
    const double f_a = phi(a, d_a);
    ++evals;
    if (f_a > f0 + c1 * a * dphi0 || (evals > 1 && f_a >= f_prev))
      return zoom(a_prev, f_prev, d_prev, a, f_a);
    if (std::abs(d_a) <= -c2 * dphi0) return {true, a, f_a};
    if (d_a >= 0.0) return zoom(a, f_a, d_a, a_prev, f_prev);
    a_prev = a;
    f_prev = f_a;
    d_prev = d_a;
    if (a >= a_max) break;
    a = std::min(2.0 * a, a_max);
  }
  return {};
}

}  // namespace

TrainHistory minimize(const std::function<double(const Vec&, Vec&)>& fg, Vec& theta,
                      const OptimizerConfig& cfg, const MinimizeCallbacks& cb) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };
  auto lambda_now = [&] { return cb.current_lambda ? cb.current_lambda() : 0.0; };

  const std::size_t n = theta.size();
  TrainHistory hist;
  Vec g(n, 0.0), g_new(n, 0.0), d(n, 0.0), xtrial(n, 0.0);
  double f = fg(theta, g);
  if (!std::isfinite(f)) throw std::invalid_argument("objective not finite at start");
  hist.records.push_back({0, f, norm(g), lambda_now(), elapsed()});

  std::deque<Vec> mem_s, mem_y;
  std::deque<double> mem_rho;
  Vec alpha_buf(cfg.memory, 0.0);
  std::deque<double> plateau{f};

  if (norm(g) <= cfg.gradient_tolerance) {
    hist.reason = StopReason::gradient_tolerance;
    return hist;
  }

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    // Two-loop recursion for d = -H g.
    d = g;
    const int m = (int)mem_s.size();
    for (int i = m - 1; i >= 0; --i) {
      alpha_buf[i] = mem_rho[i] * dot(mem_s[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha_buf[i] * mem_y[i][j];
    }
    if (m > 0) {
      const double gamma = dot(mem_s[m - 1], mem_y[m - 1]) / dot(mem_y[m - 1], mem_y[m - 1]);
      for (double& x : d) x *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = mem_rho[i] * dot(mem_y[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] += (alpha_buf[i] - beta) * mem_s[i][j];
    }
    for (double& x : d) x = -x;

    double dphi0 = dot(g, d);
    bool steepest = m == 0;
    if (dphi0 >= 0.0) {
      // Not a descent direction; fall back to steepest descent.
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dphi0 = -dot(g, g);
      steepest = true;
    }
    double alpha0 = steepest ? 1.0 / std::max(1.0, norm(g)) : 1.0;

    LinePhi phi{fg, theta, d, xtrial, g_new};
    LineSearchResult ls = wolfe_search(phi, f, dphi0, alpha0, cfg);
    if (!ls.ok && !steepest) {
      // Retry from scratch along -g.
      mem_s.clear();
      mem_y.clear();
      mem_rho.clear();
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dphi0 = -dot(g, g);
      alpha0 = 1.0 / std::max(1.0, norm(g));
      ls = wolfe_search(phi, f, dphi0, alpha0, cfg);
    }
    if (!ls.ok) {
      hist.reason = StopReason::line_search_failed;
      return hist;
    }

    // Accept: xtrial/g_new hold the last evaluated trial, which is the
    // accepted point since wolfe_search returns right after evaluating it.
    Vec s(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = xtrial[j] - theta[j];
      y[j] = g_new[j] - g[j];
    }
    theta = xtrial;
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm(s) * norm(y)) {
      mem_s.push_back(std::move(s));
      mem_y.push_back(std::move(y));
      mem_rho.push_back(1.0 / sy);
      if ((int)mem_s.size() > cfg.memory) {
        mem_s.pop_front();
        mem_y.pop_front();
        mem_rho.pop_front();
      }
    }
    f = ls.f;
    g = g_new;
    const double gn = norm(g);
    hist.records.push_back({k, f, gn, lambda_now(), elapsed()});
    hist.iterations = k;
    if (cb.on_iteration) cb.on_iteration(k, theta, f, gn);

    if (gn <= cfg.gradient_tolerance) {
      hist.reason = StopReason::gradient_tolerance;
      return hist;
    }
    plateau.push_back(f);
    if ((int)plateau.size() > cfg.plateau_window + 1) plateau.pop_front();
    if ((int)plateau.size() == cfg.plateau_window + 1) {
      const double f_old = plateau.front();
      if (f_old - f <= cfg.loss_tolerance * std::max(1.0, std::abs(f_old))) {
        hist.reason = StopReason::loss_plateau;
        return hist;
      }
    }
    if (cb.on_cycle && k % cfg.restart_cycle == 0 && k < cfg.max_iterations) {
      if (cb.on_cycle(k, theta)) {
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        f = fg(theta, g);
        plateau.clear();
        plateau.push_back(f);
      }
    }
  }
  hist.reason = StopReason::max_iterations;
  return hist;
}

}  // namespace optionnet
