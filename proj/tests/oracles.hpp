// Independent quadrature oracles used by the tests. Everything here is
// derived from first principles (densities + adaptive Simpson) rather than
// from the closed forms under test; the only shared ingredient is std::erfc.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double Phi(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

inline double simpson_rec(const std::function<double(double)>& f, double a, double fa, double m,
                          double fm, double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 48) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return simpson_rec(f, a, fa, m, fm, b, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Normal CDF by integrating the density.
inline double norm_cdf_quad(double x) {
  if (x > 0.0) return 1.0 - norm_cdf_quad(-x);
  return adaptive_simpson([](double t) { return phi(t); }, -13.0, x, 1e-14);
}

// Bivariate normal CDF as a raw double integral of the joint density
// (independent of any 1D reduction).
inline double bivar_cdf_quad(double a, double b, double rho, double tol = 1e-11) {
  const double lo = -9.0;
  const double det = std::sqrt(1.0 - rho * rho);
  auto outer = [&](double x) {
    auto inner = [&](double y) {
      const double q = (x * x - 2.0 * rho * x * y + y * y) / (det * det);
      return std::exp(-0.5 * q) / (2.0 * M_PI * det);
    };
    return adaptive_simpson(inner, lo, b, tol);
  };
  return adaptive_simpson(outer, lo, std::min(a, 9.0), tol);
}

// Undiscounted E[(S-K)+] for lognormal S with forward F and total volatility v.
inline double black_call(double F, double K, double v) {
  if (K <= 0.0) return F - K;
  if (v <= 0.0) return std::max(F - K, 0.0);
  const double d1 = (std::log(F / K) + 0.5 * v * v) / v;
  return F * Phi(d1) - K * Phi(d1 - v);
}

struct TwoAsset {
  double s1, s2, k;
  double sig1, sig2, rho, r, d1, d2, T;
};

// European exchange value by conditioning on the second asset's driver: the
// inner expectation is an exact Black call with a random strike, the outer
// integral is smooth.
inline double exchange_quad(const TwoAsset& p) {
  const double vbar = p.sig1 * std::sqrt((1.0 - p.rho * p.rho) * p.T);
  auto g = [&](double z) {
    const double s2 =
        p.s2 * std::exp((p.r - p.d2 - 0.5 * p.sig2 * p.sig2) * p.T + p.sig2 * std::sqrt(p.T) * z);
    const double f1 = p.s1 * std::exp((p.r - p.d1) * p.T - 0.5 * p.sig1 * p.sig1 * p.T +
                                      p.sig1 * std::sqrt(p.T) * p.rho * z + 0.5 * vbar * vbar);
    return phi(z) * black_call(f1, s2, vbar);
  };
  return std::exp(-p.r * p.T) * adaptive_simpson(g, -10.0, 10.0, 1e-13);
}

// European max-call by conditioning on the first asset's driver; the single
// C0 kink of the outer integrand (where s1 crosses K) is split explicitly.
inline double max_call_quad(const TwoAsset& p) {
  const double vbar = p.sig2 * std::sqrt((1.0 - p.rho * p.rho) * p.T);
  auto g = [&](double z) {
    const double s1 =
        p.s1 * std::exp((p.r - p.d1 - 0.5 * p.sig1 * p.sig1) * p.T + p.sig1 * std::sqrt(p.T) * z);
    const double f2 = p.s2 * std::exp((p.r - p.d2) * p.T - 0.5 * p.sig2 * p.sig2 * p.T +
                                      p.sig2 * std::sqrt(p.T) * p.rho * z + 0.5 * vbar * vbar);
    const double inner = s1 >= p.k ? (s1 - p.k) + black_call(f2, s1, vbar)
                                   : black_call(f2, p.k, vbar);
    return phi(z) * inner;
  };
  double zs = 10.0;
  if (p.k > 0.0 && p.s1 > 0.0)
    zs = (std::log(p.k / p.s1) - (p.r - p.d1 - 0.5 * p.sig1 * p.sig1) * p.T) /
         (p.sig1 * std::sqrt(p.T));
  zs = std::clamp(zs, -10.0, 10.0);
  return std::exp(-p.r * p.T) * (adaptive_simpson(g, -10.0, zs, 5e-14) +
                                 adaptive_simpson(g, zs, 10.0, 5e-14));
}

// One-asset European value by integrating the payoff against the lognormal
// density, splitting at the strike.
inline double bs_quad(double t, double s, double K, double sig, double r, double d, double T,
                      bool is_call) {
  const double tau = T - t;
  if (tau <= 0.0) return std::max(is_call ? s - K : K - s, 0.0);
  const double v = sig * std::sqrt(tau);
  auto spot = [&](double z) { return s * std::exp((r - d - 0.5 * sig * sig) * tau + v * z); };
  auto g = [&](double z) {
    const double x = spot(z);
    return phi(z) * std::max(is_call ? x - K : K - x, 0.0);
  };
  double zs = (std::log(K / s) - (r - d - 0.5 * sig * sig) * tau) / v;
  zs = std::clamp(zs, -12.0, 12.0);
  return std::exp(-r * tau) * (adaptive_simpson(g, -12.0, zs, 5e-15) +
                               adaptive_simpson(g, zs, 12.0, 5e-15));
}

}  // namespace oracle
