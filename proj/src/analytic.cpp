#include "optionnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace optionnet {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    g.x[i] = -z;
    g.x[n - 1 - i] = z;
    g.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    g.w[n - 1 - i] = g.w[i];
  }
  return g;
}

const GaussRule& rule16() {
  static const GaussRule g = gauss_legendre(16);
  return g;
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double bivar_norm_cdf(double a, double b, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho outside [-1,1]");
  if (rho >= 1.0 - 1e-12) return norm_cdf(std::min(a, b));
  if (rho <= -1.0 + 1e-12) return std::max(0.0, norm_cdf(a) + norm_cdf(b) - 1.0);
  // P(X<=a, Y<=b) = int_{-inf}^{a} phi(x) Phi((b - rho x)/sqrt(1-rho^2)) dx.
  const double cut = 9.0;
  const double hi = std::min(a, cut);
  if (hi <= -cut) return 0.0;
  const double s = std::sqrt(1.0 - rho * rho);
  // Narrow panels when the conditional CDF varies fast (rho near 1).
  const double width = std::max(0.02, 0.3 * s);
  const int panels = (int)std::ceil((hi + cut) / width);
  const GaussRule& g = rule16();
  const double h = (hi + cut) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = -cut + p * h;
    const double mid = lo + 0.5 * h;
    double local = 0.0;
    for (size_t k = 0; k < g.x.size(); ++k) {
      const double x = mid + 0.5 * h * g.x[k];
      local += g.w[k] * norm_pdf(x) * norm_cdf((b - rho * x) / s);
    }
    acc += 0.5 * h * local;
  }
  return std::clamp(acc, 0.0, 1.0);
}

double bs_european(double t, double S, const MarketParams& m, OptionKind kind) {
  const double tau = m.T - t;
  const double K = m.K;
  const double sign = kind == OptionKind::call ? 1.0 : -1.0;
  if (tau <= 0.0) return std::max(sign * (S - K), 0.0);
  const double df = std::exp(-m.r * tau);
  if (S <= 0.0) return kind == OptionKind::put ? K * df : 0.0;
  const double sigma = m.sigma[0];
  const double delta = m.delta[0];
  const double fwd = S * std::exp((m.r - delta) * tau);
  const double vol = sigma * std::sqrt(tau);
  if (vol < 1e-14 || K <= 0.0) {
    if (K <= 0.0) return kind == OptionKind::call ? S * std::exp(-delta * tau) : 0.0;
    return df * std::max(sign * (fwd - K), 0.0);
  }
  const double d1 = (std::log(fwd / K) + 0.5 * vol * vol) / vol;
  const double d2 = d1 - vol;
  return sign * (S * std::exp(-delta * tau) * norm_cdf(sign * d1) - K * df * norm_cdf(sign * d2));
}

double margrabe(double t, double S1, double S2, const MarketParams& m) {
  const double tau = m.T - t;
  if (tau <= 0.0) return std::max(S1 - S2, 0.0);
  if (S1 <= 0.0) return 0.0;
  const double f1 = S1 * std::exp(-m.delta[0] * tau);
  if (S2 <= 0.0) return f1;
  const double f2 = S2 * std::exp(-m.delta[1] * tau);
  const double s1 = m.sigma[0], s2 = m.sigma[1];
  const double sigma = std::sqrt(std::max(0.0, s1 * s1 - 2.0 * m.rho * s1 * s2 + s2 * s2));
  const double vol = sigma * std::sqrt(tau);
  if (vol < 1e-14) return std::max(f1 - f2, 0.0);
  const double d1 = (std::log(S1 / S2) + (m.delta[1] - m.delta[0]) * tau + 0.5 * vol * vol) / vol;
  const double d2 = d1 - vol;
  return f1 * norm_cdf(d1) - f2 * norm_cdf(d2);
}

double max_call(double t, double S1, double S2, const MarketParams& m) {
  const double tau = m.T - t;
  const double K = m.K;
  if (tau <= 0.0) return std::max(std::max(S1, S2) - K, 0.0);
  const MarketParams& mm = m;
  if (S1 <= 0.0 || S2 <= 0.0) {
    // One asset absorbed at zero: plain call on the other.
    MarketParams one = mm;
    const int alive = S1 <= 0.0 ? 1 : 0;
    one.sigma = {mm.sigma[alive]};
    one.delta = {mm.delta[alive]};
    return bs_european(t, alive == 0 ? S1 : S2, one, OptionKind::call);
  }
  const double s1 = mm.sigma[0], s2 = mm.sigma[1];
  const double sigA = std::sqrt(std::max(0.0, s1 * s1 - 2.0 * mm.rho * s1 * s2 + s2 * s2));
  if (K <= 0.0) {
    // max(S1,S2) = S2 + (S1 - S2)^+.
    return S2 * std::exp(-mm.delta[1] * tau) + margrabe(t, S1, S2, mm);
  }
  if (sigA * std::sqrt(tau) < 1e-14) {
    // Assets move in lockstep: the larger forward stays larger.
    const double f1 = S1 * std::exp((mm.r - mm.delta[0]) * tau);
    const double f2 = S2 * std::exp((mm.r - mm.delta[1]) * tau);
    MarketParams one = mm;
    const int big = f1 >= f2 ? 0 : 1;
    one.sigma = {mm.sigma[big]};
    one.delta = {mm.delta[big]};
    return bs_european(t, big == 0 ? S1 : S2, one, OptionKind::call);
  }
  const double rt = std::sqrt(tau);
  auto d1s = [&](double S, double sig, double del) {
    return (std::log(S / K) + (mm.r - del + 0.5 * sig * sig) * tau) / (sig * rt);
  };
  const double d11 = d1s(S1, s1, mm.delta[0]);
  const double d12 = d1s(S2, s2, mm.delta[1]);
  const double d21 = d11 - s1 * rt;
  const double d22 = d12 - s2 * rt;
  const double e1 =
      (std::log(S1 / S2) + (mm.delta[1] - mm.delta[0]) * tau + 0.5 * sigA * sigA * tau) /
      (sigA * rt);
  const double e2 =
      (std::log(S2 / S1) + (mm.delta[0] - mm.delta[1]) * tau + 0.5 * sigA * sigA * tau) /
      (sigA * rt);
  const double rho1 = std::clamp((s1 - mm.rho * s2) / sigA, -1.0, 1.0);
  const double rho2 = std::clamp((s2 - mm.rho * s1) / sigA, -1.0, 1.0);
  const double leg1 = S1 * std::exp(-mm.delta[0] * tau) * bivar_norm_cdf(d11, e1, rho1);
  const double leg2 = S2 * std::exp(-mm.delta[1] * tau) * bivar_norm_cdf(d12, e2, rho2);
  const double hit = 1.0 - bivar_norm_cdf(-d21, -d22, mm.rho);
  return leg1 + leg2 - K * std::exp(-mm.r * tau) * hit;
}

double binomial_american(const PricingProblem& p, int steps, double s0) {
  if (p.dim != 1) throw std::invalid_argument("binomial tree is single-asset");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  const MarketParams& m = p.market;
  const double dt = m.T / steps;
  const double u = std::exp(m.sigma[0] * std::sqrt(dt));
  const double d = 1.0 / u;
  const double grow = std::exp((m.r - m.delta[0]) * dt);
  const double q = (grow - d) / (u - d);
  if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("binomial step size too coarse");
  const double disc = std::exp(-m.r * dt);
  std::vector<double> v(steps + 1), spot(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    spot[j] = s0 * std::pow(u, 2 * j - steps);
    v[j] = payoff(p, &spot[j]);
  }
  const bool early = p.style == Style::american;
  for (int n = steps - 1; n >= 0; --n) {
    for (int j = 0; j <= n; ++j) {
      v[j] = disc * (q * v[j + 1] + (1.0 - q) * v[j]);
      if (early) {
        const double s = s0 * std::pow(u, 2 * j - n);
        v[j] = std::max(v[j], payoff(p, &s));
      }
    }
  }
  return v[0];
}

}  // namespace optionnet
