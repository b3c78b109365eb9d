#include "optionnet/problem.hpp"

#include <algorithm>
#include <cmath>

#include "optionnet/analytic.hpp"

namespace optionnet {

void MarketParams::validate(int dim) const {
  if ((int)sigma.size() != dim) throw std::invalid_argument("sigma size must equal dim");
  if ((int)delta.size() != dim) throw std::invalid_argument("delta size must equal dim");
  for (double s : sigma)
    if (s < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  if (T <= 0.0) throw std::invalid_argument("T must be positive");
  if (dim == 2 && (rho < -1.0 || rho > 1.0)) throw std::invalid_argument("rho outside [-1,1]");
}

void PricingProblem::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  market.validate(dim);
  if ((int)s_max.size() != dim) throw std::invalid_argument("s_max size must equal dim");
  for (double s : s_max)
    if (s <= 0.0) throw std::invalid_argument("s_max must be positive");
  switch (payoff_kind) {
    case PayoffKind::put:
    case PayoffKind::call:
      if (dim != 1) throw std::invalid_argument("put/call payoffs are single-asset");
      break;
    case PayoffKind::exchange:
    case PayoffKind::max_call:
    case PayoffKind::spread:
    case PayoffKind::arithmetic_avg_put:
      if (dim != 2) throw std::invalid_argument("two-asset payoff on 1D problem");
      break;
  }
  if (payoff_kind != PayoffKind::exchange && market.K < 0.0)
    throw std::invalid_argument("strike must be nonnegative");
}

static std::array<std::array<FaceRule, 2>, 2> default_rules(int dim, Style style) {
  std::array<std::array<FaceRule, 2>, 2> r{};
  if (dim == 1) {
    r[0][0] = FaceRule::dirichlet_formula;
    r[0][1] = FaceRule::dirichlet_formula;
  } else if (style == Style::european) {
    for (int a = 0; a < 2; ++a)
      for (int s = 0; s < 2; ++s) r[a][s] = FaceRule::dirichlet_analytic;
  } else {
    for (int a = 0; a < 2; ++a) {
      r[a][0] = FaceRule::none;
      r[a][1] = FaceRule::payoff;
    }
  }
  return r;
}

PricingProblem make_problem(int dim, Style style, PayoffKind kind, MarketParams market,
                            std::vector<double> s_max) {
  PricingProblem p;
  p.dim = dim;
  p.style = style;
  p.payoff_kind = kind;
  p.market = std::move(market);
  if (s_max.empty()) {
    double ref = p.market.K > 0.0 ? 4.0 * p.market.K : 4.0;
    p.s_max.assign(dim, ref);
  } else {
    p.s_max = std::move(s_max);
  }
  p.rules = default_rules(dim, style);
  p.validate();
  return p;
}

double payoff(const PricingProblem& p, const double* x) {
  const double K = p.market.K;
  switch (p.payoff_kind) {
    case PayoffKind::put:
      return std::max(K - x[0], 0.0);
    case PayoffKind::call:
      return std::max(x[0] - K, 0.0);
    case PayoffKind::exchange:
      return std::max(x[0] - x[1], 0.0);
    case PayoffKind::max_call:
      return std::max(std::max(x[0], x[1]) - K, 0.0);
    case PayoffKind::spread:
      return std::max(x[0] - x[1] - K, 0.0);
    case PayoffKind::arithmetic_avg_put:
      return std::max(K - 0.5 * (x[0] + x[1]), 0.0);
  }
  return 0.0;
}

double payoff_domain_max(const PricingProblem& p) {
  double best = 0.0;
  if (p.dim == 1) {
    for (double x : {0.0, p.s_max[0]}) best = std::max(best, payoff(p, &x));
  } else {
    for (double x0 : {0.0, p.s_max[0]})
      for (double x1 : {0.0, p.s_max[1]}) {
        double pt[2] = {x0, x1};
        best = std::max(best, payoff(p, pt));
      }
  }
  return best;
}

static double analytic_price(const PricingProblem& p, double t, const double* x) {
  switch (p.payoff_kind) {
    case PayoffKind::put:
      return bs_european(t, x[0], p.market, OptionKind::put);
    case PayoffKind::call:
      return bs_european(t, x[0], p.market, OptionKind::call);
    case PayoffKind::exchange:
      return margrabe(t, x[0], x[1], p.market);
    case PayoffKind::max_call:
      return max_call(t, x[0], x[1], p.market);
    default:
      throw std::invalid_argument("no closed form for this payoff");
  }
}

double boundary_target(const PricingProblem& p, double t, const double* x, int asset, int side) {
  const FaceRule rule = p.rules[asset][side];
  const MarketParams& m = p.market;
  const double tau = m.T - t;
  double g = 0.0;
  switch (rule) {
    case FaceRule::none:
      throw std::logic_error("boundary_target on a face without a condition");
    case FaceRule::payoff:
      g = payoff(p, x);
      break;
    case FaceRule::dirichlet_analytic:
      g = analytic_price(p, t, x);
      break;
    case FaceRule::dirichlet_formula:
      // 1D discounted formulas
      if (p.payoff_kind == PayoffKind::put)
        g = side == 0 ? m.K * std::exp(-m.r * tau) : 0.0;
      else if (p.payoff_kind == PayoffKind::call)
        g = side == 0 ? 0.0 : p.s_max[0] - m.K * std::exp(-m.r * tau);
      else
        throw std::logic_error("dirichlet_formula rule outside 1D put/call");
      break;
  }
  // Early exercise keeps an American value at or above the payoff, so the
  // target is floored at the obstacle (a put's discounted bound Ke^{-r tau}
  // at S = 0 sits below the immediate-exercise value K).
  if (p.style == Style::american) g = std::max(g, payoff(p, x));
  return g;
}

double boundary_target(const PricingProblem& p, const double* y_scaled) {
  const double eps = 1e-12;
  double fin[3];
  unscale_point(p, y_scaled, fin);
  if (std::abs(y_scaled[0] - 1.0) <= eps) return payoff(p, fin + 1);
  bool on_face = false;
  for (int a = 0; a < p.dim; ++a)
    for (int side = 0; side < 2; ++side)
      if (std::abs(y_scaled[1 + a] - (double)side) <= eps) {
        on_face = true;
        if (p.rules[a][side] != FaceRule::none) return boundary_target(p, fin[0], fin + 1, a, side);
      }
  if (on_face) throw std::logic_error("boundary_target on a face without a condition");
  throw std::invalid_argument("point is not on any boundary face");
}

void scale_point(const PricingProblem& p, const double* fin, double* scaled) {
  scaled[0] = fin[0] / p.market.T;
  for (int i = 0; i < p.dim; ++i) scaled[1 + i] = fin[1 + i] / p.s_max[i];
}

void unscale_point(const PricingProblem& p, const double* scaled, double* fin) {
  fin[0] = scaled[0] * p.market.T;
  for (int i = 0; i < p.dim; ++i) fin[1 + i] = scaled[1 + i] * p.s_max[i];
}

ResidualCoeffs residual_coeffs(const PricingProblem& p, const double* y) {
  ResidualCoeffs c;
  c.dim = p.dim;
  const MarketParams& m = p.market;
  c.c_t = 1.0 / m.T;
  for (int i = 0; i < p.dim; ++i) {
    const double yi = y[1 + i];
    c.c_x[i] = (m.r - m.delta[i]) * yi;
    c.c_xx[i] = 0.5 * m.sigma[i] * m.sigma[i] * yi * yi;
  }
  if (p.dim == 2) c.c_cross = m.rho * m.sigma[0] * m.sigma[1] * y[1] * y[2];
  c.c_v = -m.r;
  return c;
}

double interior_residual(const PricingProblem& p, const Jet& jet, const double* y) {
  const ResidualCoeffs c = residual_coeffs(p, y);
  double r = c.c_t * jet.grad_t + c.c_v * jet.value;
  for (int i = 0; i < p.dim; ++i) r += c.c_x[i] * jet.grad_x[i] + c.c_xx[i] * jet.hess_xx[i][i];
  if (p.dim == 2) r += c.c_cross * jet.hess_xx[0][1];
  return r;
}

double lcp_residual(const PricingProblem& p, const Jet& jet, const double* y, double payoff_at_y) {
  return std::max(payoff_at_y - jet.value, interior_residual(p, jet, y));
}

double residual_termwise_abs(const PricingProblem& p, const Jet& jet, const double* y) {
  const ResidualCoeffs c = residual_coeffs(p, y);
  double r = std::abs(c.c_t * jet.grad_t) + std::abs(c.c_v * jet.value);
  for (int i = 0; i < p.dim; ++i)
    r += std::abs(c.c_x[i] * jet.grad_x[i]) + std::abs(c.c_xx[i] * jet.hess_xx[i][i]);
  if (p.dim == 2) r += std::abs(c.c_cross * jet.hess_xx[0][1]);
  return r;
}

const char* to_string(Style s) { return s == Style::european ? "european" : "american"; }

const char* to_string(PayoffKind k) {
  switch (k) {
    case PayoffKind::put: return "put";
    case PayoffKind::call: return "call";
    case PayoffKind::exchange: return "exchange";
    case PayoffKind::max_call: return "max_call";
    case PayoffKind::spread: return "spread";
    case PayoffKind::arithmetic_avg_put: return "arithmetic_avg_put";
  }
  return "?";
}

PayoffKind payoff_kind_from_string(const std::string& s) {
  if (s == "put") return PayoffKind::put;
  if (s == "call") return PayoffKind::call;
  if (s == "exchange") return PayoffKind::exchange;
  if (s == "max_call") return PayoffKind::max_call;
  if (s == "spread") return PayoffKind::spread;
  if (s == "arithmetic_avg_put") return PayoffKind::arithmetic_avg_put;
  throw std::invalid_argument("unknown payoff: " + s);
}

Style style_from_string(const std::string& s) {
  if (s == "european") return Style::european;
  if (s == "american") return Style::american;
  throw std::invalid_argument("unknown style: " + s);
}

}  // namespace optionnet
