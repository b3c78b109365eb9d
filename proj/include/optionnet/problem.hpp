#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "optionnet/common.hpp"

namespace optionnet {

enum class Style { european, american };
enum class PayoffKind { put, call, exchange, max_call, spread, arithmetic_avg_put };
enum class FaceRule { dirichlet_formula, dirichlet_analytic, payoff, none };

struct MarketParams {
  double r = 0.0;
  std::vector<double> sigma;  // one entry per asset
  std::vector<double> delta;  // dividend yield per asset
  double rho = 0.0;           // correlation, 2D only
  double T = 1.0;
  double K = 0.0;             // strike; unused for exchange

  void validate(int dim) const;
};

// Network output and its derivatives with respect to the scaled inputs
// (t first, then spatial coordinates) at one point. hess_xx covers the
// spatial block only; time second derivatives never enter the operators.
struct Jet {
  int dim = 1;  // number of assets
  double value = 0.0;
  double grad_t = 0.0;
  std::array<double, 2> grad_x{};
  std::array<std::array<double, 2>, 2> hess_xx{};
};

struct PricingProblem {
  int dim = 1;
  Style style = Style::european;
  PayoffKind payoff_kind = PayoffKind::put;
  MarketParams market;
  std::vector<double> s_max;                     // domain upper bound per asset
  std::array<std::array<FaceRule, 2>, 2> rules;  // [asset][side]; side 0: S_i=0, side 1: S_i=S_max

  int input_dim() const { return dim + 1; }
  void validate() const;
};

// Builds a problem with the default domain (4K per asset unless given) and
// the boundary rules each style/payoff uses: explicit discounted formulas
// for 1D put/call, analytic prices on every face for 2D European options,
// and for 2D American problems no condition at S_i = 0 with the payoff
// imposed at S_i = S_max.
PricingProblem make_problem(int dim, Style style, PayoffKind kind, MarketParams market,
                            std::vector<double> s_max = {});

// Payoff H(x) at a spatial point in financial coordinates.
double payoff(const PricingProblem& p, const double* x);

// Largest payoff over the corners of the spatial domain; exact maximum for
// the convex payoffs in scope. Used for the scaled weight initialization.
double payoff_domain_max(const PricingProblem& p);

// Dirichlet target on face (asset, side) at financial (t, x). Throws if the
// face rule is none.
double boundary_target(const PricingProblem& p, double t, const double* x, int asset, int side);

// Classifies which face (or the terminal slice) the scaled point lies on and
// returns its target. Terminal points get the payoff. Throws if the point is
// not on any face or the face carries no condition.
double boundary_target(const PricingProblem& p, const double* y_scaled);

// Affine maps between financial coordinates (t, S_1..S_d) and the unit cube.
// Points are stored as [t, x_1, (x_2)].
void scale_point(const PricingProblem& p, const double* fin, double* scaled);
void unscale_point(const PricingProblem& p, const double* scaled, double* fin);

// Coefficients of the Black-Scholes operator on the *scaled* jet at scaled
// point y, so that L(v) = c_t*grad_t + sum c_i*grad_x[i] + sum c_ij*hess[i][j]
// + c_v*value in financial coordinates. The domain size cancels: first-order
// terms get (r-delta_i)*y_i, diffusion terms sigma^2 y_i^2 / 2, and so on.
struct ResidualCoeffs {
  int dim = 1;
  double c_t = 0.0;
  std::array<double, 2> c_x{};
  std::array<double, 2> c_xx{};
  double c_cross = 0.0;  // coefficient on hess_xx[0][1], taken once
  double c_v = 0.0;
};
ResidualCoeffs residual_coeffs(const PricingProblem& p, const double* y);

// L(v) at one point: dt v + A v - r v (1D) or the two-asset analogue with
// the mixed term (2D), assembled in financial coordinates.
double interior_residual(const PricingProblem& p, const Jet& jet, const double* y);

// max(H(x) - v, L(v)) for American problems.
double lcp_residual(const PricingProblem& p, const Jet& jet, const double* y, double payoff_at_y);

// Every operator term in absolute value; an upper bound for |L(v)|.
double residual_termwise_abs(const PricingProblem& p, const Jet& jet, const double* y);

const char* to_string(Style s);
const char* to_string(PayoffKind k);
PayoffKind payoff_kind_from_string(const std::string& s);
Style style_from_string(const std::string& s);

}  // namespace optionnet
