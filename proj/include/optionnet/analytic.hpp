#pragma once

#include "optionnet/problem.hpp"

namespace optionnet {

enum class OptionKind { put, call };

// Standard normal CDF.
double norm_cdf(double x);

// P(X <= a, Y <= b) for standard bivariate normals with correlation rho.
// Computed by integrating the conditional CDF against the marginal density
// with a fixed composite Gauss-Legendre rule; the |rho| -> 1 limits are
// handled separately.
double bivar_norm_cdf(double a, double b, double rho);

// Black-Scholes price at time t, spot S, with continuous dividend yield.
double bs_european(double t, double S, const MarketParams& m, OptionKind kind);

// Exchange option max(S1 - S2, 0), European.
double margrabe(double t, double S1, double S2, const MarketParams& m);

// Call on the maximum of two assets, max(max(S1,S2) - K, 0), European.
double max_call(double t, double S1, double S2, const MarketParams& m);

// CRR binomial tree price at t = 0 and spot s0, with continuous dividend
// yield; honors problem.style, so European problems price without the
// exercise max.
double binomial_american(const PricingProblem& p, int steps, double s0);

}  // namespace optionnet
