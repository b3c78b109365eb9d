#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optionnet/sampling.hpp"

using namespace optionnet;

static PricingProblem put1d() {
  MarketParams m;
  m.r = 0.04;
  m.sigma = {0.25};
  m.delta = {0.0};
  m.T = 1.0;
  m.K = 15.0;
  return make_problem(1, Style::european, PayoffKind::put, m);
}

static PricingProblem amer2d() {
  MarketParams m;
  m.r = 0.04;
  m.sigma = {0.25, 0.25};
  m.delta = {0.01, 0.01};
  m.rho = 0.1;
  m.T = 0.5;
  m.K = 15.0;
  // uneven domain so the two S_max faces get distinct sampling weights
  return make_problem(2, Style::american, PayoffKind::max_call, m, {60.0, 30.0});
}

TEST_CASE("interior points fill the open scaled box") {
  const PricingProblem p = put1d();
  const auto pts = sample_interior(5000, p, 7);
  CHECK(pts.size() == 5000);
  double lo = 1.0, hi = 0.0;
  for (const Vec& y : pts) {
    REQUIRE(y.size() == 2);
    for (double c : y) {
      CHECK(c > 0.0);
      CHECK(c < 1.0);
    }
    lo = std::min(lo, y[0]);
    hi = std::max(hi, y[0]);
  }
  // with 5000 draws the min and max hug the ends of the interval
  CHECK(lo < 2e-3);
  CHECK(hi > 1.0 - 2e-3);
}

TEST_CASE("terminal points sit exactly on the t = T slice") {
  const auto pts = sample_terminal(300, amer2d(), 11);
  CHECK(pts.size() == 300);
  for (const Vec& y : pts) {
    REQUIRE(y.size() == 3);
    CHECK(y[0] == 1.0);
    CHECK(y[1] > 0.0);
    CHECK(y[1] < 1.0);
    CHECK(y[2] > 0.0);
    CHECK(y[2] < 1.0);
  }
}

TEST_CASE("boundary points lie on tagged admissible faces") {
  const PricingProblem p = amer2d();  // only the two S_max faces admit conditions
  std::vector<std::array<int, 2>> faces;
  const auto pts = sample_boundary(4000, p, 3, &faces);
  REQUIRE(faces.size() == pts.size());
  std::size_t count[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto [a, side] = faces[k];
    CHECK(p.rules[a][side] != FaceRule::none);
    CHECK(side == 1);
    CHECK(pts[k][1 + a] == 1.0);
    CHECK(pts[k][0] > 0.0);
    CHECK(pts[k][0] < 1.0);
    const double other = pts[k][1 + (1 - a)];
    CHECK(other > 0.0);
    CHECK(other < 1.0);
    ++count[a][side];
  }
  // face areas are T x S_max of the other asset: 30 vs 60, so asset 0's face
  // draws 1/3 of the points; 4000 draws put the multinomial sigma near 30
  const double n = (double)pts.size();
  CHECK(std::fabs((double)count[0][1] - n / 3.0) < 5.0 * std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0)));
  CHECK(count[0][1] + count[1][1] == pts.size());

  // 1D put: both faces admissible with equal weight
  const PricingProblem q = put1d();
  std::vector<std::array<int, 2>> f1;
  const auto b1 = sample_boundary(2000, q, 5, &f1);
  std::size_t lo = 0;
  for (std::size_t k = 0; k < b1.size(); ++k) {
    CHECK(b1[k][1] == (double)f1[k][1]);
    if (f1[k][1] == 0) ++lo;
  }
  CHECK(std::fabs((double)lo - 1000.0) < 5.0 * std::sqrt(2000.0 * 0.25));
}

TEST_CASE("sampling is deterministic and streams are independent") {
  const PricingProblem p = amer2d();
  const CollocationSet a = sample_collocation(p, 200, 60, 50, 99);
  const CollocationSet b = sample_collocation(p, 200, 60, 50, 99);
  CHECK(a.interior == b.interior);
  CHECK(a.boundary == b.boundary);
  CHECK(a.boundary_faces == b.boundary_faces);
  CHECK(a.terminal == b.terminal);

  const CollocationSet c = sample_collocation(p, 200, 60, 50, 100);
  CHECK(a.interior != c.interior);
  CHECK(a.boundary != c.boundary);
  CHECK(a.terminal != c.terminal);

  // the three sets use distinct derived streams: interior coordinates differ
  // from terminal spatial coordinates under the same master seed
  bool same = true;
  for (std::size_t k = 0; k < 50 && same; ++k)
    same = a.interior[k][1] == a.terminal[k][1] && a.interior[k][2] == a.terminal[k][2];
  CHECK(!same);
}

TEST_CASE("collocation set sizes and the boundary union layout") {
  const PricingProblem p = put1d();
  const CollocationSet s = sample_collocation(p, 120, 35, 25, 1);
  CHECK(s.seed == 1);
  CHECK(s.n_interior() == 120);
  CHECK(s.n_boundary() == 35);
  CHECK(s.n_terminal() == 25);
  CHECK(s.n_union() == 60);
  for (std::size_t k = 0; k < s.n_boundary(); ++k) CHECK(s.boundary_union[k] == s.boundary[k]);
  for (std::size_t k = 0; k < s.n_terminal(); ++k)
    CHECK(s.boundary_union[s.n_boundary() + k] == s.terminal[k]);
}

TEST_CASE("degenerate requests throw") {
  const PricingProblem p = put1d();
  CHECK_THROWS_AS((void)sample_interior(0, p, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_boundary(0, p, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_terminal(0, p, 1), std::invalid_argument);

  PricingProblem bare = p;
  bare.rules[0][0] = FaceRule::none;
  bare.rules[0][1] = FaceRule::none;
  CHECK_THROWS_AS((void)sample_boundary(10, bare, 1), std::invalid_argument);
}
