#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "optionnet/grid.hpp"

using namespace optionnet;

static PricingProblem demo_problem(int dim) {
  MarketParams m;
  m.r = 0.04;
  m.sigma.assign(dim, 0.25);
  m.delta.assign(dim, 0.0);
  m.rho = dim == 2 ? 0.1 : 0.0;
  m.T = 1.0;
  m.K = 15.0;
  return make_problem(dim, Style::european, dim == 1 ? PayoffKind::put : PayoffKind::max_call, m);
}

TEST_CASE("axes and value layout") {
  const PricingProblem p = demo_problem(1);
  GridSurface s = make_surface(p, 4, 5);
  CHECK(s.t_axis.size() == 4);
  CHECK(s.s_axes.size() == 1);
  CHECK(s.s_axes[0].size() == 5);
  CHECK(s.values.size() == 20);
  CHECK(s.node_count() == 20);
  CHECK(s.t_axis.front() == 0.0);
  CHECK(s.t_axis.back() == p.market.T);
  CHECK(s.s_axes[0].front() == 0.0);
  CHECK(s.s_axes[0].back() == p.s_max[0]);
  CHECK(s.t_axis[1] == doctest::Approx(p.market.T / 3.0).epsilon(1e-15));
  for (double v : s.values) CHECK(v == 0.0);

  const PricingProblem q = demo_problem(2);
  GridSurface s2 = make_surface(q, 3, 4);
  CHECK(s2.s_axes.size() == 2);
  CHECK(s2.values.size() == 3 * 16);
  // values are time-major, then lexicographic in (i1, i2)
  for (std::size_t k = 0; k < s2.values.size(); ++k) s2.values[k] = (double)k;
  CHECK(s2.index(2, 3, 1) == 2 * 16 + 3 * 4 + 1);
  CHECK(s2.at(2, 3, 1) == double(2 * 16 + 3 * 4 + 1));
}

TEST_CASE("csv round trip is exact") {
  const PricingProblem p = demo_problem(2);
  GridSurface s = make_surface(p, 3, 5);
  std::uint64_t state = 88172645463325252ull;
  for (double& v : s.values) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    v = 1e-9 * (double)(state % 2000000000ull) - 1.0 + 0.123456789123456789;
  }
  const std::string path = (std::filesystem::temp_directory_path() / "onet_grid_rt.csv").string();
  write_surface_csv(s, path);
  const GridSurface r = read_surface_csv(path, p);
  REQUIRE(r.values.size() == s.values.size());
  for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(r.values[k] == s.values[k]);
  REQUIRE(r.t_axis.size() == s.t_axis.size());
  for (std::size_t k = 0; k < s.t_axis.size(); ++k) CHECK(r.t_axis[k] == s.t_axis[k]);
  for (std::size_t a = 0; a < s.s_axes.size(); ++a)
    for (std::size_t k = 0; k < s.s_axes[a].size(); ++k) CHECK(r.s_axes[a][k] == s.s_axes[a][k]);
  std::remove(path.c_str());
}

TEST_CASE("relative l2 error identities") {
  const PricingProblem p = demo_problem(1);
  GridSurface ref = make_surface(p, 3, 7);
  for (std::size_t k = 0; k < ref.values.size(); ++k) ref.values[k] = 1.0 + (double)k;
  GridSurface cand = ref;
  CHECK(relative_l2_error(cand, ref) == 0.0);

  for (double& v : cand.values) v *= 1.01;
  CHECK(relative_l2_error(cand, ref) == doctest::Approx(0.01).epsilon(1e-12));

  // scaling both surfaces leaves the relative error unchanged
  GridSurface ref2 = ref, cand2 = cand;
  for (double& v : ref2.values) v *= 7.5;
  for (double& v : cand2.values) v *= 7.5;
  CHECK(relative_l2_error(cand2, ref2) ==
        doctest::Approx(relative_l2_error(cand, ref)).epsilon(1e-14));

  // one-node perturbation matches the hand value
  GridSurface cand3 = ref;
  cand3.values[4] += 3.0;
  double nrm = 0.0;
  for (double v : ref.values) nrm += v * v;
  CHECK(relative_l2_error(cand3, ref) == doctest::Approx(3.0 / std::sqrt(nrm)).epsilon(1e-14));
}

TEST_CASE("relative l2 error rejects mismatched grids") {
  const PricingProblem p = demo_problem(1);
  GridSurface a = make_surface(p, 3, 7);
  GridSurface b = make_surface(p, 3, 8);
  for (double& v : a.values) v = 1.0;
  for (double& v : b.values) v = 1.0;
  CHECK_THROWS_AS((void)relative_l2_error(b, a), std::invalid_argument);

  GridSurface c = make_surface(p, 3, 7);
  for (double& v : c.values) v = 1.0;
  c.s_axes[0][2] += 1e-6;  // same shape, shifted node
  CHECK_THROWS_AS((void)relative_l2_error(c, a), std::invalid_argument);

  GridSurface z = make_surface(p, 3, 7);  // zero reference norm
  GridSurface z2 = z;
  CHECK_THROWS_AS((void)relative_l2_error(z2, z), std::invalid_argument);
}
