#include "optionnet/sampling.hpp"

#include <stdexcept>

namespace optionnet {

std::vector<Vec> sample_interior(std::size_t n, const PricingProblem& p, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one interior point");
  Rng rng(seed);
  std::vector<Vec> pts(n);
  for (Vec& y : pts) {
    y.resize(p.input_dim());
    for (double& c : y) c = rng.uniform();
  }
  return pts;
}

std::vector<Vec> sample_boundary(std::size_t n, const PricingProblem& p, std::uint64_t seed,
                                 std::vector<std::array<int, 2>>* faces) {
  if (n == 0) throw std::invalid_argument("need at least one boundary point");
  // Admissible faces with areas in financial coordinates (common factor T
  // dropped): a 1D face is a t-line, a 2D face spans the other asset's range.
  std::vector<std::array<int, 2>> ids;
  Vec weight;
  for (int a = 0; a < p.dim; ++a)
    for (int side = 0; side < 2; ++side)
      if (p.rules[a][side] != FaceRule::none) {
        ids.push_back({a, side});
        weight.push_back(p.dim == 1 ? 1.0 : p.s_max[1 - a]);
      }
  if (ids.empty()) throw std::invalid_argument("no admissible boundary faces");
  Vec cum(weight.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) cum[i] = total += weight[i];
  Rng rng(seed);
  std::vector<Vec> pts(n);
  if (faces) faces->resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * total;
    std::size_t f = 0;
    while (f + 1 < cum.size() && u > cum[f]) ++f;
    const auto [a, side] = ids[f];
    Vec& y = pts[k];
    y.assign(p.input_dim(), 0.0);
    y[0] = rng.uniform();
    y[1 + a] = (double)side;
    if (p.dim == 2) y[1 + (1 - a)] = rng.uniform();
    if (faces) (*faces)[k] = {a, side};
  }
  return pts;
}

std::vector<Vec> sample_terminal(std::size_t n, const PricingProblem& p, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one terminal point");
  Rng rng(seed);
  std::vector<Vec> pts(n);
  for (Vec& y : pts) {
    y.resize(p.input_dim());
    y[0] = 1.0;
    for (int i = 0; i < p.dim; ++i) y[1 + i] = rng.uniform();
  }
  return pts;
}

CollocationSet sample_collocation(const PricingProblem& p, std::size_t n_interior,
                                  std::size_t n_boundary, std::size_t n_terminal,
                                  std::uint64_t seed) {
  CollocationSet s;
  s.seed = seed;
  s.interior = sample_interior(n_interior, p, derive_seed(seed, 1));
  s.boundary = sample_boundary(n_boundary, p, derive_seed(seed, 2), &s.boundary_faces);
  s.terminal = sample_terminal(n_terminal, p, derive_seed(seed, 3));
  s.boundary_union = s.boundary;
  s.boundary_union.insert(s.boundary_union.end(), s.terminal.begin(), s.terminal.end());
  return s;
}

}  // namespace optionnet
