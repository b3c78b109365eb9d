#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "optionnet/network.hpp"

using namespace optionnet;

TEST_CASE("parameter layout") {
  Architecture a;
  a.input_dim = 3;
  a.hidden_layers = {20, 20, 20, 20};
  CHECK(param_count(a) == 3 * 20 + 20 + 3 * (20 * 20 + 20) + 20 + 1);
  const auto spans = layer_spans(a);
  REQUIRE(spans.size() == 5);
  CHECK(spans[0].w_off == 0);
  CHECK(spans[0].b_off == 60);
  CHECK(spans[0].in == 3);
  CHECK(spans[0].out == 20);
  CHECK(spans[1].w_off == 80);
  CHECK(spans[4].in == 20);
  CHECK(spans[4].out == 1);
  CHECK(spans[4].b_off + 1 == param_count(a));

  Architecture bad = a;
  bad.input_dim = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = a;
  bad.hidden_layers.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = a;
  bad.hidden_layers = {8, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("initialization: bounds, zero biases, exact v_max scaling, determinism") {
  Architecture a;
  a.input_dim = 2;
  a.hidden_layers = {20, 20};
  const NetworkParams p1 = init_network(a, 1.0, 42);
  const NetworkParams pv = init_network(a, 37.5, 42);
  const NetworkParams p2 = init_network(a, 1.0, 42);
  const NetworkParams p3 = init_network(a, 1.0, 43);
  CHECK(p1.theta == p2.theta);  // bitwise reproducible
  CHECK(p1.theta != p3.theta);

  const auto spans = layer_spans(a);
  for (std::size_t l = 0; l < spans.size(); ++l) {
    const LayerSpan& s = spans[l];
    const double bound = std::sqrt(6.0 / (s.in + s.out));
    const bool last = l + 1 == spans.size();
    for (std::size_t k = 0; k < (std::size_t)s.in * s.out; ++k) {
      const double w = p1.theta[s.w_off + k];
      CHECK(std::fabs(w) <= bound);
      // same draw sequence regardless of v_max; only the last layer rescales
      CHECK(pv.theta[s.w_off + k] == (last ? 37.5 * w : w));
    }
    for (int k = 0; k < s.out; ++k) CHECK(p1.theta[s.b_off + k] == 0.0);
  }
  CHECK_THROWS_AS((void)init_network(a, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)init_network(a, -2.0, 1), std::invalid_argument);
}

TEST_CASE("forward matches a hand-computed single-hidden-layer net") {
  Architecture a;
  a.input_dim = 2;
  a.hidden_layers = {2};
  NetworkParams p;
  p.arch = a;
  // W0 = [[.3,-.7],[,5,.2]], b0 = [.1,-.4], W1 = [2,-3], b1 = .25
  p.theta = {0.3, -0.7, 0.5, 0.2, 0.1, -0.4, 2.0, -3.0, 0.25};
  const double y[2] = {0.6, 0.9};
  const double h0 = std::tanh(0.3 * 0.6 - 0.7 * 0.9 + 0.1);
  const double h1 = std::tanh(0.5 * 0.6 + 0.2 * 0.9 - 0.4);
  const double want = 2.0 * h0 - 3.0 * h1 + 0.25;
  CHECK(forward(p, y) == doctest::Approx(want).epsilon(1e-15));

  JetEvaluator ev(a);
  CHECK(ev.value(p.theta, y) == doctest::Approx(want).epsilon(1e-15));
  CHECK(ev.value_tape(p.theta, y) == ev.value(p.theta, y));
  const Jet jet = ev.eval(p.theta, y);
  CHECK(jet.value == doctest::Approx(want).epsilon(1e-15));
  // dv/dy0 = sum_k W1_k * (1 - h_k^2) * W0_k0
  const double g0 = 2.0 * (1 - h0 * h0) * 0.3 - 3.0 * (1 - h1 * h1) * 0.5;
  CHECK(jet.grad_t == doctest::Approx(g0).epsilon(1e-13));
}

namespace {

struct CaseRng {
  Rng rng;
  explicit CaseRng(uint64_t s) : rng(s) {}
  double sym(double b) { return rng.uniform(-b, b); }
};

// Relative discrepancy between the analytic jet and central differences of
// value(), measured on the whole jet vector.
double jet_fd_error(JetEvaluator& ev, const NetworkParams& p, const double* y) {
  const int D = p.arch.input_dim;
  const int S = D - 1;
  const Jet an = ev.eval(p.theta, y);
  auto val = [&](int i, double di, int j, double dj) {
    double q[3] = {y[0], y[1], S == 2 ? y[2] : 0.0};
    q[i] += di;
    q[j] += dj;
    return ev.value(p.theta, q);
  };
  const double hg = 1e-5, hh = 1e-4;
  double num = 0.0, den = 0.0;
  auto add = [&](double fd, double exact) {
    num += (fd - exact) * (fd - exact);
    den += exact * exact;
  };
  add(val(0, 0, 0, 0), an.value);
  add((val(0, hg, 0, 0) - val(0, -hg, 0, 0)) / (2 * hg), an.grad_t);
  const double v0 = an.value;
  for (int k = 0; k < S; ++k) {
    const int i = 1 + k;
    add((val(i, hg, i, 0) - val(i, -hg, i, 0)) / (2 * hg), an.grad_x[k]);
    add((val(i, hh, i, 0) - 2 * v0 + val(i, -hh, i, 0)) / (hh * hh), an.hess_xx[k][k]);
  }
  if (S == 2) {
    const double cr = (val(1, hh, 2, hh) - val(1, hh, 2, -hh) - val(1, -hh, 2, hh) +
                       val(1, -hh, 2, -hh)) /
                      (4 * hh * hh);
    add(cr, an.hess_xx[0][1]);
    CHECK(an.hess_xx[0][1] == an.hess_xx[1][0]);
  }
  return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

}  // namespace

TEST_CASE("jet finite-difference check over 1000 random cases") {
  const std::vector<std::vector<int>> layers = {{20, 20, 20, 20}, {8}, {5, 9}, {16, 16, 16}};
  const double vmaxes[3] = {1.0, 0.5, 22.0};
  double worst = 0.0;
  int worst_case = -1;
  for (int c = 0; c < 1000; ++c) {
    CaseRng cr(1000 + (uint64_t)c);
    Architecture a;
    a.input_dim = 2 + (c % 2);
    a.hidden_layers = layers[(c / 2) % layers.size()];
    NetworkParams p = init_network(a, vmaxes[(c / 8) % 3], 7000 + (uint64_t)c);
    for (double& th : p.theta) th += cr.sym(0.05);  // break the zero biases
    JetEvaluator ev(a);
    double y[3] = {cr.rng.uniform(0.02, 0.98), cr.rng.uniform(0.02, 0.98),
                   cr.rng.uniform(0.02, 0.98)};
    const double err = jet_fd_error(ev, p, y);
    if (err > worst) {
      worst = err;
      worst_case = c;
    }
  }
  INFO("worst case ", worst_case, " rel err ", worst);
  CHECK(worst < 1e-5);
}

TEST_CASE("backward reproduces directional derivatives of seeded jets") {
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    CaseRng cr(555 + (uint64_t)c);
    Architecture a;
    a.input_dim = 2 + (c % 2);
    a.hidden_layers = c % 3 == 0 ? std::vector<int>{20, 20, 20, 20} : std::vector<int>{7, 11};
    NetworkParams p = init_network(a, 1.0, 90 + (uint64_t)c);
    for (double& th : p.theta) th += cr.sym(0.05);
    const int S = a.input_dim - 1;
    Jet seed;
    seed.dim = S;
    seed.value = cr.sym(1.0);
    seed.grad_t = cr.sym(1.0);
    for (int i = 0; i < S; ++i) seed.grad_x[i] = cr.sym(1.0);
    seed.hess_xx[0][0] = cr.sym(1.0);
    if (S == 2) {
      seed.hess_xx[0][1] = cr.sym(1.0);
      seed.hess_xx[1][0] = cr.sym(1.0);
      seed.hess_xx[1][1] = cr.sym(1.0);
    }
    double y[3] = {cr.rng.uniform(0.05, 0.95), cr.rng.uniform(0.05, 0.95),
                   cr.rng.uniform(0.05, 0.95)};

    JetEvaluator ev(a);
    Vec grad(p.theta.size(), 0.0);
    ev.eval(p.theta, y);
    ev.backward(p.theta, seed, grad);

    Vec dir(p.theta.size());
    for (double& d : dir) d = cr.sym(1.0);
    double gd = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) gd += grad[k] * dir[k];

    auto f = [&](double h) {
      NetworkParams q = p;
      for (std::size_t k = 0; k < q.theta.size(); ++k) q.theta[k] += h * dir[k];
      JetEvaluator e2(a);
      const Jet j = e2.eval(q.theta, y);
      double s = seed.value * j.value + seed.grad_t * j.grad_t;
      for (int i = 0; i < S; ++i) s += seed.grad_x[i] * j.grad_x[i];
      s += seed.hess_xx[0][0] * j.hess_xx[0][0];
      if (S == 2)
        s += (seed.hess_xx[0][1] + seed.hess_xx[1][0]) * j.hess_xx[0][1] +
             seed.hess_xx[1][1] * j.hess_xx[1][1];
      return s;
    };
    const double h = 1e-6;
    const double fd = (f(h) - f(-h)) / (2 * h);
    const double err = std::fabs(fd - gd) / std::max(1.0, std::fabs(gd));
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("backward_value equals backward with a value-only seed") {
  for (int c = 0; c < 20; ++c) {
    CaseRng cr(31 + (uint64_t)c);
    Architecture a;
    a.input_dim = 2 + (c % 2);
    a.hidden_layers = {9, 6};
    NetworkParams p = init_network(a, 2.0, 400 + (uint64_t)c);
    for (double& th : p.theta) th += cr.sym(0.1);
    const double y[3] = {0.3, 0.55, 0.7};
    const double sv = cr.sym(2.0);

    JetEvaluator ev(a);
    ev.eval(p.theta, y);
    Vec g1(p.theta.size(), 0.0);
    Jet seed;
    seed.dim = a.input_dim - 1;
    seed.value = sv;
    ev.backward(p.theta, seed, g1);

    // value() and value_tape() are separate loops the compiler may contract
    // differently, so agreement is to rounding, not bitwise
    const double vt = ev.value_tape(p.theta, y);
    const double vv = ev.value(p.theta, y);
    CHECK(std::fabs(vt - vv) <= 1e-14 * std::max(1.0, std::fabs(vv)));

    // on the identical tape the scalar backward is exactly the jet backward
    Vec g2(p.theta.size(), 0.0);
    ev.eval(p.theta, y);
    ev.backward_value(p.theta, sv, g2);
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(g2[k] == g1[k]);

    // off its own tape, equal to rounding
    Vec g3(p.theta.size(), 0.0);
    ev.value_tape(p.theta, y);
    ev.backward_value(p.theta, sv, g3);
    for (std::size_t k = 0; k < g1.size(); ++k)
      CHECK(std::fabs(g3[k] - g1[k]) <= 1e-12 * std::max(1.0, std::fabs(g1[k])));
  }
}

TEST_CASE("objective_gradient runs collect then seed over the point list") {
  Architecture a;
  a.input_dim = 2;
  a.hidden_layers = {6, 6};
  NetworkParams p = init_network(a, 1.0, 11);
  std::vector<Vec> pts;
  CaseRng cr(99);
  for (int i = 0; i < 17; ++i) pts.push_back({cr.rng.uniform(), cr.rng.uniform()});

  // F = mean over points of (value - 0.2)^2 + grad_t^2, differentiated two ways
  double mean_v = 0.0;
  const Vec g = objective_gradient(
      p, pts, [&](std::size_t, const Jet& j) { mean_v += j.value / (double)pts.size(); },
      [&](std::size_t, const Jet& j) {
        Jet s;
        s.dim = 1;
        s.value = 2.0 * (j.value - 0.2) / (double)pts.size();
        s.grad_t = 2.0 * j.grad_t / (double)pts.size();
        return s;
      });
  CHECK(mean_v != 0.0);  // collect ran

  auto F = [&](const NetworkParams& q) {
    JetEvaluator ev(a);
    double acc = 0.0;
    for (const Vec& y : pts) {
      const Jet j = ev.eval(q.theta, y.data());
      acc += (j.value - 0.2) * (j.value - 0.2) + j.grad_t * j.grad_t;
    }
    return acc / (double)pts.size();
  };
  CaseRng dr(123);
  Vec dir(p.theta.size());
  for (double& d : dir) d = dr.sym(1.0);
  double gd = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) gd += g[k] * dir[k];
  NetworkParams qp = p, qm = p;
  const double h = 1e-6;
  for (std::size_t k = 0; k < p.theta.size(); ++k) {
    qp.theta[k] += h * dir[k];
    qm.theta[k] -= h * dir[k];
  }
  const double fd = (F(qp) - F(qm)) / (2 * h);
  CHECK(std::fabs(fd - gd) <= 1e-7 * std::max(1.0, std::fabs(gd)));
}

TEST_CASE("checkpoint round trip is bitwise") {
  Architecture a;
  a.input_dim = 3;
  a.hidden_layers = {20, 20, 20, 20};
  NetworkParams p = init_network(a, 13.75, 2024);
  CaseRng cr(5);
  for (double& th : p.theta) th += cr.sym(0.3);
  const std::string path = (std::filesystem::temp_directory_path() / "onet_ckpt.json").string();
  save_checkpoint(p, path);
  const NetworkParams r = load_checkpoint(path);
  CHECK(r.arch == p.arch);
  REQUIRE(r.theta.size() == p.theta.size());
  for (std::size_t k = 0; k < p.theta.size(); ++k) CHECK(r.theta[k] == p.theta[k]);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)load_checkpoint(path), std::runtime_error);
}
