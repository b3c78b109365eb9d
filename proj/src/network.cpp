#include "optionnet/network.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace optionnet {

void Architecture::validate() const {
  if (input_dim != 2 && input_dim != 3) throw std::invalid_argument("input_dim must be 2 or 3");
  if (hidden_layers.empty()) throw std::invalid_argument("need at least one hidden layer");
  for (int w : hidden_layers)
    if (w < 1) throw std::invalid_argument("hidden widths must be >= 1");
}

std::vector<LayerSpan> layer_spans(const Architecture& a) {
  std::vector<LayerSpan> spans(a.n_affine());
  std::size_t off = 0;
  int in = a.input_dim;
  for (int l = 0; l < a.n_affine(); ++l) {
    const int out = l < (int)a.hidden_layers.size() ? a.hidden_layers[l] : 1;
    spans[l] = {off, off + (std::size_t)in * out, in, out};
    off += (std::size_t)in * out + out;
    in = out;
  }
  return spans;
}

std::size_t param_count(const Architecture& a) {
  const auto spans = layer_spans(a);
  const LayerSpan& last = spans.back();
  return last.b_off + last.out;
}

NetworkParams init_network(const Architecture& a, double v_max, std::uint64_t seed) {
  a.validate();
  if (v_max <= 0.0) throw std::invalid_argument("v_max must be positive");
  NetworkParams p;
  p.arch = a;
  p.theta.assign(param_count(a), 0.0);
  Rng rng(seed);
  const auto spans = layer_spans(a);
  for (int l = 0; l < a.n_affine(); ++l) {
    const LayerSpan& s = spans[l];
    const double bound = std::sqrt(6.0 / (s.in + s.out));
    const double scale = l == a.n_affine() - 1 ? v_max : 1.0;
    for (std::size_t k = 0; k < (std::size_t)s.in * s.out; ++k)
      p.theta[s.w_off + k] = scale * rng.uniform(-bound, bound);
  }
  return p;
}

double forward(const NetworkParams& p, const double* y) {
  JetEvaluator ev(p.arch);
  return ev.value(p.theta, y);
}

Jet input_jet(const NetworkParams& p, const double* y) {
  JetEvaluator ev(p.arch);
  return ev.eval(p.theta, y);
}

void save_checkpoint(const NetworkParams& p, const std::string& path) {
  nlohmann::json j;
  j["input_dim"] = p.arch.input_dim;
  j["hidden_layers"] = p.arch.hidden_layers;
  j["activation"] = "tanh";
  j["output_dim"] = 1;
  j["theta"] = p.theta;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  NetworkParams p;
  p.arch.input_dim = j.at("input_dim").get<int>();
  p.arch.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
  p.arch.validate();
  p.theta = j.at("theta").get<Vec>();
  if (p.theta.size() != param_count(p.arch))
    throw std::runtime_error("theta size inconsistent with architecture in " + path);
  return p;
}

JetEvaluator::JetEvaluator(const Architecture& arch) : arch_(arch), spans_(layer_spans(arch)) {
  arch_.validate();
  D_ = arch_.input_dim;
  S_ = D_ - 1;
  P_ = S_ == 1 ? 1 : 3;
  L_ = arch_.n_affine();
  if (S_ == 1) {
    pi_[0] = 0;
    pj_[0] = 0;
  } else {
    pi_[0] = 0; pj_[0] = 0;
    pi_[1] = 0; pj_[1] = 1;
    pi_[2] = 1; pj_[2] = 1;
  }
  const int H = L_ - 1;  // hidden layers
  z_.resize(H);
  Ja_.resize(H);
  Jz_.resize(H);
  Ha_.resize(H);
  Hz_.resize(H);
  int wmax = D_;
  for (int l = 0; l < H; ++l) {
    const int w = arch_.hidden_layers[l];
    z_[l].resize(w);
    Ja_[l].resize((std::size_t)w * D_);
    Jz_[l].resize((std::size_t)w * D_);
    Ha_[l].resize((std::size_t)w * P_);
    Hz_[l].resize((std::size_t)w * P_);
    wmax = std::max(wmax, w);
  }
  zb_.resize(wmax);
  Jb_.resize((std::size_t)wmax * D_);
  Hb_.resize((std::size_t)wmax * P_);
  zb2_.resize(wmax);
  Jb2_.resize((std::size_t)wmax * D_);
  Hb2_.resize((std::size_t)wmax * P_);
}

double JetEvaluator::value(const Vec& theta, const double* y) const {
  Vec cur(y, y + D_), next;
  for (int l = 0; l < L_; ++l) {
    const LayerSpan& s = spans_[l];
    const double* W = theta.data() + s.w_off;
    const double* b = theta.data() + s.b_off;
    next.assign(s.out, 0.0);
    for (int k = 0; k < s.out; ++k) {
      double acc = b[k];
      const double* row = W + (std::size_t)k * s.in;
      for (int m = 0; m < s.in; ++m) acc += row[m] * cur[m];
      next[k] = l < L_ - 1 ? std::tanh(acc) : acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

double JetEvaluator::value_tape(const Vec& theta, const double* y) {
  for (int i = 0; i < D_; ++i) y_[i] = y[i];
  for (int l = 0; l < L_; ++l) {
    const LayerSpan& s = spans_[l];
    const double* W = theta.data() + s.w_off;
    const double* b = theta.data() + s.b_off;
    const double* in = l == 0 ? y_ : z_[l - 1].data();
    if (l < L_ - 1) {
      Vec& za = z_[l];
      for (int k = 0; k < s.out; ++k) {
        double acc = b[k];
        const double* row = W + (std::size_t)k * s.in;
        for (int m = 0; m < s.in; ++m) acc += row[m] * in[m];
        za[k] = std::tanh(acc);
      }
    } else {
      double acc = b[0];
      for (int m = 0; m < s.in; ++m) acc += W[m] * in[m];
      return acc;
    }
  }
  return 0.0;  // unreachable
}

void JetEvaluator::backward_value(const Vec& theta, double sv, Vec& grad) const {
  zb_[0] = sv;
  for (int l = L_ - 1; l >= 0; --l) {
    const LayerSpan& s = spans_[l];
    const double* W = theta.data() + s.w_off;
    double* Wg = grad.data() + s.w_off;
    double* bg = grad.data() + s.b_off;
    if (l == 0) {
      for (int k = 0; k < s.out; ++k) {
        double* row = Wg + (std::size_t)k * s.in;
        for (int i = 0; i < D_; ++i) row[i] += zb_[k] * y_[i];
        bg[k] += zb_[k];
      }
      break;
    }
    const Vec& zp = z_[l - 1];
    const int pw = s.in;
    std::fill(zb2_.begin(), zb2_.begin() + pw, 0.0);
    for (int k = 0; k < s.out; ++k) {
      const double* row = W + (std::size_t)k * s.in;
      double* rowg = Wg + (std::size_t)k * s.in;
      const double ak = zb_[k];
      for (int m = 0; m < pw; ++m) {
        rowg[m] += ak * zp[m];
        zb2_[m] += row[m] * ak;
      }
      bg[k] += ak;
    }
    for (int m = 0; m < pw; ++m) zb2_[m] *= 1.0 - zp[m] * zp[m];
    zb_.swap(zb2_);
  }
}

Jet JetEvaluator::eval(const Vec& theta, const double* y) {
  for (int i = 0; i < D_; ++i) y_[i] = y[i];
  Jet jet;
  jet.dim = S_;
  // Input indices of the spatial coordinates in the full input vector.
  for (int l = 0; l < L_; ++l) {
    const LayerSpan& s = spans_[l];
    const double* W = theta.data() + s.w_off;
    const double* b = theta.data() + s.b_off;
    const bool hidden = l < L_ - 1;
    double out_a = 0.0;                // output layer scalar path
    double out_Ja[3] = {0, 0, 0};
    double out_Ha[3] = {0, 0, 0};
    Vec* za = hidden ? &z_[l] : nullptr;
    for (int k = 0; k < s.out; ++k) {
      const double* row = W + (std::size_t)k * s.in;
      double a = b[k];
      double Ja[3] = {0, 0, 0};
      double Ha[3] = {0, 0, 0};
      if (l == 0) {
        for (int i = 0; i < D_; ++i) {
          a += row[i] * y_[i];
          Ja[i] = row[i];
        }
      } else {
        const Vec& zp = z_[l - 1];
        const Vec& Jzp = Jz_[l - 1];
        const Vec& Hzp = Hz_[l - 1];
        for (int m = 0; m < s.in; ++m) {
          const double w = row[m];
          a += w * zp[m];
          for (int i = 0; i < D_; ++i) Ja[i] += w * Jzp[(std::size_t)m * D_ + i];
          for (int p = 0; p < P_; ++p) Ha[p] += w * Hzp[(std::size_t)m * P_ + p];
        }
      }
      if (hidden) {
        const double zv = std::tanh(a);
        const double sv = 1.0 - zv * zv;
        const double uv = -2.0 * zv * sv;
        (*za)[k] = zv;
        for (int i = 0; i < D_; ++i) {
          Ja_[l][(std::size_t)k * D_ + i] = Ja[i];
          Jz_[l][(std::size_t)k * D_ + i] = sv * Ja[i];
        }
        for (int p = 0; p < P_; ++p) {
          Ha_[l][(std::size_t)k * P_ + p] = Ha[p];
          Hz_[l][(std::size_t)k * P_ + p] =
              sv * Ha[p] + uv * Ja[1 + pi_[p]] * Ja[1 + pj_[p]];
        }
      } else {
        out_a = a;
        for (int i = 0; i < D_; ++i) out_Ja[i] = Ja[i];
        for (int p = 0; p < P_; ++p) out_Ha[p] = Ha[p];
      }
    }
    if (!hidden) {
      jet.value = out_a;
      jet.grad_t = out_Ja[0];
      for (int i = 0; i < S_; ++i) jet.grad_x[i] = out_Ja[1 + i];
      if (S_ == 1) {
        jet.hess_xx[0][0] = out_Ha[0];
      } else {
        jet.hess_xx[0][0] = out_Ha[0];
        jet.hess_xx[0][1] = jet.hess_xx[1][0] = out_Ha[1];
        jet.hess_xx[1][1] = out_Ha[2];
      }
    }
  }
  return jet;
}

void JetEvaluator::backward(const Vec& theta, const Jet& seed, Vec& grad) const {
  // Cotangents of the output pre-activation (linear output: identity).
  zb_[0] = seed.value;
  Jb_[0] = seed.grad_t;
  for (int i = 0; i < S_; ++i) Jb_[1 + i] = seed.grad_x[i];
  if (S_ == 1) {
    Hb_[0] = seed.hess_xx[0][0];
  } else {
    Hb_[0] = seed.hess_xx[0][0];
    Hb_[1] = seed.hess_xx[0][1] + seed.hess_xx[1][0];
    Hb_[2] = seed.hess_xx[1][1];
  }
  for (int l = L_ - 1; l >= 0; --l) {
    const LayerSpan& s = spans_[l];
    const double* W = theta.data() + s.w_off;
    double* Wg = grad.data() + s.w_off;
    double* bg = grad.data() + s.b_off;
    if (l == 0) {
      for (int k = 0; k < s.out; ++k) {
        double* row = Wg + (std::size_t)k * s.in;
        for (int i = 0; i < D_; ++i)
          row[i] += zb_[k] * y_[i] + Jb_[(std::size_t)k * D_ + i];
        bg[k] += zb_[k];
      }
      break;
    }
    const Vec& zp = z_[l - 1];
    const Vec& Jzp = Jz_[l - 1];
    const Vec& Hzp = Hz_[l - 1];
    const int pw = s.in;
    std::fill(zb2_.begin(), zb2_.begin() + pw, 0.0);
    std::fill(Jb2_.begin(), Jb2_.begin() + (std::size_t)pw * D_, 0.0);
    std::fill(Hb2_.begin(), Hb2_.begin() + (std::size_t)pw * P_, 0.0);
    for (int k = 0; k < s.out; ++k) {
      const double* row = W + (std::size_t)k * s.in;
      double* rowg = Wg + (std::size_t)k * s.in;
      const double ak = zb_[k];
      const double* Jk = Jb_.data() + (std::size_t)k * D_;
      const double* Hk = Hb_.data() + (std::size_t)k * P_;
      for (int m = 0; m < pw; ++m) {
        double g = ak * zp[m];
        const double* Jm = Jzp.data() + (std::size_t)m * D_;
        const double* Hm = Hzp.data() + (std::size_t)m * P_;
        for (int i = 0; i < D_; ++i) g += Jk[i] * Jm[i];
        for (int p = 0; p < P_; ++p) g += Hk[p] * Hm[p];
        rowg[m] += g;
        const double wkm = row[m];
        zb2_[m] += wkm * ak;
        for (int i = 0; i < D_; ++i) Jb2_[(std::size_t)m * D_ + i] += wkm * Jk[i];
        for (int p = 0; p < P_; ++p) Hb2_[(std::size_t)m * P_ + p] += wkm * Hk[p];
      }
      bg[k] += ak;
    }
    // Pull the cotangents of layer l-1's activations back through tanh.
    const Vec& Jap = Ja_[l - 1];
    const Vec& Hap = Ha_[l - 1];
    for (int m = 0; m < pw; ++m) {
      const double zv = zp[m];
      const double sv = 1.0 - zv * zv;
      const double uv = -2.0 * zv * sv;
      const double wv = sv * (6.0 * zv * zv - 2.0);
      const double* Jam = Jap.data() + (std::size_t)m * D_;
      const double* Ham = Hap.data() + (std::size_t)m * P_;
      double* Jbm = Jb2_.data() + (std::size_t)m * D_;
      double* Hbm = Hb2_.data() + (std::size_t)m * P_;
      double ab = zb2_[m] * sv;
      for (int i = 0; i < D_; ++i) ab += Jbm[i] * uv * Jam[i];
      // Jacobian cotangents: direct term plus Hessian rank-1 coupling.
      double Jnew[3];
      for (int i = 0; i < D_; ++i) Jnew[i] = Jbm[i] * sv;
      for (int p = 0; p < P_; ++p) {
        const int di = 1 + pi_[p], dj = 1 + pj_[p];
        const double hb = Hbm[p];
        ab += hb * (uv * Ham[p] + wv * Jam[di] * Jam[dj]);
        if (di == dj) {
          Jnew[di] += hb * uv * 2.0 * Jam[di];
        } else {
          Jnew[di] += hb * uv * Jam[dj];
          Jnew[dj] += hb * uv * Jam[di];
        }
        Hbm[p] *= sv;
      }
      zb2_[m] = ab;
      for (int i = 0; i < D_; ++i) Jbm[i] = Jnew[i];
    }
    zb_.swap(zb2_);
    Jb_.swap(Jb2_);
    Hb_.swap(Hb2_);
  }
}

Vec objective_gradient(const NetworkParams& params, const std::vector<Vec>& points,
                       const std::function<void(std::size_t, const Jet&)>& collect,
                       const std::function<Jet(std::size_t, const Jet&)>& seed) {
  JetEvaluator ev(params.arch);
  if (collect)
    for (std::size_t i = 0; i < points.size(); ++i) collect(i, ev.eval(params.theta, points[i].data()));
  Vec grad(params.theta.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Jet j = ev.eval(params.theta, points[i].data());
    ev.backward(params.theta, seed(i, j), grad);
  }
  return grad;
}

}  // namespace optionnet
