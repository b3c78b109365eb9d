#include "optionnet/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace optionnet {

std::size_t GridSurface::node_count() const {
  std::size_t n = t_axis.size();
  for (const Vec& ax : s_axes) n *= ax.size();
  return n;
}

std::size_t GridSurface::index(std::size_t it, std::size_t i1, std::size_t i2) const {
  if (dim() == 1) return it * s_axes[0].size() + i1;
  return (it * s_axes[0].size() + i1) * s_axes[1].size() + i2;
}

double& GridSurface::at(std::size_t it, std::size_t i1, std::size_t i2) {
  return values[index(it, i1, i2)];
}

double GridSurface::at(std::size_t it, std::size_t i1, std::size_t i2) const {
  return values[index(it, i1, i2)];
}

static Vec uniform_axis(double lo, double hi, int n) {
  Vec ax(n);
  for (int i = 0; i < n; ++i) ax[i] = lo + (hi - lo) * i / (n - 1);
  return ax;
}

GridSurface make_surface(const PricingProblem& p, int n_time, int n_space) {
  if (n_time < 2 || n_space < 2) throw std::invalid_argument("need at least 2 nodes per axis");
  GridSurface g;
  g.problem = p;
  g.t_axis = uniform_axis(0.0, p.market.T, n_time);
  for (int a = 0; a < p.dim; ++a) g.s_axes.push_back(uniform_axis(0.0, p.s_max[a], n_space));
  g.values.assign(g.node_count(), 0.0);
  return g;
}

static void print_val(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

void write_surface_csv(const GridSurface& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  auto write_axis = [&](const char* name, const Vec& ax) {
    os << "# " << name << " " << ax.size();
    for (double v : ax) {
      os << " ";
      print_val(os, v);
    }
    os << "\n";
  };
  write_axis("t", g.t_axis);
  for (int a = 0; a < g.dim(); ++a)
    write_axis(a == 0 ? "s1" : "s2", g.s_axes[a]);
  os << "t";
  for (int a = 0; a < g.dim(); ++a) os << ",s" << (a + 1);
  os << ",value\n";
  for (std::size_t it = 0; it < g.n_time(); ++it)
    for (std::size_t i1 = 0; i1 < g.n_space(0); ++i1) {
      if (g.dim() == 1) {
        print_val(os, g.t_axis[it]);
        os << ",";
        print_val(os, g.s_axes[0][i1]);
        os << ",";
        print_val(os, g.at(it, i1));
        os << "\n";
      } else {
        for (std::size_t i2 = 0; i2 < g.n_space(1); ++i2) {
          print_val(os, g.t_axis[it]);
          os << ",";
          print_val(os, g.s_axes[0][i1]);
          os << ",";
          print_val(os, g.s_axes[1][i2]);
          os << ",";
          print_val(os, g.at(it, i1, i2));
          os << "\n";
        }
      }
    }
  if (!os) throw std::runtime_error("write failed for " + path);
}

GridSurface read_surface_csv(const std::string& path, const PricingProblem& p) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  GridSurface g;
  g.problem = p;
  std::string line;
  auto parse_axis = [&](const std::string& l) {
    std::istringstream ss(l);
    std::string hash, name;
    std::size_t n;
    ss >> hash >> name >> n;
    Vec ax(n);
    for (std::size_t i = 0; i < n; ++i) ss >> ax[i];
    if (!ss) throw std::runtime_error("bad axis header in " + path);
    return std::make_pair(name, ax);
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto [name, ax] = parse_axis(line);
      if (name == "t")
        g.t_axis = ax;
      else
        g.s_axes.push_back(ax);
      continue;
    }
    if (line[0] == 't') break;  // column header
  }
  if (g.t_axis.empty() || g.s_axes.empty()) throw std::runtime_error("missing axes in " + path);
  g.values.reserve(g.node_count());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::size_t pos = line.find_last_of(',');
    if (pos == std::string::npos) throw std::runtime_error("bad data row in " + path);
    g.values.push_back(std::stod(line.substr(pos + 1)));
  }
  if (g.values.size() != g.node_count())
    throw std::runtime_error("node count mismatch in " + path);
  return g;
}

double relative_l2_error(const GridSurface& candidate, const GridSurface& reference) {
  auto same_axis = [](const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  };
  if (candidate.dim() != reference.dim() || !same_axis(candidate.t_axis, reference.t_axis))
    throw std::invalid_argument("axis mismatch");
  for (int a = 0; a < candidate.dim(); ++a)
    if (!same_axis(candidate.s_axes[a], reference.s_axes[a]))
      throw std::invalid_argument("axis mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.values.size(); ++i) {
    const double d = candidate.values[i] - reference.values[i];
    num += d * d;
    den += reference.values[i] * reference.values[i];
  }
  if (den == 0.0) throw std::invalid_argument("zero reference norm");
  return std::sqrt(num / den);
}

}  // namespace optionnet
