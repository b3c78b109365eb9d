#include "optionnet/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "optionnet/analytic.hpp"
#include "optionnet/sampling.hpp"

namespace optionnet {

using nlohmann::json;

Architecture ExperimentConfig::architecture() const {
  Architecture a;
  a.input_dim = problem.input_dim();
  a.hidden_layers = hidden_layers;
  return a;
}

double ExperimentConfig::effective_v_max() const {
  if (init_mode == InitMode::standard) return 1.0;
  if (v_max_mode == VmaxMode::auto_payoff_max) return payoff_domain_max(problem);
  return v_max;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw std::invalid_argument("config: name must not be empty");
  problem.validate();
  architecture().validate();
  loss.validate();
  optimizer.validate();
  if (sampling.n_interior < 1 || sampling.n_boundary < 1 || sampling.n_terminal < 1)
    throw std::invalid_argument("config: sampling counts must be positive");
  if (v_max_mode == VmaxMode::explicit_value && !(v_max > 0.0))
    throw std::invalid_argument("config: explicit v_max must be positive");
  if (outputs.dir.empty()) throw std::invalid_argument("config: outputs.dir must not be empty");
  if (outputs.eval_time_steps < 1 || outputs.eval_space_nodes < 2)
    throw std::invalid_argument("config: evaluation grid too small");
  if (outputs.snapshot_stride < 0)
    throw std::invalid_argument("config: snapshot_stride must be >= 0");
  if (reference.fd_time_steps < 1 || reference.fd_space_nodes < 3)
    throw std::invalid_argument("config: reference grid too small");
}

namespace {

std::vector<double> number_list(const json& j, int dim, const char* key) {
  std::vector<double> out;
  if (j.is_number()) {
    out.assign(dim, j.get<double>());
  } else if (j.is_array()) {
    out = j.get<std::vector<double>>();
  } else {
    throw std::invalid_argument(std::string("config: ") + key + " must be a number or array");
  }
  if ((int)out.size() != dim)
    throw std::invalid_argument(std::string("config: ") + key + " needs one entry per asset");
  return out;
}

json dump_problem(const PricingProblem& p) {
  json j;
  j["dim"] = p.dim;
  j["style"] = to_string(p.style);
  j["payoff"] = to_string(p.payoff_kind);
  j["r"] = p.market.r;
  j["sigma"] = p.market.sigma;
  j["delta"] = p.market.delta;
  j["rho"] = p.market.rho;
  j["T"] = p.market.T;
  j["K"] = p.market.K;
  j["s_max"] = p.s_max;
  return j;
}

PricingProblem parse_problem(const json& j) {
  const int dim = j.at("dim").get<int>();
  MarketParams m;
  m.r = j.value("r", 0.0);
  m.rho = j.value("rho", 0.0);
  m.T = j.value("T", 1.0);
  m.K = j.value("K", 0.0);
  m.sigma = number_list(j.at("sigma"), dim, "sigma");
  m.delta = j.contains("delta") ? number_list(j.at("delta"), dim, "delta")
                                : std::vector<double>(dim, 0.0);
  std::vector<double> s_max;
  if (j.contains("s_max")) s_max = number_list(j.at("s_max"), dim, "s_max");
  return make_problem(dim, style_from_string(j.at("style").get<std::string>()),
                      payoff_kind_from_string(j.at("payoff").get<std::string>()), m, s_max);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  ExperimentConfig cfg;
  cfg.name = j.value("name", cfg.name);
  cfg.problem = parse_problem(j.at("problem"));
  if (j.contains("network")) {
    const json& n = j["network"];
    cfg.hidden_layers = n.value("hidden_layers", cfg.hidden_layers);
    if (n.contains("init")) cfg.init_mode = init_mode_from_string(n["init"].get<std::string>());
    if (n.contains("v_max_mode"))
      cfg.v_max_mode = v_max_mode_from_string(n["v_max_mode"].get<std::string>());
    cfg.v_max = n.value("v_max", cfg.v_max);
  }
  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    cfg.sampling.n_interior = s.value("n_interior", cfg.sampling.n_interior);
    cfg.sampling.n_boundary = s.value("n_boundary", cfg.sampling.n_boundary);
    cfg.sampling.n_terminal = s.value("n_terminal", cfg.sampling.n_terminal);
    cfg.sampling.seed = s.value("seed", cfg.sampling.seed);
  }
  if (j.contains("loss")) {
    const json& l = j["loss"];
    if (l.contains("mode")) cfg.loss.mode = loss_mode_from_string(l["mode"].get<std::string>());
    cfg.loss.lambda = l.value("lambda", cfg.loss.lambda);
    cfg.loss.p = l.value("p", cfg.loss.p);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    cfg.optimizer.memory = o.value("memory", cfg.optimizer.memory);
    cfg.optimizer.max_iterations = o.value("max_iterations", cfg.optimizer.max_iterations);
    cfg.optimizer.gradient_tolerance =
        o.value("gradient_tolerance", cfg.optimizer.gradient_tolerance);
    cfg.optimizer.loss_tolerance = o.value("loss_tolerance", cfg.optimizer.loss_tolerance);
    cfg.optimizer.plateau_window = o.value("plateau_window", cfg.optimizer.plateau_window);
    cfg.optimizer.wolfe_c1 = o.value("wolfe_c1", cfg.optimizer.wolfe_c1);
    cfg.optimizer.wolfe_c2 = o.value("wolfe_c2", cfg.optimizer.wolfe_c2);
    cfg.optimizer.max_line_search_steps =
        o.value("max_line_search_steps", cfg.optimizer.max_line_search_steps);
    cfg.optimizer.restart_cycle = o.value("restart_cycle", cfg.optimizer.restart_cycle);
  }
  if (j.contains("reference")) {
    const json& r = j["reference"];
    cfg.reference.fd_time_steps = r.value("fd_time_steps", cfg.reference.fd_time_steps);
    cfg.reference.fd_space_nodes = r.value("fd_space_nodes", cfg.reference.fd_space_nodes);
    cfg.reference.psor.omega = r.value("psor_omega", cfg.reference.psor.omega);
    cfg.reference.psor.tol = r.value("psor_tol", cfg.reference.psor.tol);
    cfg.reference.psor.max_sweeps = r.value("psor_max_sweeps", cfg.reference.psor.max_sweeps);
  }
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    cfg.outputs.dir = o.value("dir", cfg.outputs.dir);
    cfg.outputs.eval_time_steps = o.value("eval_time_steps", cfg.outputs.eval_time_steps);
    cfg.outputs.eval_space_nodes = o.value("eval_space_nodes", cfg.outputs.eval_space_nodes);
    cfg.outputs.snapshot_stride = o.value("snapshot_stride", cfg.outputs.snapshot_stride);
  }
  cfg.validate();
  return cfg;
}

void write_effective_config(const ExperimentConfig& cfg, const std::string& path) {
  json j;
  j["name"] = cfg.name;
  j["problem"] = dump_problem(cfg.problem);
  j["network"] = {{"hidden_layers", cfg.hidden_layers},
                  {"init", to_string(cfg.init_mode)},
                  {"v_max_mode", to_string(cfg.v_max_mode)},
                  {"v_max", cfg.v_max}};
  j["sampling"] = {{"n_interior", cfg.sampling.n_interior},
                   {"n_boundary", cfg.sampling.n_boundary},
                   {"n_terminal", cfg.sampling.n_terminal},
                   {"seed", cfg.sampling.seed}};
  j["loss"] = {{"mode", to_string(cfg.loss.mode)},
               {"lambda", cfg.loss.lambda},
               {"p", cfg.loss.p}};
  j["optimizer"] = {{"memory", cfg.optimizer.memory},
                    {"max_iterations", cfg.optimizer.max_iterations},
                    {"gradient_tolerance", cfg.optimizer.gradient_tolerance},
                    {"loss_tolerance", cfg.optimizer.loss_tolerance},
                    {"plateau_window", cfg.optimizer.plateau_window},
                    {"wolfe_c1", cfg.optimizer.wolfe_c1},
                    {"wolfe_c2", cfg.optimizer.wolfe_c2},
                    {"max_line_search_steps", cfg.optimizer.max_line_search_steps},
                    {"restart_cycle", cfg.optimizer.restart_cycle}};
  j["reference"] = {{"fd_time_steps", cfg.reference.fd_time_steps},
                    {"fd_space_nodes", cfg.reference.fd_space_nodes},
                    {"psor_omega", cfg.reference.psor.omega},
                    {"psor_tol", cfg.reference.psor.tol},
                    {"psor_max_sweeps", cfg.reference.psor.max_sweeps}};
  j["outputs"] = {{"dir", cfg.outputs.dir},
                  {"eval_time_steps", cfg.outputs.eval_time_steps},
                  {"eval_space_nodes", cfg.outputs.eval_space_nodes},
                  {"snapshot_stride", cfg.outputs.snapshot_stride}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << j.dump(2) << "\n";
}

GridSurface evaluate_network_surface(const PricingProblem& p, const NetworkParams& net,
                                     int n_time_nodes, int n_space_nodes) {
  if (net.arch.input_dim != p.input_dim())
    throw std::invalid_argument("network input dimension does not match the problem");
  GridSurface g = make_surface(p, n_time_nodes, n_space_nodes);
  JetEvaluator ev(net.arch);
  const std::size_t n1 = g.n_space(0);
  const std::size_t n2 = p.dim == 2 ? g.n_space(1) : 1;
  double fin[3], y[3];
  for (std::size_t it = 0; it < g.n_time(); ++it) {
    fin[0] = g.t_axis[it];
    for (std::size_t i = 0; i < n1; ++i) {
      fin[1] = g.s_axes[0][i];
      for (std::size_t k = 0; k < n2; ++k) {
        if (p.dim == 2) fin[2] = g.s_axes[1][k];
        scale_point(p, fin, y);
        g.values[g.index(it, i, k)] = ev.value(net.theta, y);
      }
    }
  }
  return g;
}

GridSurface reference_surface(const ExperimentConfig& cfg) {
  const PricingProblem& p = cfg.problem;
  if (p.style == Style::american)
    return fd_american(p, cfg.reference.fd_time_steps, cfg.reference.fd_space_nodes,
                       cfg.reference.psor);

  GridSurface g = make_surface(p, cfg.outputs.eval_time_steps + 1, cfg.outputs.eval_space_nodes);
  const std::size_t n1 = g.n_space(0);
  const std::size_t n2 = p.dim == 2 ? g.n_space(1) : 1;
  for (std::size_t it = 0; it < g.n_time(); ++it) {
    const double t = g.t_axis[it];
    for (std::size_t i = 0; i < n1; ++i) {
      const double s1 = g.s_axes[0][i];
      for (std::size_t k = 0; k < n2; ++k) {
        double v;
        switch (p.payoff_kind) {
          case PayoffKind::put:
            v = bs_european(t, s1, p.market, OptionKind::put);
            break;
          case PayoffKind::call:
            v = bs_european(t, s1, p.market, OptionKind::call);
            break;
          case PayoffKind::exchange:
            v = margrabe(t, s1, g.s_axes[1][k], p.market);
            break;
          case PayoffKind::max_call:
            v = max_call(t, s1, g.s_axes[1][k], p.market);
            break;
          default:
            throw std::invalid_argument("no closed-form reference for this payoff");
        }
        g.values[g.index(it, i, k)] = v;
      }
    }
  }
  return g;
}

namespace {

void write_run_log(const TrainHistory& hist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run log: " + path);
  out << "iteration\tloss\tgrad_norm\tlambda\tseconds\n";
  char line[256];
  for (const IterationRecord& r : hist.records) {
    std::snprintf(line, sizeof line, "%d\t%.17g\t%.17g\t%.17g\t%.6f\n", r.iteration, r.loss,
                  r.grad_norm, r.lambda_used, r.seconds);
    out << line;
  }
}

void write_report_json(const RunReport& rep, const std::string& path) {
  json j;
  j["name"] = rep.name;
  j["error"] = rep.error;
  j["converged"] = rep.converged;
  j["stop_reason"] = to_string(rep.stop);
  j["iterations"] = rep.iterations;
  j["wall_seconds"] = rep.wall_seconds;
  j["lambda_used"] = rep.lambda_used;
  j["lambda_estimate"] = rep.lambda_estimate;
  j["loss"] = {{"total", rep.final_loss.total},
               {"interior", rep.final_loss.interior_term},
               {"boundary", rep.final_loss.boundary_term},
               {"terminal", rep.final_loss.terminal_term},
               {"lambda_used", rep.final_loss.lambda_used}};
  json arts = json::object();
  for (const auto& [kind, p] : rep.artifacts) arts[kind] = p;
  j["artifacts"] = arts;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.outputs.dir);
  const std::string dir = cfg.outputs.dir + "/";
  write_effective_config(cfg, dir + "effective_config.json");

  const Architecture arch = cfg.architecture();
  NetworkParams net = init_network(arch, cfg.effective_v_max(), derive_seed(cfg.sampling.seed, 0));
  const CollocationSet pts =
      sample_collocation(cfg.problem, cfg.sampling.n_interior, cfg.sampling.n_boundary,
                         cfg.sampling.n_terminal, cfg.sampling.seed);
  LossEvaluator loss(cfg.problem, pts, cfg.loss);
  if (cfg.loss.mode == LossMode::optimal_lambda)
    loss.set_lambda(loss.estimate_optimal_lambda(net));

  auto fg = [&](const Vec& theta, Vec& grad) {
    return loss.loss_grad(NetworkParams{arch, theta}, grad).total;
  };

  std::vector<std::pair<int, Vec>> snapshots;
  if (cfg.outputs.snapshot_stride > 0) snapshots.emplace_back(0, net.theta);
  MinimizeCallbacks cb;
  cb.current_lambda = [&] { return loss.lambda(); };
  if (cfg.loss.mode == LossMode::optimal_lambda) {
    cb.on_cycle = [&](int, const Vec& theta) {
      const double est = loss.estimate_optimal_lambda(NetworkParams{arch, theta});
      const bool changed = est != loss.lambda();
      loss.set_lambda(est);
      return changed;
    };
  }
  if (cfg.outputs.snapshot_stride > 0) {
    cb.on_iteration = [&](int k, const Vec& theta, double, double) {
      if (k > 0 && k % cfg.outputs.snapshot_stride == 0) snapshots.emplace_back(k, theta);
    };
  }

  const TrainHistory hist = minimize(fg, net.theta, cfg.optimizer, cb);

  const GridSurface ref = reference_surface(cfg);
  const GridSurface cand =
      evaluate_network_surface(cfg.problem, net, (int)ref.n_time(), (int)ref.n_space(0));
  GridSurface diff = ref;
  for (std::size_t i = 0; i < diff.values.size(); ++i)
    diff.values[i] = std::fabs(cand.values[i] - ref.values[i]);

  RunReport rep;
  rep.name = cfg.name;
  rep.error = relative_l2_error(cand, ref);
  rep.final_loss = loss.loss(net);
  rep.lambda_used = rep.final_loss.lambda_used;
  rep.lambda_estimate = loss.estimate_optimal_lambda(net);
  rep.iterations = hist.iterations;
  rep.stop = hist.reason;
  rep.converged =
      hist.reason == StopReason::gradient_tolerance || hist.reason == StopReason::loss_plateau;

  if (!snapshots.empty()) {
    if (snapshots.back().first != hist.iterations)
      snapshots.emplace_back(hist.iterations, net.theta);
    for (const auto& [it, theta] : snapshots) {
      const GridSurface s = evaluate_network_surface(cfg.problem, NetworkParams{arch, theta},
                                                     (int)ref.n_time(), (int)ref.n_space(0));
      rep.error_curve.emplace_back(it, relative_l2_error(s, ref));
    }
  }

  write_surface_csv(cand, dir + "surface.csv");
  write_surface_csv(ref, dir + "reference.csv");
  write_surface_csv(diff, dir + "error_surface.csv");
  write_run_log(hist, dir + "run_log.tsv");
  save_checkpoint(net, dir + "checkpoint.json");
  rep.artifacts = {{"effective_config", dir + "effective_config.json"},
                   {"surface", dir + "surface.csv"},
                   {"reference", dir + "reference.csv"},
                   {"error_surface", dir + "error_surface.csv"},
                   {"run_log", dir + "run_log.tsv"},
                   {"checkpoint", dir + "checkpoint.json"}};
  if (!rep.error_curve.empty()) {
    const std::string curve_path = dir + "error_vs_iterations.csv";
    std::ofstream out(curve_path);
    if (!out) throw std::runtime_error("cannot write error curve: " + curve_path);
    out << "iteration,error\n";
    char line[64];
    for (const auto& [it, e] : rep.error_curve) {
      std::snprintf(line, sizeof line, "%d,%.17g\n", it, e);
      out << line;
    }
    rep.artifacts.emplace_back("error_curve", curve_path);
  }

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_report_json(rep, dir + "report.json");
  rep.artifacts.emplace_back("report", dir + "report.json");
  return rep;
}

std::vector<SweepRow> domain_sweep(const ExperimentConfig& base,
                                   const std::vector<double>& s_max_list, InitMode init_mode) {
  if (base.problem.dim != 2 || base.problem.style != Style::european ||
      base.problem.payoff_kind != PayoffKind::max_call)
    throw std::invalid_argument("domain_sweep expects a 2D European max-call problem");
  std::vector<SweepRow> rows;
  for (double s_inf : s_max_list) {
    ExperimentConfig cfg = base;
    cfg.init_mode = init_mode;
    MarketParams m = base.problem.market;
    m.K = s_inf / 4.0;
    cfg.problem = make_problem(2, Style::european, PayoffKind::max_call, m, {s_inf, s_inf});
    char tag[64];
    std::snprintf(tag, sizeof tag, "%s_s%g", to_string(init_mode), s_inf);
    cfg.name = base.name + "_" + tag;
    cfg.outputs.dir = base.outputs.dir + "/" + tag;

    const NetworkParams net =
        init_network(cfg.architecture(), cfg.effective_v_max(), derive_seed(cfg.sampling.seed, 0));
    const CollocationSet pts =
        sample_collocation(cfg.problem, cfg.sampling.n_interior, cfg.sampling.n_boundary,
                           cfg.sampling.n_terminal, cfg.sampling.seed);
    const auto [gi, gb] = gradient_norms(net, cfg.problem, pts, cfg.loss);

    const RunReport rep = run_experiment(cfg);
    rows.push_back({s_inf, rep.error, gi, gb});
  }
  return rows;
}

InitMode init_mode_from_string(const std::string& s) {
  if (s == "standard") return InitMode::standard;
  if (s == "scaled") return InitMode::scaled;
  throw std::invalid_argument("unknown init mode: " + s);
}

VmaxMode v_max_mode_from_string(const std::string& s) {
  if (s == "auto_payoff_max") return VmaxMode::auto_payoff_max;
  if (s == "explicit") return VmaxMode::explicit_value;
  throw std::invalid_argument("unknown v_max mode: " + s);
}

const char* to_string(InitMode m) { return m == InitMode::standard ? "standard" : "scaled"; }

const char* to_string(VmaxMode m) {
  return m == VmaxMode::auto_payoff_max ? "auto_payoff_max" : "explicit";
}

}  // namespace optionnet
