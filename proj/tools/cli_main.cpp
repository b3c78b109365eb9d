#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optionnet/experiment.hpp"

using namespace optionnet;

namespace {

int cmd_run(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const RunReport rep = run_experiment(cfg);
  std::printf("run %s: error %.6g, loss %.6g, %d iterations, %.1f s, stop: %s\n",
              rep.name.c_str(), rep.error, rep.final_loss.total, rep.iterations, rep.wall_seconds,
              to_string(rep.stop));
  std::printf("report: %s/report.json\n", cfg.outputs.dir.c_str());
  if (!rep.converged) {
    std::fprintf(stderr, "warning: run did not converge (%s)\n", to_string(rep.stop));
    return 2;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& s_max_list,
              const std::string& init_name) {
  const ExperimentConfig cfg = load_config(config_path);
  const InitMode mode = init_mode_from_string(init_name);
  const std::vector<SweepRow> rows = domain_sweep(cfg, s_max_list, mode);

  std::filesystem::create_directories(cfg.outputs.dir);
  const std::string table_path = cfg.outputs.dir + "/sweep_" + init_name + ".csv";
  std::ofstream out(table_path);
  if (!out) throw std::runtime_error("cannot write " + table_path);
  out << "s_inf,error,grad_interior,grad_boundary\n";
  std::printf("%10s %12s %15s %15s\n", "s_inf", "error", "grad_interior", "grad_boundary");
  char line[160];
  for (const SweepRow& r : rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", r.s_inf, r.error,
                  r.grad_interior, r.grad_boundary);
    out << line;
    std::printf("%10g %12.4e %15.4e %15.4e\n", r.s_inf, r.error, r.grad_interior,
                r.grad_boundary);
  }
  std::printf("table: %s\n", table_path.c_str());
  return 0;
}

int cmd_reference(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const GridSurface ref = reference_surface(cfg);
  std::filesystem::create_directories(cfg.outputs.dir);
  const std::string path = cfg.outputs.dir + "/reference.csv";
  write_surface_csv(ref, path);
  std::printf("reference surface: %s (%zu nodes)\n", path.c_str(), ref.node_count());
  return 0;
}

int cmd_error(const std::string& path_a, const std::string& path_b) {
  const PricingProblem meta{};  // axes come from the files
  const GridSurface a = read_surface_csv(path_a, meta);
  const GridSurface b = read_surface_csv(path_b, meta);
  std::printf("%.17g\n", relative_l2_error(a, b));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Option pricing by PDE-residual network training, with finite-difference and "
               "closed-form references"};
  app.require_subcommand(1);

  std::string config_path, init_name = "scaled", surf_a, surf_b;
  std::vector<double> s_max_list;

  CLI::App* run = app.add_subcommand("run", "Train per the config and compare to the reference");
  run->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Domain-size study for the 2D European max-call config");
  sweep->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--s-max", s_max_list, "domain sizes S_inf")->required()->delimiter(',');
  sweep->add_option("--init", init_name, "weight init: standard or scaled")
      ->capture_default_str();

  CLI::App* ref = app.add_subcommand("reference", "Run only the reference solver for the config");
  ref->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* err = app.add_subcommand("error", "Relative L2 error between two surface CSVs");
  err->add_option("candidate", surf_a, "candidate surface CSV")
      ->required()
      ->check(CLI::ExistingFile);
  err->add_option("reference", surf_b, "reference surface CSV")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (sweep->parsed()) return cmd_sweep(config_path, s_max_list, init_name);
    if (ref->parsed()) return cmd_reference(config_path);
    if (err->parsed()) return cmd_error(surf_a, surf_b);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
