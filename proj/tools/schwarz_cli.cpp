#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schwarz/harness.hpp"

namespace {

constexpr int kConverged = 0;
constexpr int kError = 1;
constexpr int kNotConverged = 2;

void print_summary(const schwarz::ExperimentResult& r) {
  const auto& rep = r.report;
  std::cout << r.config.name << " [" << schwarz::to_string(r.config.solver) << "] " << schwarz::to_string(rep.status)
            << ": " << rep.outer_iterations() << " outer, " << rep.total_gmres() << " GMRES, relative residual "
            << rep.final_relative_residual() << ", " << r.total_seconds << " s (residual " << rep.residual_seconds()
            << " s, Jacobian " << rep.jacobian_seconds() << " s)\n";
  for (const auto& it : rep.iterations)
    std::cout << "  " << it.iteration << "  " << it.relative_residual << "  gmres " << it.gmres_iterations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping Schwarz Newton-Krylov solvers for nonlinear elliptic PDEs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string solver;
  std::size_t threads = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--solver", solver, "Override solver: nks, snk, snk2");
  run->add_option("--threads", threads, "Worker threads (default: config, or SCHWARZ_THREADS)");
  run->add_option("--out", out_dir, "Output directory for CSV artifacts");

  std::vector<std::size_t> sweep_threads;
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over thread counts");
  sweep->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--threads", sweep_threads, "Comma-separated thread counts")->required()->delimiter(',');
  sweep->add_option("--solver", solver, "Override solver: snk or snk2");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = schwarz::load_config(config_path);
    if (!solver.empty()) cfg.solver = schwarz::parse_solver(solver);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (run->parsed()) {
      cfg.threads = threads > 0 ? threads : schwarz::threads_from_env(cfg.threads);
      cfg.validate();
      const auto result = schwarz::run_experiment(cfg);
      schwarz::write_artifacts(result);
      print_summary(result);
      return result.report.converged() ? kConverged : kNotConverged;
    }

    if (cfg.solver != schwarz::SolverKind::snk && cfg.solver != schwarz::SolverKind::snk2) {
      std::cerr << "sweep requires solver snk or snk2\n";
      return kError;
    }
    const auto result = schwarz::scaling_sweep(cfg, sweep_threads);
    std::cout << result.table();
    if (!result.residual_speedup_monotone()) std::cout << "note: residual-phase time not monotone in thread count\n";
    return kConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}
