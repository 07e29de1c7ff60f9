#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "schwarz/newton_krylov.hpp"
#include "schwarz/solvers.hpp"
#include "schwarz/twolevel.hpp"

namespace schwarz {

enum class ProblemKind { poisson, burgers, cavity };
enum class SolverKind { nks, snk, snk2 };

[[nodiscard]] std::string to_string(ProblemKind p);
[[nodiscard]] std::string to_string(SolverKind s);
[[nodiscard]] ProblemKind parse_problem(const std::string& s);
[[nodiscard]] SolverKind parse_solver(const std::string& s);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemKind problem = ProblemKind::burgers;
  double nu = 1.0 / 400.0;
  double re = 100.0;

  std::size_t mx = 4;
  std::size_t my = 4;
  double overlap = 0.25;
  std::size_t nx = 17;
  std::size_t ny = 17;
  /// Zero selects (n + 1) / 2.
  std::size_t coarse_nx = 0;
  std::size_t coarse_ny = 0;

  SolverKind solver = SolverKind::snk;
  double rtol = 1e-10;
  double local_tol = 1e-12;
  double coarse_tol = 1e-11;
  std::size_t max_outer = 50;
  std::size_t gmres_maxit = 200;
  std::size_t threads = 1;
  unsigned seed = 1;
  std::string output_dir = "results";

  [[nodiscard]] std::size_t coarse_x() const { return coarse_nx != 0 ? coarse_nx : (nx + 1) / 2; }
  [[nodiscard]] std::size_t coarse_y() const { return coarse_ny != 0 ? coarse_ny : (ny + 1) / 2; }
  [[nodiscard]] bool two_level() const { return solver == SolverKind::snk2; }

  /// Throws ConfigError on invalid settings.
  void validate() const;
};

/// Parses the `key = value` sectioned text format.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] std::string format_config(const ExperimentConfig& cfg);

[[nodiscard]] Rect problem_domain(ProblemKind p);
[[nodiscard]] ProblemPtr make_problem(const ExperimentConfig& cfg);

/// Owns the discretization and solver objects for one configuration.
class SolverStack {
 public:
  SolverStack(const ExperimentConfig& cfg, Executor& exec);

  [[nodiscard]] OuterSystem& system() { return *top_; }
  [[nodiscard]] const DiscretizationPtr& discretization() const { return disc_; }
  [[nodiscard]] NewtonOptions newton_options() const;
  [[nodiscard]] Vector initial_guess() const { return disc_->initial_guess(); }

  [[nodiscard]] NksSystem& nks();
  [[nodiscard]] SnkSystem& snk();
  [[nodiscard]] FasCorrector* fas() { return fas_.get(); }

 private:
  ExperimentConfig cfg_;
  DiscretizationPtr disc_;
  std::unique_ptr<NksSystem> nks_;
  std::unique_ptr<SnkSystem> snk_;
  std::unique_ptr<FasCorrector> fas_;
  std::unique_ptr<TwoLevelSystem> two_level_;
  OuterSystem* top_ = nullptr;
};

struct ExperimentResult {
  ExperimentConfig config;
  SolveReport report;
  Vector solution;
  double total_seconds = 0.0;
  double interface_mismatch = 0.0;
  std::size_t local_iterations = 0;
  std::size_t coarse_iterations = 0;
  /// Outer residual evaluations where the coarse solve failed and c = 0.
  std::size_t skipped_corrections = 0;
};

/// Builds the stack and runs inexact Newton from the problem's initial guess.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes history.csv and timing.csv into cfg.output_dir.
void write_artifacts(const ExperimentResult& result);

void write_history_csv(std::ostream& os, const SolveReport& report);
[[nodiscard]] SolveReport read_history_csv(std::istream& is);
void write_timing_summary(std::ostream& os, const ExperimentResult& result);

class DeterminismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepRow {
  std::size_t threads = 1;
  double total_seconds = 0.0;
  double jacobian_seconds = 0.0;
  double residual_seconds = 0.0;
  double final_residual = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t gmres_iterations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Cores, total time, speedup, Jacobian time, residual time, residual speedup.
  [[nodiscard]] std::string table() const;
  [[nodiscard]] bool residual_speedup_monotone() const;
};

/// Repeats the experiment for each thread count and checks that residual
/// histories are bitwise identical; throws DeterminismError otherwise.
[[nodiscard]] SweepResult scaling_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& thread_counts);

}  // namespace schwarz
