#include "schwarz/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace schwarz {

std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::poisson:
      return "poisson";
    case ProblemKind::burgers:
      return "burgers";
    case ProblemKind::cavity:
      return "cavity";
  }
  return "unknown";
}

std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::nks:
      return "nks";
    case SolverKind::snk:
      return "snk";
    case SolverKind::snk2:
      return "snk2";
  }
  return "unknown";
}

ProblemKind parse_problem(const std::string& s) {
  if (s == "poisson") return ProblemKind::poisson;
  if (s == "burgers") return ProblemKind::burgers;
  if (s == "cavity") return ProblemKind::cavity;
  throw ConfigError("unknown problem '" + s + "'");
}

SolverKind parse_solver(const std::string& s) {
  if (s == "nks") return SolverKind::nks;
  if (s == "snk") return SolverKind::snk;
  if (s == "snk2") return SolverKind::snk2;
  throw ConfigError("unknown solver '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (mx == 0 || my == 0) fail("decomposition: mx and my must be positive");
  if (!(overlap > 0.0 && overlap < 1.0)) fail("decomposition: overlap must lie in (0, 1)");
  if (nx < 3 || ny < 3) fail("decomposition: nx and ny must be at least 3");
  if (problem == ProblemKind::burgers && !(nu > 0.0)) fail("problem: nu must be positive");
  if (problem == ProblemKind::cavity && !(re > 0.0)) fail("problem: re must be positive");
  if (!(rtol > 0.0) || !(local_tol > 0.0) || !(coarse_tol > 0.0)) fail("solver: tolerances must be positive");
  if (max_outer == 0 || gmres_maxit == 0) fail("solver: iteration limits must be positive");
  if (threads == 0) fail("solver: threads must be positive");
  if (two_level()) {
    if (coarse_x() < 3 || coarse_y() < 3) fail("coarse: nx and ny must be at least 3");
    if (coarse_x() > nx || coarse_y() > ny) fail("coarse: coarse grid must not exceed the fine grid");
  }
}

namespace {

using boost::property_tree::ptree;

double parse_real(const std::string& key, const std::string& raw) {
  try {
    if (const auto slash = raw.find('/'); slash != std::string::npos)
      return std::stod(raw.substr(0, slash)) / std::stod(raw.substr(slash + 1));
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + raw + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(raw, &used);
    if (used != raw.size() || v < 0) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a nonnegative integer, got '" + raw + "'");
  }
}

std::string fmt_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment.name", [&](const std::string& v) { cfg.name = v; }},
      {"problem.name", [&](const std::string& v) { cfg.problem = parse_problem(v); }},
      {"problem.nu", [&](const std::string& v) { cfg.nu = parse_real("problem.nu", v); }},
      {"problem.re", [&](const std::string& v) { cfg.re = parse_real("problem.re", v); }},
      {"decomposition.mx", [&](const std::string& v) { cfg.mx = parse_count("decomposition.mx", v); }},
      {"decomposition.my", [&](const std::string& v) { cfg.my = parse_count("decomposition.my", v); }},
      {"decomposition.overlap",
       [&](const std::string& v) { cfg.overlap = parse_real("decomposition.overlap", v); }},
      {"decomposition.nx", [&](const std::string& v) { cfg.nx = parse_count("decomposition.nx", v); }},
      {"decomposition.ny", [&](const std::string& v) { cfg.ny = parse_count("decomposition.ny", v); }},
      {"coarse.nx", [&](const std::string& v) { cfg.coarse_nx = parse_count("coarse.nx", v); }},
      {"coarse.ny", [&](const std::string& v) { cfg.coarse_ny = parse_count("coarse.ny", v); }},
      {"solver.method", [&](const std::string& v) { cfg.solver = parse_solver(v); }},
      {"solver.rtol", [&](const std::string& v) { cfg.rtol = parse_real("solver.rtol", v); }},
      {"solver.local_tol", [&](const std::string& v) { cfg.local_tol = parse_real("solver.local_tol", v); }},
      {"solver.coarse_tol", [&](const std::string& v) { cfg.coarse_tol = parse_real("solver.coarse_tol", v); }},
      {"solver.max_outer", [&](const std::string& v) { cfg.max_outer = parse_count("solver.max_outer", v); }},
      {"solver.gmres_maxit", [&](const std::string& v) { cfg.gmres_maxit = parse_count("solver.gmres_maxit", v); }},
      {"solver.threads", [&](const std::string& v) { cfg.threads = parse_count("solver.threads", v); }},
      {"solver.seed", [&](const std::string& v) { cfg.seed = static_cast<unsigned>(parse_count("solver.seed", v)); }},
      {"output.dir", [&](const std::string& v) { cfg.output_dir = v; }},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(value.data());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\nname = " << cfg.name << "\n\n";
  os << "[problem]\nname = " << to_string(cfg.problem) << "\nnu = " << fmt_real(cfg.nu) << "\nre = " << fmt_real(cfg.re)
     << "\n\n";
  os << "[decomposition]\nmx = " << cfg.mx << "\nmy = " << cfg.my << "\noverlap = " << fmt_real(cfg.overlap)
     << "\nnx = " << cfg.nx << "\nny = " << cfg.ny << "\n\n";
  os << "[coarse]\nnx = " << cfg.coarse_nx << "\nny = " << cfg.coarse_ny << "\n\n";
  os << "[solver]\nmethod = " << to_string(cfg.solver) << "\nrtol = " << fmt_real(cfg.rtol)
     << "\nlocal_tol = " << fmt_real(cfg.local_tol) << "\ncoarse_tol = " << fmt_real(cfg.coarse_tol)
     << "\nmax_outer = " << cfg.max_outer << "\ngmres_maxit = " << cfg.gmres_maxit << "\nthreads = " << cfg.threads
     << "\nseed = " << cfg.seed << "\n\n";
  os << "[output]\ndir = " << cfg.output_dir << "\n";
  return os.str();
}

Rect problem_domain(ProblemKind p) {
  if (p == ProblemKind::burgers) return Rect{-1.0, 1.0, -1.0, 1.0};
  return Rect{0.0, 1.0, 0.0, 1.0};
}

ProblemPtr make_problem(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::poisson: {
      // manufactured solution sin(pi x) sin(pi y), zero on the unit square boundary
      const double pi = std::numbers::pi;
      return poisson_problem([pi](double x, double y) { return -2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y); });
    }
    case ProblemKind::burgers:
      return burgers_problem(cfg.nu);
    case ProblemKind::cavity:
      return cavity_problem(cfg.re);
  }
  throw ConfigError("unknown problem");
}

SolverStack::SolverStack(const ExperimentConfig& cfg, Executor& exec) : cfg_(cfg) {
  cfg.validate();
  disc_ = make_discretization(
      build_uniform(problem_domain(cfg.problem), cfg.mx, cfg.my, cfg.overlap, cfg.nx, cfg.ny), make_problem(cfg));
  LocalSolveOptions local;
  local.tol = cfg.local_tol;

  const bool snk_based = cfg.solver == SolverKind::snk || cfg.solver == SolverKind::snk2;
  OuterSystem* base = nullptr;
  if (snk_based) {
    snk_ = std::make_unique<SnkSystem>(disc_, exec, local);
    base = snk_.get();
  } else {
    nks_ = std::make_unique<NksSystem>(disc_, exec);
    base = nks_.get();
  }
  top_ = base;
  if (cfg.two_level()) {
    FasOptions fas;
    fas.coarse_rtol = cfg.coarse_tol;
    auto space = std::make_shared<const CoarseSpace>(disc_, cfg.coarse_x(), cfg.coarse_y());
    fas_ = std::make_unique<FasCorrector>(std::move(space), exec, fas);
    two_level_ = std::make_unique<TwoLevelSystem>(*base, *fas_);
    top_ = two_level_.get();
  }
}

NewtonOptions SolverStack::newton_options() const {
  NewtonOptions opts;
  opts.rtol = cfg_.rtol;
  opts.max_outer = cfg_.max_outer;
  opts.gmres_maxit = cfg_.gmres_maxit;
  opts.affine = disc_->problem().is_linear();
  return opts;
}

NksSystem& SolverStack::nks() {
  if (!nks_) throw std::logic_error("SolverStack: not an NKS-based stack");
  return *nks_;
}

SnkSystem& SolverStack::snk() {
  if (!snk_) throw std::logic_error("SolverStack: not an SNK-based stack");
  return *snk_;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Executor exec(cfg.threads);
  SolverStack stack(cfg, exec);
  auto solved = inexact_newton(stack.system(), stack.initial_guess(), stack.newton_options());

  ExperimentResult result;
  result.config = cfg;
  result.report = std::move(solved.report);
  result.solution = std::move(solved.u);
  result.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.interface_mismatch = stack.discretization()->interface_mismatch(result.solution);
  if (cfg.solver == SolverKind::snk || cfg.solver == SolverKind::snk2)
    result.local_iterations = stack.snk().local_iterations();
  if (stack.fas() != nullptr) {
    result.coarse_iterations = stack.fas()->coarse_newton_iterations();
    result.skipped_corrections = stack.fas()->skipped_corrections();
  }
  return result;
}

void write_history_csv(std::ostream& os, const SolveReport& report) {
  os << "iteration,residual_norm,relative_residual,eta,gmres_iterations,residual_seconds,jacobian_seconds\n";
  os << std::setprecision(17);
  for (const auto& r : report.iterations)
    os << r.iteration << ',' << r.residual_norm << ',' << r.relative_residual << ',' << r.eta << ','
       << r.gmres_iterations << ',' << r.residual_seconds << ',' << r.jacobian_seconds << '\n';
}

SolveReport read_history_csv(std::istream& is) {
  SolveReport report;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("history csv: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("history csv: expected 7 columns in '" + line + "'");
    IterationRecord r;
    r.iteration = std::stoul(cells[0]);
    r.residual_norm = std::stod(cells[1]);
    r.relative_residual = std::stod(cells[2]);
    r.eta = std::stod(cells[3]);
    r.gmres_iterations = std::stoul(cells[4]);
    r.residual_seconds = std::stod(cells[5]);
    r.jacobian_seconds = std::stod(cells[6]);
    report.iterations.push_back(r);
  }
  return report;
}

void write_timing_summary(std::ostream& os, const ExperimentResult& result) {
  const auto& rep = result.report;
  os << std::setprecision(6);
  os << "solver,status,outer_iterations,gmres_iterations,final_relative_residual,total_seconds,residual_seconds,"
        "jacobian_seconds,threads\n";
  os << to_string(result.config.solver) << ',' << to_string(rep.status) << ',' << rep.outer_iterations() << ','
     << rep.total_gmres() << ',' << rep.final_relative_residual() << ',' << result.total_seconds << ','
     << rep.residual_seconds() << ',' << rep.jacobian_seconds() << ',' << result.config.threads << '\n';
}

void write_artifacts(const ExperimentResult& result) {
  const std::filesystem::path dir(result.config.output_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = result.config.name + "_" + to_string(result.config.solver);
  std::ofstream hist(dir / (stem + "_history.csv"));
  write_history_csv(hist, result.report);
  std::ofstream timing(dir / (stem + "_timing.csv"));
  write_timing_summary(timing, result);
  if (!hist || !timing) throw std::runtime_error("failed to write artifacts under " + dir.string());
}

std::string SweepResult::table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::setw(6) << "cores" << std::setw(12) << "total_s" << std::setw(10) << "speedup" << std::setw(12)
     << "jacobian_s" << std::setw(12) << "residual_s" << std::setw(12) << "res_speedup" << '\n';
  for (const auto& r : rows) {
    os << std::setw(6) << r.threads << std::setw(12) << r.total_seconds;
    if (&r == &rows.front()) {
      os << std::setw(12) << "—";
    } else {
      os << std::setw(10) << rows.front().total_seconds / r.total_seconds;
    }
    os << std::setw(12) << r.jacobian_seconds << std::setw(12) << r.residual_seconds;
    if (&r == &rows.front()) {
      os << std::setw(14) << "—";
    } else {
      os << std::setw(12) << rows.front().residual_seconds / r.residual_seconds;
    }
    os << '\n';
  }
  return os.str();
}

bool SweepResult::residual_speedup_monotone() const {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].residual_seconds > rows[k - 1].residual_seconds) return false;
  return true;
}

SweepResult scaling_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& thread_counts) {
  if (thread_counts.empty()) throw ConfigError("sweep: no thread counts given");
  SweepResult sweep;
  std::vector<double> reference;
  for (const std::size_t t : thread_counts) {
    ExperimentConfig run = cfg;
    run.threads = t;
    const auto result = run_experiment(run);
    std::vector<double> norms;
    for (const auto& r : result.report.iterations) norms.push_back(r.residual_norm);
    if (reference.empty()) {
      reference = norms;
    } else if (norms != reference) {
      std::ostringstream msg;
      msg << "residual history with " << t << " threads differs from the " << thread_counts.front()
          << "-thread run";
      throw DeterminismError(msg.str());
    }
    sweep.rows.push_back({t, result.total_seconds, result.report.jacobian_seconds(),
                          result.report.residual_seconds(), result.report.iterations.back().residual_norm,
                          result.report.outer_iterations(), result.report.total_gmres()});
  }
  return sweep;
}

}  // namespace schwarz
