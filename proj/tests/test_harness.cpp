#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "schwarz/harness.hpp"

using namespace schwarz;

namespace {

const char* kSmall = R"(
[experiment]
name = small

[problem]
name = burgers
nu = 1/20

[decomposition]
mx = 2
my = 2
overlap = 0.25
nx = 9
ny = 9

[solver]
method = snk
rtol = 1e-10
threads = 1
)";

std::filesystem::path scratch(const std::string& leaf) {
  auto dir = std::filesystem::temp_directory_path() / ("schwarz_test_harness_" + leaf);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCHWARZ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config: parse with fractions and defaults") {
  const auto cfg = parse_config(kSmall);
  CHECK(cfg.name == "small");
  CHECK(cfg.problem == ProblemKind::burgers);
  CHECK(cfg.nu == doctest::Approx(0.05));
  CHECK(cfg.mx == 2);
  CHECK(cfg.nx == 9);
  CHECK(cfg.solver == SolverKind::snk);
  CHECK(cfg.coarse_x() == 5);
  CHECK(cfg.coarse_y() == 5);
  CHECK(cfg.max_outer == ExperimentConfig{}.max_outer);
  CHECK_FALSE(cfg.two_level());
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config: format and parse round trip") {
  ExperimentConfig cfg;
  cfg.name = "round";
  cfg.problem = ProblemKind::cavity;
  cfg.re = 1000;
  cfg.mx = 3;
  cfg.my = 2;
  cfg.overlap = 1.0 / 3.0;
  cfg.nx = 13;
  cfg.ny = 11;
  cfg.coarse_nx = 7;
  cfg.coarse_ny = 5;
  cfg.solver = SolverKind::snk2;
  cfg.rtol = 1e-9;
  cfg.local_tol = 3e-13;
  cfg.coarse_tol = 2e-11;
  cfg.max_outer = 17;
  cfg.gmres_maxit = 123;
  cfg.threads = 3;
  cfg.seed = 42;
  cfg.output_dir = "out/dir";
  const auto back = parse_config(format_config(cfg));
  CHECK(format_config(back) == format_config(cfg));
  CHECK(back.overlap == cfg.overlap);
  CHECK(back.solver == SolverKind::snk2);
  CHECK(back.coarse_x() == 7);
  CHECK(back.two_level());
}

TEST_CASE("config: errors") {
  CHECK_THROWS_AS((void)parse_config("[problem]\nname = heat\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[problem]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[solver]\nrtol = tiny\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[solver]\nmax_outer = -3\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[solver]\nmethod = nks2\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[solver\nrtol = 1\n"), ConfigError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/config.ini"), ConfigError);

  auto invalid = [](auto mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  invalid([](ExperimentConfig& c) { c.overlap = 1.5; });
  invalid([](ExperimentConfig& c) { c.mx = 0; });
  invalid([](ExperimentConfig& c) { c.nx = 2; });
  invalid([](ExperimentConfig& c) { c.nu = 0; });
  invalid([](ExperimentConfig& c) { c.threads = 0; });
  invalid([](ExperimentConfig& c) {
    c.solver = SolverKind::snk2;
    c.coarse_nx = 40;
  });
}

TEST_CASE("names round trip") {
  for (const auto p : {ProblemKind::poisson, ProblemKind::burgers, ProblemKind::cavity})
    CHECK(parse_problem(to_string(p)) == p);
  for (const auto s : {SolverKind::nks, SolverKind::snk, SolverKind::snk2}) CHECK(parse_solver(to_string(s)) == s);
  CHECK(problem_domain(ProblemKind::burgers).x0 == -1.0);
  CHECK(problem_domain(ProblemKind::cavity).x0 == 0.0);
}

TEST_CASE("history csv round trip") {
  SolveReport rep;
  rep.iterations.push_back({0, 1.5, 1.0, 1e-4, 12, 0.25, 0.5});
  rep.iterations.push_back({1, 1.0 / 3.0, 2.0 / 9.0, 1e-6, 7, 0.125, 1.0 / 7.0});
  std::stringstream ss;
  write_history_csv(ss, rep);
  const auto back = read_history_csv(ss);
  REQUIRE(back.iterations.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& a = rep.iterations[k];
    const auto& b = back.iterations[k];
    CHECK(a.iteration == b.iteration);
    CHECK(a.residual_norm == b.residual_norm);
    CHECK(a.relative_residual == b.relative_residual);
    CHECK(a.eta == b.eta);
    CHECK(a.gmres_iterations == b.gmres_iterations);
    CHECK(a.residual_seconds == b.residual_seconds);
    CHECK(a.jacobian_seconds == b.jacobian_seconds);
  }
  std::stringstream bad("header\n1,2,3\n");
  CHECK_THROWS((void)read_history_csv(bad));
}

TEST_CASE("poisson experiment reproduces the manufactured solution") {
  auto cfg = parse_config(kSmall);
  cfg.problem = ProblemKind::poisson;
  cfg.nx = cfg.ny = 15;
  for (const auto solver : {SolverKind::nks, SolverKind::snk, SolverKind::snk2}) {
    cfg.solver = solver;
    const auto r = run_experiment(cfg);
    CHECK(r.report.converged());
    CHECK(r.report.outer_iterations() == 1);
    Executor exec(1);
    SolverStack stack(cfg, exec);
    const auto& d = *stack.discretization();
    double worst = 0.0;
    for (const auto& sub : d.decomposition().subdomains())
      for (std::size_t k = 0; k < sub.grid.size(); ++k) {
        const Point2 p = sub.grid.point(k);
        const double exact = std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y);
        worst = std::max(worst, std::abs(r.solution[static_cast<Eigen::Index>(d.layout().index(sub.id, 0, k))] - exact));
      }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("experiment artifacts") {
  auto cfg = parse_config(kSmall);
  const auto dir = scratch("artifacts");
  cfg.output_dir = dir.string();
  const auto r = run_experiment(cfg);
  REQUIRE(r.report.converged());
  CHECK(r.local_iterations > 0);
  CHECK(r.interface_mismatch < 1e-8);
  write_artifacts(r);
  std::ifstream hist(dir / "small_snk_history.csv");
  REQUIRE(hist);
  const auto back = read_history_csv(hist);
  REQUIRE(back.iterations.size() == r.report.iterations.size());
  CHECK(back.iterations.back().residual_norm == r.report.iterations.back().residual_norm);
  std::ifstream timing(dir / "small_snk_timing.csv");
  std::string header;
  std::string row;
  std::getline(timing, header);
  std::getline(timing, row);
  CHECK(header.find("total_seconds") != std::string::npos);
  CHECK(row.rfind("snk,converged,", 0) == 0);
}

TEST_CASE("thread sweep is deterministic") {
  auto cfg = parse_config(kSmall);
  for (const auto solver : {SolverKind::snk, SolverKind::snk2}) {
    cfg.solver = solver;
    const auto sweep = scaling_sweep(cfg, {1, 2, 4});
    REQUIRE(sweep.rows.size() == 3);
    CHECK(sweep.rows[0].final_residual == sweep.rows[2].final_residual);
    CHECK(sweep.rows[1].gmres_iterations == sweep.rows[0].gmres_iterations);
    const auto table = sweep.table();
    CHECK(table.find("—") != std::string::npos);
    CHECK(table.find("res_speedup") != std::string::npos);
  }
  CHECK_THROWS_AS((void)scaling_sweep(cfg, {}), ConfigError);
}

TEST_CASE("stack accessors") {
  auto cfg = parse_config(kSmall);
  Executor exec(1);
  SolverStack snk(cfg, exec);
  CHECK_NOTHROW((void)snk.snk());
  CHECK_THROWS_AS((void)snk.nks(), std::logic_error);
  CHECK(snk.fas() == nullptr);
  cfg.solver = SolverKind::snk2;
  SolverStack two(cfg, exec);
  CHECK(two.fas() != nullptr);
  CHECK(two.newton_options().rtol == cfg.rtol);
  CHECK_FALSE(two.newton_options().affine);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string out = " --out " + (dir / "out").string();
  const std::string good = write("good.ini", kSmall);
  CHECK(run_cli("run " + good + out) == 0);

  auto capped = parse_config(kSmall);
  capped.max_outer = 1;
  capped.output_dir = (dir / "out").string();
  CHECK(run_cli("run " + write("capped.ini", format_config(capped))) == 2);

  CHECK(run_cli("run " + write("bad.ini", "[problem]\nname = heat\n") + out) == 1);
  auto invalid = parse_config(kSmall);
  invalid.overlap = 2.0;
  CHECK(run_cli("run " + write("invalid.ini", format_config(invalid)) + out) == 1);
  CHECK(run_cli("run " + good + " --solver bogus" + out) == 1);
  CHECK(run_cli("sweep " + good + " --threads 1,2") == 0);
  CHECK(run_cli("sweep " + good + " --threads 1 --solver nks") == 1);
  CHECK(run_cli("") != 0);
}
