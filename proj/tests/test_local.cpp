#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "schwarz/dogleg.hpp"
#include "schwarz/local.hpp"
#include "schwarz/transfer.hpp"
#include "test_util.hpp"

using namespace schwarz;
using schwarz::testing::fd_directional;
using schwarz::testing::random_vector;
using schwarz::testing::rel_err;

namespace {

const Rect square{-1, 1, -1, 1};

Vector sample(const TensorGrid& g, const std::function<double(double, double)>& fn) {
  Vector v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point2 p = g.point(k);
    v[static_cast<Eigen::Index>(k)] = fn(p.x, p.y);
  }
  return v;
}

// Undamped Newton with full pivoting, independent of the trust-region
// machinery under test.
Vector plain_newton(const LocalOperator& op, Vector w) {
  for (int it = 0; it < 40; ++it) {
    const Vector f = op.eval(w);
    if (f.norm() < 1e-13) break;
    w -= Eigen::FullPivLU<Matrix>(op.jacobian(w)).solve(f);
  }
  return w;
}

}  // namespace

TEST_CASE("local operator: row kinds and interface rows") {
  const auto dec = build_uniform(square, 2, 2, 0.25, 7, 7);
  const LocalOperator op(dec[0], cavity_problem(100));
  const auto& s = dec[0];
  CHECK(op.size() == 3 * s.grid.size());
  std::mt19937 rng(1);
  const Vector u = random_vector(op.size(), rng);
  const Vector f = op.eval(u);
  const std::size_t n = s.grid.size();
  for (std::size_t r = 0; r < op.size(); ++r) {
    const std::size_t k = r % n;
    switch (s.node_kind[k]) {
      case Subdomain::NodeKind::interior:
        CHECK(op.row_kind(r) == LocalOperator::RowKind::pde);
        break;
      case Subdomain::NodeKind::physical:
        CHECK(op.row_kind(r) == LocalOperator::RowKind::boundary);
        break;
      case Subdomain::NodeKind::interface:
        CHECK(op.row_kind(r) == LocalOperator::RowKind::interface);
        CHECK(f[static_cast<Eigen::Index>(r)] == u[static_cast<Eigen::Index>(r)]);
        break;
    }
  }
}

TEST_CASE("local operator: jacobian matches central differences") {
  const auto dec = build_uniform(square, 2, 2, 0.25, 8, 8);
  std::mt19937 rng(2);
  for (const auto& prob : {burgers_problem(1.0 / 100), cavity_problem(400)}) {
    for (std::size_t i : {0u, 3u}) {
      const LocalOperator op(dec[i], prob);
      const Vector u = random_vector(op.size(), rng, 0.5);
      const Matrix jac = op.jacobian(u);
      auto f = [&](const Vector& w) { return op.eval(w); };
      for (int trial = 0; trial < 3; ++trial) {
        const Vector v = random_vector(op.size(), rng);
        CHECK(rel_err(jac * v, fd_directional(f, u, v)) < 1e-6);
      }
    }
  }
}

TEST_CASE("factored jacobian: equilibrated solve round trip") {
  std::mt19937 rng(3);
  const Eigen::Index n = 40;
  Matrix a = Matrix::Random(n, n) + 5.0 * Matrix::Identity(n, n);
  // Row scales spread over ten orders of magnitude, like collocation rows.
  for (Eigen::Index r = 0; r < n; ++r) a.row(r) *= std::pow(10.0, static_cast<double>(r % 11) - 5.0);
  const FactoredJacobian fj(a, 4);
  CHECK(fj.valid());
  CHECK(fj.matrix() == a);
  const Vector v = random_vector(static_cast<std::size_t>(n), rng);
  CHECK(rel_err(fj.solve(fj.apply(v)), v) < 1e-12);
  // Forward residuals are only small relative to each row's own scale.
  const Vector scale = a.rowwise().lpNorm<Eigen::Infinity>().cwiseInverse();
  CHECK(rel_err(scale.cwiseProduct(fj.apply(fj.solve(v))), scale.cwiseProduct(v)) < 1e-12);
  CHECK_FALSE(FactoredJacobian().valid());
}

TEST_CASE("factored jacobian: singular block reports its subdomain") {
  Matrix a = Matrix::Identity(4, 4);
  a.row(2).setZero();
  try {
    const FactoredJacobian fj(a, 7);
    FAIL("expected SingularBlockError");
  } catch (const SingularBlockError& e) {
    CHECK(e.subdomain() == 7);
  }
}

TEST_CASE("dogleg: affine systems take one step") {
  std::mt19937 rng(4);
  const Matrix a = Matrix::Random(10, 10) + 4.0 * Matrix::Identity(10, 10);
  const Vector b = random_vector(10, rng);
  DoglegOptions opts;
  opts.target = 1e-12 * b.norm();
  opts.linear = true;
  const auto r = dogleg_solve([&](const Vector& x) -> Vector { return a * x - b; },
                              [&](const Vector&) -> Matrix { return a; }, Vector::Zero(10), opts);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(rel_err(r.x, a.fullPivLu().solve(b)) < 1e-12);
  CHECK(r.history.size() == 2);
}

TEST_CASE("dogleg: rosenbrock system from the classic start") {
  auto f = [](const Vector& x) -> Vector {
    Vector out(2);
    out << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
    return out;
  };
  auto j = [](const Vector& x) -> Matrix {
    Matrix out(2, 2);
    out << -20.0 * x[0], 10.0, -1.0, 0.0;
    return out;
  };
  Vector x0(2);
  x0 << -1.2, 1.0;
  DoglegOptions opts;
  opts.target = 1e-12;
  const auto r = dogleg_solve(f, j, x0, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-10);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-10);
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] < r.history[k - 1]);
}

TEST_CASE("dogleg: a system without a root fails without throwing") {
  auto f = [](const Vector& x) -> Vector { return (x.array().square() + 1.0).matrix(); };
  auto j = [](const Vector& x) -> Matrix { return (2.0 * x).asDiagonal(); };
  DoglegOptions opts;
  opts.target = 1e-10;
  opts.max_iterations = 30;
  DoglegResult r;
  CHECK_NOTHROW(r = dogleg_solve(f, j, Vector::Constant(1, 0.5), opts));
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.failure.empty());
  CHECK(r.history.back() >= 1.0 - 1e-8);
}

TEST_CASE("solve_local: poisson with polynomial solution in one step") {
  auto exact = [](double x, double y) { return x * x * y; };
  const auto dec = build_uniform(square, 1, 1, 0.2, 9, 9);
  const LocalOperator op(dec[0], poisson_problem([](double, double y) { return 2 * y; }, exact));
  const Vector u = Vector::Zero(static_cast<Eigen::Index>(op.size()));
  const Vector t = Vector::Zero(u.size());
  const auto r = solve_local(op, u, t);
  CHECK(r.iterations == 1);
  const Vector w = u - r.z;
  CHECK((w - sample(dec[0].grid, exact)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.jacobian.valid());

  // Already solved: nothing to do.
  const auto again = solve_local(op, w, t);
  CHECK(again.iterations == 0);
  CHECK(again.z.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("solve_local: burgers agrees with plain Newton where it converges") {
  const auto dec = build_uniform(square, 1, 1, 0.2, 9, 9);
  const LocalOperator op(dec[0], burgers_problem(1.0 / 20));
  const Vector u = sample(dec[0].grid, burgers_boundary);
  const auto r = solve_local(op, u, Vector::Zero(u.size()));
  const Vector oracle = plain_newton(op, u);
  REQUIRE(op.eval(oracle).norm() < 1e-12);
  CHECK((u - r.z - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_local: burgers at nu = 1/400 finds an isolated root") {
  // Continuation in nu does not reach this root on a 9 x 9 grid, so the
  // oracle is local: plain Newton from a perturbed start must return to it.
  const auto dec = build_uniform(square, 1, 1, 0.2, 9, 9);
  const LocalOperator op(dec[0], burgers_problem(1.0 / 400));
  const Vector u = sample(dec[0].grid, burgers_boundary);
  const auto r = solve_local(op, u, Vector::Zero(u.size()));
  const Vector w = u - r.z;
  CHECK(op.eval(w).norm() < 1e-10);
  CHECK(r.history.size() == r.iterations + 1);
  CHECK((r.jacobian.matrix() - op.jacobian(w)).norm() < 1e-12 * op.jacobian(w).norm());

  std::mt19937 rng(6);
  const Vector start = w + random_vector(static_cast<std::size_t>(w.size()), rng, 1e-4);
  const Vector oracle = plain_newton(op, start);
  REQUIRE(op.eval(oracle).norm() < 1e-10);
  CHECK((w - oracle).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solve_local: interface data from a neighbour") {
  const auto dec = build_uniform(square, 2, 2, 0.25, 9, 9);
  const auto prob = burgers_problem(1.0 / 50);
  const TransferOperator tr(dec, 1);
  const auto& lay = tr.layout();
  Vector u(static_cast<Eigen::Index>(lay.total()));
  for (std::size_t i = 0; i < dec.size(); ++i) lay.block(u, i) = sample(dec[i].grid, burgers_boundary);
  const Vector t = tr.apply(u);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const LocalOperator op(dec[i], prob);
    const Vector ui = lay.block(u, i);
    const Vector ti = lay.block(t, i);
    const auto r = solve_local(op, ui, ti);
    const Vector w = ui - r.z;
    CHECK((op.eval(w) - ti).norm() < 1e-10);
    // Interface rows reproduce the neighbour's values exactly.
    for (const auto& [j, nodes] : dec[i].interface_groups)
      for (const auto k : nodes)
        CHECK(w[static_cast<Eigen::Index>(k)] == doctest::Approx(ti[static_cast<Eigen::Index>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("solve_local: iteration cap raises LocalDivergenceError") {
  const auto dec = build_uniform(square, 1, 1, 0.2, 9, 9);
  const LocalOperator op(dec[0], burgers_problem(1.0 / 400));
  const Vector u = Vector::Zero(static_cast<Eigen::Index>(op.size()));
  LocalSolveOptions opts;
  opts.max_iterations = 1;
  try {
    (void)solve_local(op, u, u, opts);
    FAIL("expected LocalDivergenceError");
  } catch (const LocalDivergenceError& e) {
    CHECK(e.subdomain() == 0);
    CHECK_FALSE(e.history().empty());
  }
  CHECK_THROWS_AS((void)solve_local(op, u, Vector::Zero(3)), std::invalid_argument);
}
