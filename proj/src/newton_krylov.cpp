#include "schwarz/newton_krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace schwarz {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

GmresResult gmres(const LinearMap& apply, const Vector& b, double tol, std::size_t maxit, const LinearMap& precond) {
  if (maxit < 1) throw std::invalid_argument("gmres: maxit must be at least 1");
  GmresResult out;
  out.x = Vector::Zero(b.size());
  if (!b.allFinite()) throw NumericalBreakdownError("gmres: non-finite right-hand side");
  const double beta = b.norm();
  if (beta == 0.0) {
    out.converged = true;
    return out;
  }

  const auto m = static_cast<Eigen::Index>(maxit);
  std::vector<Vector> basis;
  basis.reserve(maxit + 1);
  basis.push_back(b / beta);
  Matrix hess = Matrix::Zero(m + 1, m);
  Vector cs = Vector::Zero(m);
  Vector sn = Vector::Zero(m);
  Vector g = Vector::Zero(m + 1);
  g[0] = beta;

  Eigen::Index k = 0;
  for (; k < m; ++k) {
    Vector w = apply(precond ? precond(basis[static_cast<std::size_t>(k)]) : basis[static_cast<std::size_t>(k)]);
    if (!w.allFinite()) throw NumericalBreakdownError("gmres: operator produced non-finite values");
    const double wnorm0 = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j <= k; ++j) {
        const double h = basis[static_cast<std::size_t>(j)].dot(w);
        hess(j, k) += h;
        w -= h * basis[static_cast<std::size_t>(j)];
      }
    }
    const double hnext = w.norm();
    hess(k + 1, k) = hnext;

    for (Eigen::Index j = 0; j < k; ++j) {
      const double a = hess(j, k);
      const double c = hess(j + 1, k);
      hess(j, k) = cs[j] * a + sn[j] * c;
      hess(j + 1, k) = -sn[j] * a + cs[j] * c;
    }
    const double a = hess(k, k);
    const double c = hess(k + 1, k);
    const double r = std::hypot(a, c);
    if (r == 0.0) throw NumericalBreakdownError("gmres: singular Hessenberg column");
    cs[k] = a / r;
    sn[k] = c / r;
    hess(k, k) = r;
    hess(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];

    out.iterations = static_cast<std::size_t>(k + 1);
    out.relres = std::abs(g[k + 1]) / beta;
    if (!std::isfinite(out.relres)) throw NumericalBreakdownError("gmres: non-finite residual estimate");
    const bool breakdown = hnext <= 1e-14 * wnorm0;
    if (out.relres <= tol || breakdown) {
      out.converged = true;
      ++k;
      break;
    }
    basis.push_back(w / hnext);
  }

  const Eigen::Index used = static_cast<Eigen::Index>(out.iterations);
  const Vector y = hess.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
  Vector z = Vector::Zero(b.size());
  for (Eigen::Index j = 0; j < used; ++j) z += y[j] * basis[static_cast<std::size_t>(j)];
  out.x = precond ? precond(z) : z;
  if (!out.x.allFinite()) throw NumericalBreakdownError("gmres: non-finite solution");
  return out;
}

double ForcingSchedule::next(double norm, double previous_norm) const {
  if (previous_norm <= 0.0) return eta0;
  const double eta = scale * std::pow(norm / previous_norm, exponent);
  return std::clamp(eta, floor, eta0);
}

std::string to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::converged:
      return "converged";
    case NewtonStatus::max_iterations:
      return "max_iterations";
    case NewtonStatus::line_search_failed:
      return "line_search_failed";
  }
  return "unknown";
}

std::size_t SolveReport::total_gmres() const {
  return std::accumulate(iterations.begin(), iterations.end(), std::size_t{0},
                         [](std::size_t acc, const IterationRecord& r) { return acc + r.gmres_iterations; });
}

double SolveReport::residual_seconds() const {
  return std::accumulate(iterations.begin(), iterations.end(), 0.0,
                         [](double acc, const IterationRecord& r) { return acc + r.residual_seconds; });
}

double SolveReport::jacobian_seconds() const {
  return std::accumulate(iterations.begin(), iterations.end(), 0.0,
                         [](double acc, const IterationRecord& r) { return acc + r.jacobian_seconds; });
}

NewtonResult inexact_newton(OuterSystem& system, const Vector& u0, const NewtonOptions& opts) {
  if (!u0.allFinite()) throw std::invalid_argument("inexact_newton: initial state is not finite");
  NewtonResult result{u0, {}};
  auto& report = result.report;
  Vector& u = result.u;

  auto t0 = Clock::now();
  Vector res = system.residual(u);
  double norm = res.norm();
  const double initial_seconds = seconds_since(t0);
  if (!std::isfinite(norm)) throw NumericalBreakdownError("inexact_newton: non-finite initial residual");
  const double norm0 = norm;
  const double target = std::max(opts.rtol * norm0, opts.atol);
  auto relative = [&](double r) { return norm0 > 0.0 ? r / norm0 : 0.0; };

  report.iterations.push_back({0, norm, relative(norm), 0.0, 0, initial_seconds, 0.0});
  double previous = 0.0;

  for (std::size_t k = 0;; ++k) {
    if (norm <= target) {
      report.status = NewtonStatus::converged;
      break;
    }
    if (k == opts.max_outer) {
      report.status = NewtonStatus::max_iterations;
      break;
    }
    auto& rec = report.iterations.back();
    double eta = k == 0 ? opts.forcing.first() : opts.forcing.next(norm, previous);
    if (opts.affine) eta = 0.5 * opts.rtol;
    rec.eta = eta;

    t0 = Clock::now();
    LinearMap jac = [&](const Vector& v) { return system.jacobian_apply(u, v); };
    LinearMap prec;
    if (system.has_preconditioner()) prec = [&](const Vector& r) { return system.precondition(u, r); };
    const GmresResult lin = gmres(jac, -res, eta, opts.gmres_maxit, prec);
    rec.jacobian_seconds += seconds_since(t0);
    rec.gmres_iterations = lin.iterations;

    t0 = Clock::now();
    bool accepted = false;
    double lambda = 1.0;
    Vector trial;
    Vector trial_res;
    double trial_norm = 0.0;
    std::string last_failure;
    for (std::size_t h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
      trial = u + lambda * lin.x;
      try {
        trial_res = system.residual(trial);
      } catch (const std::runtime_error& e) {
        last_failure = e.what();
        continue;
      }
      trial_norm = trial_res.norm();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        accepted = true;
        break;
      }
    }
    rec.residual_seconds += seconds_since(t0);

    if (!accepted) {
      report.status = NewtonStatus::line_search_failed;
      report.message = last_failure.empty() ? "no decrease along the Newton step" : last_failure;
      break;
    }
    const double step = lambda * lin.x.norm();
    previous = norm;
    u = std::move(trial);
    res = std::move(trial_res);
    norm = trial_norm;
    report.iterations.push_back({k + 1, norm, relative(norm), 0.0, 0, 0.0, 0.0});
    if (opts.step_tol > 0.0 && step <= opts.step_tol * (1.0 + u.norm())) {
      report.status = NewtonStatus::converged;
      report.message = "step below roundoff threshold";
      break;
    }
  }
  return result;
}

}  // namespace schwarz
