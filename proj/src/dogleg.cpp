#include "schwarz/dogleg.hpp"

#include <algorithm>
#include <cmath>

namespace schwarz {

DoglegResult dogleg_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Matrix(const Vector&)>& jacobian, Vector x, const DoglegOptions& opts,
                          std::size_t id) {
  DoglegResult out;
  Vector res = residual(x);
  double norm = res.norm();
  out.history.push_back(norm);

  bool factored_at_x = false;
  double radius = -1.0;
  while (norm > opts.target) {
    if (!std::isfinite(norm)) {
      out.failure = "non-finite residual";
      break;
    }
    if (out.iterations == opts.max_iterations) {
      out.failure = "iteration limit reached";
      break;
    }
    out.jacobian = FactoredJacobian(jacobian(x), id);
    factored_at_x = true;
    const Matrix& jac = out.jacobian.matrix();
    const Vector newton = -out.jacobian.solve(res);
    if (!newton.allFinite()) {
      out.failure = "non-finite Newton step";
      break;
    }
    const double newton_norm = newton.norm();
    const double scale = 1.0 + x.norm();
    if (radius < 0.0) radius = std::max({1.0, x.norm(), newton_norm});

    // steepest descent minimizer of the linear model
    const Vector grad = jac.transpose() * res;
    const Vector jgrad = jac * grad;
    const double jg2 = jgrad.squaredNorm();
    const Vector cauchy = jg2 > 0.0 ? Vector(-(grad.squaredNorm() / jg2) * grad) : Vector(Vector::Zero(x.size()));

    bool accepted = false;
    Vector step;
    Vector trial_res;
    for (std::size_t s = 0; s <= opts.max_shrinks; ++s) {
      if (newton_norm <= radius) {
        step = newton;
      } else if (cauchy.norm() >= radius) {
        step = cauchy * (radius / cauchy.norm());
      } else {
        const Vector d = newton - cauchy;
        const double a = d.squaredNorm();
        const double b = 2.0 * cauchy.dot(d);
        const double c = cauchy.squaredNorm() - radius * radius;
        const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
        step = cauchy + tau * d;
      }
      const double step_norm = step.norm();
      trial_res = residual(x + step);
      const double tn = trial_res.norm();
      const double predicted = norm * norm - (res + jac * step).squaredNorm();
      const double rho = std::isfinite(tn) && predicted > 0.0 ? (norm * norm - tn * tn) / predicted : -1.0;
      if (rho < 0.25) {
        radius = 0.25 * step_norm;
      } else if (rho > 0.75 && step_norm >= (1.0 - 1e-12) * radius) {
        radius *= 2.0;
      }
      if (rho > 1e-4) {
        accepted = true;
        break;
      }
      if (step_norm <= 1e-14 * scale) break;
    }
    if (!accepted) {
      // a Newton step below roundoff that cannot lower the residual: converged
      if (newton_norm <= 1e-12 * scale) {
        out.converged = true;
        break;
      }
      out.failure = "trust region collapsed without descent";
      break;
    }
    x += step;
    res = std::move(trial_res);
    norm = res.norm();
    ++out.iterations;
    out.history.push_back(norm);
    factored_at_x = opts.linear;
    if (step.norm() <= 1e-14 * scale) {
      out.converged = true;
      break;
    }
  }
  if (norm <= opts.target) out.converged = true;

  if (out.converged && (!factored_at_x || !out.jacobian.valid())) out.jacobian = FactoredJacobian(jacobian(x), id);
  out.x = std::move(x);
  out.residual = std::move(res);
  return out;
}

}  // namespace schwarz
