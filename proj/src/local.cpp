#include "schwarz/local.hpp"

#include "schwarz/dogleg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schwarz {

FactoredJacobian::FactoredJacobian(Matrix jac, std::size_t subdomain) : matrix_(std::move(jac)) {
  row_scale_ = matrix_.rowwise().lpNorm<Eigen::Infinity>();
  for (auto& s : row_scale_) s = s > 0.0 && std::isfinite(s) ? 1.0 / s : 1.0;
  lu_.compute(row_scale_.asDiagonal() * matrix_);
  const auto& lu = lu_.matrixLU();
  for (Eigen::Index k = 0; k < lu.rows(); ++k) {
    const double pivot = lu(k, k);
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      std::ostringstream msg;
      msg << "singular local Jacobian in subdomain " << subdomain << " (pivot " << k << ")";
      throw SingularBlockError(subdomain, msg.str());
    }
  }
}

LocalOperator::LocalOperator(const Subdomain& sub, ProblemPtr problem) : sub_(&sub), problem_(std::move(problem)) {}

LocalOperator::RowKind LocalOperator::row_kind(std::size_t row) const {
  switch (sub_->node_kind[row % sub_->grid.size()]) {
    case Subdomain::NodeKind::interior:
      return RowKind::pde;
    case Subdomain::NodeKind::physical:
      return RowKind::boundary;
    case Subdomain::NodeKind::interface:
      break;
  }
  return RowKind::interface;
}

Vector LocalOperator::eval(const Eigen::Ref<const Vector>& u) const {
  const auto& grid = sub_->grid;
  const std::size_t n = grid.size();
  const std::size_t nc = ncomp();
  const LocalField field(grid, nc, u);
  Vector out(static_cast<Eigen::Index>(n * nc));
  std::vector<double> buf(nc);
  for (std::size_t k = 0; k < n; ++k) {
    switch (sub_->node_kind[k]) {
      case Subdomain::NodeKind::interior:
        problem_->interior_residual(field, k, buf);
        break;
      case Subdomain::NodeKind::physical:
        problem_->boundary_residual(field, k, buf);
        break;
      case Subdomain::NodeKind::interface:
        for (std::size_t c = 0; c < nc; ++c) buf[c] = field.value(c, k);
        break;
    }
    for (std::size_t c = 0; c < nc; ++c) out[static_cast<Eigen::Index>(c * n + k)] = buf[c];
  }
  return out;
}

Matrix LocalOperator::jacobian(const Eigen::Ref<const Vector>& u) const {
  const auto& grid = sub_->grid;
  const std::size_t n = grid.size();
  const std::size_t nc = ncomp();
  const LocalField field(grid, nc, u);
  Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(n * nc), static_cast<Eigen::Index>(n * nc));
  for (std::size_t k = 0; k < n; ++k) {
    JacobianRows rows(grid, jac, k);
    switch (sub_->node_kind[k]) {
      case Subdomain::NodeKind::interior:
        problem_->interior_jacobian(field, rows);
        break;
      case Subdomain::NodeKind::physical:
        problem_->boundary_jacobian(field, rows);
        break;
      case Subdomain::NodeKind::interface:
        for (std::size_t c = 0; c < nc; ++c) rows.value(c, c, 1.0);
        break;
    }
  }
  return jac;
}

LocalSolveResult solve_local(const LocalOperator& op, const Eigen::Ref<const Vector>& u,
                             const Eigen::Ref<const Vector>& t, const LocalSolveOptions& opts) {
  const std::size_t id = op.subdomain().id;
  if (static_cast<std::size_t>(u.size()) != op.size() || static_cast<std::size_t>(t.size()) != op.size())
    throw std::invalid_argument("solve_local: block length mismatch");

  const Vector rhs = t;
  auto residual = [&](const Vector& w) -> Vector { return op.eval(w) - rhs; };
  auto jacobian = [&](const Vector& w) -> Matrix { return op.jacobian(w); };
  DoglegOptions dopts;
  dopts.max_iterations = opts.max_iterations;
  dopts.max_shrinks = opts.max_shrinks;
  dopts.linear = op.problem().is_linear();
  dopts.target = opts.tol * std::max(1.0, residual(Vector(u)).norm());
  auto solved = dogleg_solve(residual, jacobian, Vector(u), dopts, id);
  if (!solved.converged) {
    std::ostringstream msg;
    msg << "local solve diverged in subdomain " << id << ": " << solved.failure << " (residual "
        << solved.history.back() << " after " << solved.iterations << " iterations)";
    throw LocalDivergenceError(id, solved.history, msg.str());
  }

  LocalSolveResult result;
  result.z = u - solved.x;
  result.jacobian = std::move(solved.jacobian);
  result.iterations = solved.iterations;
  result.history = std::move(solved.history);
  return result;
}

}  // namespace schwarz
