#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "schwarz/decomposition.hpp"
#include "schwarz/pde.hpp"

namespace schwarz {

/// Dense LU of a local Jacobian together with the matrix itself. Rows are
/// equilibrated before factoring because collocation rows for second
/// derivatives and for boundary values differ in scale by orders of
/// magnitude.
class FactoredJacobian {
 public:
  FactoredJacobian() = default;
  /// Throws SingularBlockError when a pivot vanishes.
  FactoredJacobian(Matrix jac, std::size_t subdomain);

  [[nodiscard]] bool valid() const { return matrix_.size() > 0; }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] Vector solve(const Eigen::Ref<const Vector>& rhs) const {
    return lu_.solve(Vector(row_scale_.cwiseProduct(rhs)));
  }
  [[nodiscard]] Vector apply(const Eigen::Ref<const Vector>& v) const { return matrix_ * v; }

 private:
  Matrix matrix_;
  Vector row_scale_;
  Eigen::PartialPivLU<Matrix> lu_;
};

class SingularBlockError : public std::runtime_error {
 public:
  SingularBlockError(std::size_t subdomain, const std::string& what)
      : std::runtime_error(what), subdomain_(subdomain) {}
  [[nodiscard]] std::size_t subdomain() const { return subdomain_; }

 private:
  std::size_t subdomain_;
};

class LocalDivergenceError : public std::runtime_error {
 public:
  LocalDivergenceError(std::size_t subdomain, std::vector<double> history, const std::string& what)
      : std::runtime_error(what), subdomain_(subdomain), history_(std::move(history)) {}
  [[nodiscard]] std::size_t subdomain() const { return subdomain_; }
  [[nodiscard]] const std::vector<double>& history() const { return history_; }

 private:
  std::size_t subdomain_;
  std::vector<double> history_;
};

/// The subdomain operator f_i: PDE rows on X_i, boundary-condition rows on
/// G_i0 and the local field's own values on every G_ij. Rows follow the
/// unknown layout (component-major, grid node order) so that row r of f_i
/// and row r of T_i refer to the same node and component.
class LocalOperator {
 public:
  LocalOperator(const Subdomain& sub, ProblemPtr problem);

  [[nodiscard]] const Subdomain& subdomain() const { return *sub_; }
  [[nodiscard]] const PdeProblem& problem() const { return *problem_; }
  [[nodiscard]] std::size_t ncomp() const { return problem_->ncomp(); }
  [[nodiscard]] std::size_t size() const { return sub_->grid.size() * ncomp(); }

  enum class RowKind { pde, boundary, interface };
  [[nodiscard]] RowKind row_kind(std::size_t row) const;

  [[nodiscard]] Vector eval(const Eigen::Ref<const Vector>& u) const;
  [[nodiscard]] Matrix jacobian(const Eigen::Ref<const Vector>& u) const;

 private:
  const Subdomain* sub_;
  ProblemPtr problem_;
};

struct LocalSolveOptions {
  double tol = 1e-12;
  std::size_t max_iterations = 50;
  /// Trust-region reductions allowed before a step is given up on.
  std::size_t max_shrinks = 40;
};

struct LocalSolveResult {
  Vector z;                    // u_i - w where f_i(w) = t_i
  FactoredJacobian jacobian;   // f_i'(u_i - z)
  std::size_t iterations = 0;  // accepted steps
  std::vector<double> history; // residual norms
};

/// Solves f_i(u_i - z) = t_i for z by trust-region Newton (dogleg_solve),
/// starting from w = u_i. Throws LocalDivergenceError on failure.
[[nodiscard]] LocalSolveResult solve_local(const LocalOperator& op, const Eigen::Ref<const Vector>& u,
                                           const Eigen::Ref<const Vector>& t, const LocalSolveOptions& opts = {});

}  // namespace schwarz
