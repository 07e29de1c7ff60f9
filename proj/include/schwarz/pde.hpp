#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schwarz/chebyshev.hpp"

namespace schwarz {

/// Nodal values of every component on one grid, with cached first and
/// second derivatives. Values are stored component-major: [c0 nodes, c1 nodes, ...].
class LocalField {
 public:
  LocalField(const TensorGrid& grid, std::size_t ncomp, const Eigen::Ref<const Vector>& values);

  [[nodiscard]] const TensorGrid& grid() const { return *grid_; }
  [[nodiscard]] std::size_t ncomp() const { return ncomp_; }

  [[nodiscard]] double value(std::size_t c, std::size_t k) const { return at(values_, c, k); }
  [[nodiscard]] double dx(std::size_t c, std::size_t k) const { return at(dx_, c, k); }
  [[nodiscard]] double dy(std::size_t c, std::size_t k) const { return at(dy_, c, k); }
  [[nodiscard]] double dxx(std::size_t c, std::size_t k) const { return at(dxx_, c, k); }
  [[nodiscard]] double dyy(std::size_t c, std::size_t k) const { return at(dyy_, c, k); }
  [[nodiscard]] double laplacian(std::size_t c, std::size_t k) const { return dxx(c, k) + dyy(c, k); }

 private:
  [[nodiscard]] double at(const Vector& v, std::size_t c, std::size_t k) const {
    return v[static_cast<Eigen::Index>(c * grid_->size() + k)];
  }

  const TensorGrid* grid_;
  std::size_t ncomp_;
  Vector values_;
  Vector dx_;
  Vector dy_;
  Vector dxx_;
  Vector dyy_;
};

/// Writes the linearization of the residual rows of one node into a dense
/// local Jacobian (component-major rows and columns).
class JacobianRows {
 public:
  JacobianRows(const TensorGrid& grid, Matrix& jac, std::size_t node);

  [[nodiscard]] std::size_t node() const { return node_; }

  void value(std::size_t row_comp, std::size_t col_comp, double coeff);
  void dx(std::size_t row_comp, std::size_t col_comp, double coeff);
  void dy(std::size_t row_comp, std::size_t col_comp, double coeff);
  void dxx(std::size_t row_comp, std::size_t col_comp, double coeff);
  void dyy(std::size_t row_comp, std::size_t col_comp, double coeff);
  void laplacian(std::size_t row_comp, std::size_t col_comp, double coeff) {
    dxx(row_comp, col_comp, coeff);
    dyy(row_comp, col_comp, coeff);
  }

 private:
  void along_x(const Matrix& d, std::size_t row_comp, std::size_t col_comp, double coeff);
  void along_y(const Matrix& d, std::size_t row_comp, std::size_t col_comp, double coeff);

  const TensorGrid* grid_;
  Matrix* jac_;
  std::size_t node_;
};

/// A nonlinear elliptic problem phi(x, u) = 0 in the domain and
/// beta(x, u) = 0 on its boundary, with exact linearizations.
class PdeProblem {
 public:
  virtual ~PdeProblem() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::size_t ncomp() const = 0;
  [[nodiscard]] virtual bool is_linear() const { return false; }

  /// Writes ncomp residual values of phi at grid node `node`.
  virtual void interior_residual(const LocalField& u, std::size_t node, std::span<double> out) const = 0;
  virtual void boundary_residual(const LocalField& u, std::size_t node, std::span<double> out) const = 0;
  virtual void interior_jacobian(const LocalField& u, JacobianRows& rows) const = 0;
  virtual void boundary_jacobian(const LocalField& u, JacobianRows& rows) const = 0;
  virtual void initial_guess(Point2 p, std::span<double> out) const = 0;

  /// Residual rows (component-major, |nodes| per component) at the given nodes.
  [[nodiscard]] Vector residual_at(const LocalField& u, std::span<const std::size_t> nodes, bool boundary) const;
  /// Jacobian rows matching residual_at, columns over all local unknowns.
  [[nodiscard]] Matrix jacobian_at(const LocalField& u, std::span<const std::size_t> nodes, bool boundary) const;
};

using ProblemPtr = std::shared_ptr<const PdeProblem>;
using ScalarField = std::function<double(double, double)>;

/// Delta u - forcing = 0 with u = boundary on the domain boundary.
[[nodiscard]] ProblemPtr poisson_problem(ScalarField forcing, ScalarField boundary = {});

/// nu Delta u - u (u_x + u_y) = 0 with arctan boundary data.
[[nodiscard]] ProblemPtr burgers_problem(double nu);

/// Regularized lid-driven cavity in velocity-vorticity form (u, v, omega).
[[nodiscard]] ProblemPtr cavity_problem(double re);

/// Boundary data of the Burgers test problem.
[[nodiscard]] double burgers_boundary(double x, double y);

/// Smooth lid velocity: 1 at y = 1, identically 0 for y <= 0.9.
[[nodiscard]] double cavity_lid(double y);
[[nodiscard]] double cavity_lid_slope(double y);

}  // namespace schwarz
