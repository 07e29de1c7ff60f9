#include "schwarz/pde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schwarz {

LocalField::LocalField(const TensorGrid& grid, std::size_t ncomp, const Eigen::Ref<const Vector>& values)
    : grid_(&grid), ncomp_(ncomp), values_(values) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (values.size() != n * static_cast<Eigen::Index>(ncomp))
    throw std::invalid_argument("LocalField: value count does not match grid and component count");
  dx_.resize(values_.size());
  dy_.resize(values_.size());
  dxx_.resize(values_.size());
  dyy_.resize(values_.size());
  for (std::size_t c = 0; c < ncomp; ++c) {
    const auto off = static_cast<Eigen::Index>(c) * n;
    const auto seg = values_.segment(off, n);
    dx_.segment(off, n) = grid.dx(seg);
    dy_.segment(off, n) = grid.dy(seg);
    dxx_.segment(off, n) = grid.dxx(seg);
    dyy_.segment(off, n) = grid.dyy(seg);
  }
}

JacobianRows::JacobianRows(const TensorGrid& grid, Matrix& jac, std::size_t node)
    : grid_(&grid), jac_(&jac), node_(node) {}

void JacobianRows::value(std::size_t row_comp, std::size_t col_comp, double coeff) {
  const std::size_t n = grid_->size();
  (*jac_)(static_cast<Eigen::Index>(row_comp * n + node_), static_cast<Eigen::Index>(col_comp * n + node_)) += coeff;
}

void JacobianRows::along_x(const Matrix& d, std::size_t row_comp, std::size_t col_comp, double coeff) {
  const std::size_t n = grid_->size();
  const auto [i, j] = grid_->coords(node_);
  const auto row = static_cast<Eigen::Index>(row_comp * n + node_);
  for (std::size_t k = 0; k < grid_->nx(); ++k)
    (*jac_)(row, static_cast<Eigen::Index>(col_comp * n + grid_->index(k, j))) +=
        coeff * d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
}

void JacobianRows::along_y(const Matrix& d, std::size_t row_comp, std::size_t col_comp, double coeff) {
  const std::size_t n = grid_->size();
  const auto [i, j] = grid_->coords(node_);
  const auto row = static_cast<Eigen::Index>(row_comp * n + node_);
  for (std::size_t k = 0; k < grid_->ny(); ++k)
    (*jac_)(row, static_cast<Eigen::Index>(col_comp * n + grid_->index(i, k))) +=
        coeff * d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
}

void JacobianRows::dx(std::size_t r, std::size_t c, double coeff) { along_x(grid_->gx().diff(), r, c, coeff); }
void JacobianRows::dy(std::size_t r, std::size_t c, double coeff) { along_y(grid_->gy().diff(), r, c, coeff); }
void JacobianRows::dxx(std::size_t r, std::size_t c, double coeff) { along_x(grid_->gx().diff2(), r, c, coeff); }
void JacobianRows::dyy(std::size_t r, std::size_t c, double coeff) { along_y(grid_->gy().diff2(), r, c, coeff); }

Vector PdeProblem::residual_at(const LocalField& u, std::span<const std::size_t> nodes, bool boundary) const {
  const std::size_t nc = ncomp();
  const std::size_t m = nodes.size();
  Vector out(static_cast<Eigen::Index>(nc * m));
  std::vector<double> buf(nc);
  for (std::size_t r = 0; r < m; ++r) {
    if (boundary)
      boundary_residual(u, nodes[r], buf);
    else
      interior_residual(u, nodes[r], buf);
    for (std::size_t c = 0; c < nc; ++c) out[static_cast<Eigen::Index>(c * m + r)] = buf[c];
  }
  return out;
}

Matrix PdeProblem::jacobian_at(const LocalField& u, std::span<const std::size_t> nodes, bool boundary) const {
  const std::size_t nc = ncomp();
  const std::size_t n = u.grid().size();
  const auto cols = static_cast<Eigen::Index>(nc * n);
  Matrix full = Matrix::Zero(cols, cols);
  for (const std::size_t k : nodes) {
    JacobianRows rows(u.grid(), full, k);
    if (boundary)
      boundary_jacobian(u, rows);
    else
      interior_jacobian(u, rows);
  }
  const std::size_t m = nodes.size();
  Matrix out(static_cast<Eigen::Index>(nc * m), cols);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t r = 0; r < m; ++r)
      out.row(static_cast<Eigen::Index>(c * m + r)) = full.row(static_cast<Eigen::Index>(c * n + nodes[r]));
  return out;
}

double burgers_boundary(double x, double y) {
  const double theta = 3.0 * std::numbers::pi / 16.0;
  return std::atan(std::cos(theta) * x + std::sin(theta) * y);
}

double cavity_lid(double y) {
  if (y <= 0.9) return 0.0;
  const double s = (y - 1.0) / 0.1;
  const double gap = 1.0 - s * s;
  if (gap <= 0.0) return 0.0;
  return std::exp(-s * s / gap);
}

double cavity_lid_slope(double y) {
  if (y <= 0.9) return 0.0;
  const double s = (y - 1.0) / 0.1;
  const double gap = 1.0 - s * s;
  if (gap <= 0.0) return 0.0;
  // d/ds exp(-s^2/(1-s^2)) = exp(...) * (-2s/(1-s^2)^2), ds/dy = 10
  return std::exp(-s * s / gap) * (-2.0 * s / (gap * gap)) * 10.0;
}

namespace {

class Poisson final : public PdeProblem {
 public:
  Poisson(ScalarField forcing, ScalarField boundary) : forcing_(std::move(forcing)), boundary_(std::move(boundary)) {
    if (!forcing_) forcing_ = [](double, double) { return 0.0; };
    if (!boundary_) boundary_ = [](double, double) { return 0.0; };
  }

  std::string name() const override { return "poisson"; }
  std::size_t ncomp() const override { return 1; }
  bool is_linear() const override { return true; }

  void interior_residual(const LocalField& u, std::size_t k, std::span<double> out) const override {
    const Point2 p = u.grid().point(k);
    out[0] = u.laplacian(0, k) - forcing_(p.x, p.y);
  }
  void boundary_residual(const LocalField& u, std::size_t k, std::span<double> out) const override {
    const Point2 p = u.grid().point(k);
    out[0] = u.value(0, k) - boundary_(p.x, p.y);
  }
  void interior_jacobian(const LocalField&, JacobianRows& rows) const override { rows.laplacian(0, 0, 1.0); }
  void boundary_jacobian(const LocalField&, JacobianRows& rows) const override { rows.value(0, 0, 1.0); }
  void initial_guess(Point2 p, std::span<double> out) const override { out[0] = boundary_(p.x, p.y); }

 private:
  ScalarField forcing_;
  ScalarField boundary_;
};

class Burgers final : public PdeProblem {
 public:
  explicit Burgers(double nu) : nu_(nu) {}

  std::string name() const override { return "burgers"; }
  std::size_t ncomp() const override { return 1; }

  void interior_residual(const LocalField& u, std::size_t k, std::span<double> out) const override {
    out[0] = nu_ * u.laplacian(0, k) - u.value(0, k) * (u.dx(0, k) + u.dy(0, k));
  }
  void boundary_residual(const LocalField& u, std::size_t k, std::span<double> out) const override {
    const Point2 p = u.grid().point(k);
    out[0] = u.value(0, k) - burgers_boundary(p.x, p.y);
  }
  void interior_jacobian(const LocalField& u, JacobianRows& rows) const override {
    const std::size_t k = rows.node();
    rows.laplacian(0, 0, nu_);
    rows.value(0, 0, -(u.dx(0, k) + u.dy(0, k)));
    rows.dx(0, 0, -u.value(0, k));
    rows.dy(0, 0, -u.value(0, k));
  }
  void boundary_jacobian(const LocalField&, JacobianRows& rows) const override { rows.value(0, 0, 1.0); }
  void initial_guess(Point2 p, std::span<double> out) const override { out[0] = burgers_boundary(p.x, p.y); }

 private:
  double nu_;
};

class Cavity final : public PdeProblem {
 public:
  explicit Cavity(double re) : re_(re) {}

  std::string name() const override { return "cavity"; }
  std::size_t ncomp() const override { return 3; }

  enum : std::size_t { U = 0, V = 1, W = 2 };

  void interior_residual(const LocalField& f, std::size_t k, std::span<double> out) const override {
    out[U] = -f.laplacian(U, k) - f.dy(W, k);
    out[V] = -f.laplacian(V, k) + f.dx(W, k);
    out[W] = -f.laplacian(W, k) / re_ + f.value(U, k) * f.dx(W, k) + f.value(V, k) * f.dy(W, k);
  }
  void boundary_residual(const LocalField& f, std::size_t k, std::span<double> out) const override {
    const Point2 p = f.grid().point(k);
    out[U] = f.value(U, k) - cavity_lid(p.y);
    out[V] = f.value(V, k);
    out[W] = f.value(W, k) + f.dy(U, k) - f.dx(V, k);
  }
  void interior_jacobian(const LocalField& f, JacobianRows& rows) const override {
    const std::size_t k = rows.node();
    rows.laplacian(U, U, -1.0);
    rows.dy(U, W, -1.0);
    rows.laplacian(V, V, -1.0);
    rows.dx(V, W, 1.0);
    rows.laplacian(W, W, -1.0 / re_);
    rows.dx(W, W, f.value(U, k));
    rows.dy(W, W, f.value(V, k));
    rows.value(W, U, f.dx(W, k));
    rows.value(W, V, f.dy(W, k));
  }
  void boundary_jacobian(const LocalField&, JacobianRows& rows) const override {
    rows.value(U, U, 1.0);
    rows.value(V, V, 1.0);
    rows.value(W, W, 1.0);
    rows.dy(W, U, 1.0);
    rows.dx(W, V, -1.0);
  }
  void initial_guess(Point2 p, std::span<double> out) const override {
    out[U] = cavity_lid(p.y);
    out[V] = 0.0;
    out[W] = -cavity_lid_slope(p.y);
  }

 private:
  double re_;
};

}  // namespace

ProblemPtr poisson_problem(ScalarField forcing, ScalarField boundary) {
  return std::make_shared<Poisson>(std::move(forcing), std::move(boundary));
}

ProblemPtr burgers_problem(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("burgers_problem: viscosity must be positive");
  return std::make_shared<Burgers>(nu);
}

ProblemPtr cavity_problem(double re) {
  if (!(re > 0.0)) throw std::invalid_argument("cavity_problem: Reynolds number must be positive");
  return std::make_shared<Cavity>(re);
}

}  // namespace schwarz
