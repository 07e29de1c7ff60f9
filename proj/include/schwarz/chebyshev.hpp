#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace schwarz {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Second-kind Chebyshev points on [a, b], ascending, endpoints exact.
[[nodiscard]] std::vector<double> cheb_points(std::size_t n, double a, double b);

/// One-dimensional Chebyshev collocation grid with barycentric weights and
/// the first-derivative matrix.
class Grid1D {
 public:
  Grid1D(std::size_t n, double a, double b);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double lower() const { return a_; }
  [[nodiscard]] double upper() const { return b_; }
  [[nodiscard]] const std::vector<double>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& bary_weights() const { return weights_; }

  /// Differentiation matrix D: exact on polynomials of degree < n.
  [[nodiscard]] const Matrix& diff() const { return diff_; }
  /// D*D, used for second derivatives.
  [[nodiscard]] const Matrix& diff2() const { return diff2_; }

  /// Index of the node within the coincidence tolerance of x, or npos.
  [[nodiscard]] std::size_t node_at(double x) const;

  /// Barycentric interpolation weights at x (one-hot when x is a node).
  [[nodiscard]] std::vector<double> interp_row(double x) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  double a_;
  double b_;
  std::vector<double> points_;
  std::vector<double> weights_;
  Matrix diff_;
  Matrix diff2_;
};

[[nodiscard]] double bary_eval(const Grid1D& g, std::span<const double> values, double x);

/// Dense m x n matrix whose rows are barycentric weights at dst_points.
[[nodiscard]] Matrix interp_matrix(const Grid1D& src, std::span<const double> dst_points);

/// Tensor-product grid. Linear index is x-fastest: index(i, j) = j * nx + i.
class TensorGrid {
 public:
  TensorGrid(Grid1D gx, Grid1D gy);

  [[nodiscard]] const Grid1D& gx() const { return gx_; }
  [[nodiscard]] const Grid1D& gy() const { return gy_; }
  [[nodiscard]] std::size_t nx() const { return gx_.size(); }
  [[nodiscard]] std::size_t ny() const { return gy_.size(); }
  [[nodiscard]] std::size_t size() const { return nx() * ny(); }

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return j * nx() + i; }
  [[nodiscard]] std::array<std::size_t, 2> coords(std::size_t k) const { return {k % nx(), k / nx()}; }
  [[nodiscard]] Point2 point(std::size_t k) const;
  [[nodiscard]] std::vector<Point2> points() const;

  /// Derivatives of nodal values along x or y (first or second order).
  [[nodiscard]] Vector dx(const Eigen::Ref<const Vector>& u) const;
  [[nodiscard]] Vector dy(const Eigen::Ref<const Vector>& u) const;
  [[nodiscard]] Vector dxx(const Eigen::Ref<const Vector>& u) const;
  [[nodiscard]] Vector dyy(const Eigen::Ref<const Vector>& u) const;

  [[nodiscard]] bool same_rect(const TensorGrid& other) const;

 private:
  Grid1D gx_;
  Grid1D gy_;
};

/// Sparse m x n interpolation matrix evaluating the tensor interpolant at dst.
[[nodiscard]] SparseMatrix tensor_interp_matrix(const TensorGrid& src, std::span<const Point2> dst);

struct GridTransfer {
  SparseMatrix restriction;   // coarse x fine
  SparseMatrix prolongation;  // fine x coarse
};

/// Interpolation-based restriction and prolongation between two grids on the
/// same rectangle.
[[nodiscard]] GridTransfer restriction_prolongation(const TensorGrid& fine, const TensorGrid& coarse);

}  // namespace schwarz
