#include "schwarz/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schwarz {

std::vector<double> cheb_points(std::size_t n, double a, double b) {
  if (n < 2) throw std::invalid_argument("cheb_points: need at least 2 points");
  if (!(a < b)) throw std::invalid_argument("cheb_points: empty interval");
  const double m = static_cast<double>(n - 1);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    // sin form keeps the node set exactly symmetric about the midpoint
    const double t = -std::sin(std::numbers::pi * (m - 2.0 * static_cast<double>(k)) / (2.0 * m));
    x[k] = a + 0.5 * (b - a) * (1.0 + t);
  }
  x.front() = a;
  x.back() = b;
  return x;
}

Grid1D::Grid1D(std::size_t n, double a, double b) : a_(a), b_(b), points_(cheb_points(n, a, b)), weights_(n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    weights_[k] = (k == 0 || k == n - 1) ? 0.5 * sign : sign;
  }
  diff_ = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (weights_[j] / weights_[i]) / (points_[i] - points_[j]);
      diff_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      diag -= d;
    }
    diff_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag;
  }
  diff2_ = diff_ * diff_;
}

std::size_t Grid1D::node_at(double x) const {
  const double tol = 1e-14 * (b_ - a_);
  for (std::size_t k = 0; k < points_.size(); ++k)
    if (std::abs(x - points_[k]) <= tol) return k;
  return npos;
}

std::vector<double> Grid1D::interp_row(double x) const {
  std::vector<double> row(points_.size(), 0.0);
  if (const std::size_t k = node_at(x); k != npos) {
    row[k] = 1.0;
    return row;
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    row[k] = weights_[k] / (x - points_[k]);
    denom += row[k];
  }
  for (double& r : row) r /= denom;
  return row;
}

double bary_eval(const Grid1D& g, std::span<const double> values, double x) {
  if (values.size() != g.size()) throw std::invalid_argument("bary_eval: value count mismatch");
  if (const std::size_t k = g.node_at(x); k != Grid1D::npos) return values[k];
  const auto& pts = g.points();
  const auto& w = g.bary_weights();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double c = w[k] / (x - pts[k]);
    num += c * values[k];
    den += c;
  }
  return num / den;
}

Matrix interp_matrix(const Grid1D& src, std::span<const double> dst_points) {
  Matrix m(static_cast<Eigen::Index>(dst_points.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t r = 0; r < dst_points.size(); ++r) {
    const auto row = src.interp_row(dst_points[r]);
    for (std::size_t c = 0; c < row.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

TensorGrid::TensorGrid(Grid1D gx, Grid1D gy) : gx_(std::move(gx)), gy_(std::move(gy)) {}

Point2 TensorGrid::point(std::size_t k) const {
  const auto [i, j] = coords(k);
  return {gx_.points()[i], gy_.points()[j]};
}

std::vector<Point2> TensorGrid::points() const {
  std::vector<Point2> pts(size());
  for (std::size_t k = 0; k < size(); ++k) pts[k] = point(k);
  return pts;
}

namespace {

// Apply a 1D operator along x (rows of length nx) of an x-fastest array.
Vector apply_x(const Matrix& d, const Eigen::Ref<const Vector>& u, Eigen::Index nx, Eigen::Index ny) {
  Eigen::Map<const Matrix> grid(u.data(), nx, ny);
  Vector out(nx * ny);
  Eigen::Map<Matrix>(out.data(), nx, ny).noalias() = d * grid;
  return out;
}

Vector apply_y(const Matrix& d, const Eigen::Ref<const Vector>& u, Eigen::Index nx, Eigen::Index ny) {
  Eigen::Map<const Matrix> grid(u.data(), nx, ny);
  Vector out(nx * ny);
  Eigen::Map<Matrix>(out.data(), nx, ny).noalias() = grid * d.transpose();
  return out;
}

}  // namespace

Vector TensorGrid::dx(const Eigen::Ref<const Vector>& u) const {
  return apply_x(gx_.diff(), u, static_cast<Eigen::Index>(nx()), static_cast<Eigen::Index>(ny()));
}
Vector TensorGrid::dy(const Eigen::Ref<const Vector>& u) const {
  return apply_y(gy_.diff(), u, static_cast<Eigen::Index>(nx()), static_cast<Eigen::Index>(ny()));
}
Vector TensorGrid::dxx(const Eigen::Ref<const Vector>& u) const {
  return apply_x(gx_.diff2(), u, static_cast<Eigen::Index>(nx()), static_cast<Eigen::Index>(ny()));
}
Vector TensorGrid::dyy(const Eigen::Ref<const Vector>& u) const {
  return apply_y(gy_.diff2(), u, static_cast<Eigen::Index>(nx()), static_cast<Eigen::Index>(ny()));
}

bool TensorGrid::same_rect(const TensorGrid& other) const {
  return gx_.lower() == other.gx_.lower() && gx_.upper() == other.gx_.upper() && gy_.lower() == other.gy_.lower() &&
         gy_.upper() == other.gy_.upper();
}

SparseMatrix tensor_interp_matrix(const TensorGrid& src, std::span<const Point2> dst) {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t r = 0; r < dst.size(); ++r) {
    const auto wx = src.gx().interp_row(dst[r].x);
    const auto wy = src.gy().interp_row(dst[r].y);
    for (std::size_t j = 0; j < wy.size(); ++j) {
      if (wy[j] == 0.0) continue;
      for (std::size_t i = 0; i < wx.size(); ++i) {
        if (wx[i] == 0.0) continue;
        entries.emplace_back(static_cast<int>(r), static_cast<int>(src.index(i, j)), wy[j] * wx[i]);
      }
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

GridTransfer restriction_prolongation(const TensorGrid& fine, const TensorGrid& coarse) {
  if (!fine.same_rect(coarse)) throw std::invalid_argument("restriction_prolongation: grids cover different rectangles");
  if (coarse.nx() > fine.nx() || coarse.ny() > fine.ny())
    throw std::invalid_argument("restriction_prolongation: coarse grid is finer than fine grid");
  const auto coarse_pts = coarse.points();
  const auto fine_pts = fine.points();
  return {tensor_interp_matrix(fine, coarse_pts), tensor_interp_matrix(coarse, fine_pts)};
}

}  // namespace schwarz
