#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "schwarz/outer_system.hpp"

namespace schwarz {

class NumericalBreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LinearMap = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  std::size_t iterations = 0;
  double relres = 0.0;
  bool converged = false;
};

/// Unrestarted GMRES from a zero initial guess, modified Gram-Schmidt with one
/// reorthogonalization pass, optional right preconditioning. Stops when
/// ||b - A x|| <= tol ||b|| or after maxit iterations.
[[nodiscard]] GmresResult gmres(const LinearMap& apply, const Vector& b, double tol, std::size_t maxit,
                                const LinearMap& precond = {});

/// eta_k = scale * (||F_k|| / ||F_{k-1}||)^exponent clamped to [floor, eta0];
/// the first iteration uses eta0.
struct ForcingSchedule {
  double eta0 = 1e-4;
  double scale = 1e-4;
  double exponent = 2.0;
  double floor = 1e-12;

  [[nodiscard]] double first() const { return eta0; }
  [[nodiscard]] double next(double norm, double previous_norm) const;
};

struct NewtonOptions {
  double rtol = 1e-10;
  /// Absolute residual floor; the driver stops at max(rtol ||F0||, atol).
  double atol = 0.0;
  std::size_t max_outer = 50;
  std::size_t max_halvings = 8;
  std::size_t gmres_maxit = 200;
  /// When positive, an accepted step shorter than step_tol (1 + ||u||)
  /// ends the iteration as converged (roundoff floor reached).
  double step_tol = 0.0;
  /// The system is affine: every inner solve is driven to rtol / 2 so a
  /// single step meets the outer tolerance.
  bool affine = false;
  ForcingSchedule forcing;
};

enum class NewtonStatus { converged, max_iterations, line_search_failed };

[[nodiscard]] std::string to_string(NewtonStatus s);

struct IterationRecord {
  std::size_t iteration = 0;
  double residual_norm = 0.0;
  double relative_residual = 0.0;
  double eta = 0.0;
  std::size_t gmres_iterations = 0;
  double residual_seconds = 0.0;
  double jacobian_seconds = 0.0;
};

struct SolveReport {
  std::vector<IterationRecord> iterations;
  NewtonStatus status = NewtonStatus::max_iterations;
  std::string message;

  /// Number of Newton steps taken (one fewer than the recorded iterates).
  [[nodiscard]] std::size_t outer_iterations() const { return iterations.empty() ? 0 : iterations.size() - 1; }
  [[nodiscard]] std::size_t total_gmres() const;
  [[nodiscard]] double final_relative_residual() const {
    return iterations.empty() ? 0.0 : iterations.back().relative_residual;
  }
  [[nodiscard]] double residual_seconds() const;
  [[nodiscard]] double jacobian_seconds() const;
  [[nodiscard]] bool converged() const { return status == NewtonStatus::converged; }
};

struct NewtonResult {
  Vector u;
  SolveReport report;
};

/// Inexact Newton with forcing-term controlled GMRES steps and halving line
/// search. A residual evaluation that throws std::runtime_error during the
/// line search counts as a rejected trial step.
[[nodiscard]] NewtonResult inexact_newton(OuterSystem& system, const Vector& u0, const NewtonOptions& opts = {});

}  // namespace schwarz
