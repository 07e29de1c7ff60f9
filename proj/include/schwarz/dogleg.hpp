#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "schwarz/local.hpp"

namespace schwarz {

struct DoglegOptions {
  /// Absolute residual norm at which the iteration stops.
  double target = 0.0;
  std::size_t max_iterations = 50;
  /// Trust-region reductions allowed before a step is given up on.
  std::size_t max_shrinks = 40;
  /// The Jacobian is constant, so the last factorization stays valid.
  bool linear = false;
};

struct DoglegResult {
  Vector x;
  Vector residual;
  FactoredJacobian jacobian;  // F'(x)
  std::size_t iterations = 0;
  std::vector<double> history;
  bool converged = false;
  std::string failure;
};

/// Newton's method with dense direct solves, globalized by a dogleg trust
/// region on ||F||^2. Full Newton steps are taken whenever they fit inside
/// the region, so an affine F is solved in one step. `id` labels singular
/// factorizations. Never throws on stagnation; check `converged`.
[[nodiscard]] DoglegResult dogleg_solve(const std::function<Vector(const Vector&)>& residual,
                                        const std::function<Matrix(const Vector&)>& jacobian, Vector x,
                                        const DoglegOptions& opts, std::size_t id = 0);

}  // namespace schwarz
