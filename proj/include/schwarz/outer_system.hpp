#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "schwarz/chebyshev.hpp"

namespace schwarz {

/// Raised when a Jacobian is requested at a state other than the one whose
/// residual was evaluated last.
class StateMismatchError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A nonlinear system F(u) = 0 seen by the outer Newton driver.
///
/// Jacobian and preconditioner applications reuse artifacts of the most recent
/// residual evaluation, so residual(u) must be called before jacobian_apply(u, .).
class OuterSystem {
 public:
  virtual ~OuterSystem() = default;

  [[nodiscard]] virtual std::size_t size() const = 0;
  [[nodiscard]] virtual Vector residual(const Vector& u) = 0;
  [[nodiscard]] virtual Vector jacobian_apply(const Vector& u, const Vector& v) = 0;

  [[nodiscard]] virtual bool has_preconditioner() const { return false; }
  /// Right preconditioner M^{-1} r at state u.
  [[nodiscard]] virtual Vector precondition(const Vector& u, const Vector& r) {
    (void)u;
    return r;
  }
};

/// Bitwise state fingerprint: a copy of the state vector.
class StateFingerprint {
 public:
  void set(const Vector& u) {
    state_ = u;
    valid_ = true;
  }
  void clear() { valid_ = false; }
  [[nodiscard]] bool matches(const Vector& u) const {
    return valid_ && state_.size() == u.size() && (state_.array() == u.array()).all();
  }
  void require(const Vector& u, const char* who) const {
    if (!matches(u)) throw StateMismatchError(std::string(who) + ": no cached residual evaluation at this state");
  }

 private:
  Vector state_;
  bool valid_ = false;
};

}  // namespace schwarz
