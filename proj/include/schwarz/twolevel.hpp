#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "schwarz/dogleg.hpp"
#include "schwarz/newton_krylov.hpp"
#include "schwarz/solvers.hpp"

namespace schwarz {

class CoarseDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coarse discretization over the same subdomain boxes, with block-diagonal
/// restriction R (fine to coarse) and prolongation P (coarse to fine).
class CoarseSpace {
 public:
  CoarseSpace(DiscretizationPtr fine, std::size_t coarse_nx, std::size_t coarse_ny);

  [[nodiscard]] const DiscretizationPtr& fine() const { return fine_; }
  [[nodiscard]] const DiscretizationPtr& coarse() const { return coarse_; }
  [[nodiscard]] const GridTransfer& maps(std::size_t i) const { return maps_[i]; }

  [[nodiscard]] Vector restrict(const Vector& fine_vec, Executor* exec = nullptr) const;
  [[nodiscard]] Vector prolong(const Vector& coarse_vec, Executor* exec = nullptr) const;

 private:
  DiscretizationPtr fine_;
  DiscretizationPtr coarse_;
  std::vector<GridTransfer> maps_;
};

struct FasOptions {
  /// Relative tolerance of the coarse Newton-Krylov solve.
  double coarse_rtol = 1e-11;
  std::size_t coarse_max_outer = 50;
  /// Relative tolerance of the coarse linear solve in Jacobian applications.
  double linear_rtol = 1e-12;
  std::size_t linear_maxit = 400;
  enum class Method {
    /// Inexact Newton-GMRES preconditioned by the coarse diagonal blocks.
    newton_krylov,
    /// Dense trust-region Newton on the assembled coarse Jacobian, which
    /// tolerates coarse problems where Newton with line search stalls.
    trust_region,
  };
  Method method = Method::newton_krylov;
  /// When the coarse problem has no reachable root at the current iterate,
  /// return a zero correction (a one-level step) instead of throwing.
  bool skip_failed = false;
};

/// Everything the Jacobian of the coarse correction needs, captured at the
/// end of the coarse Newton solve.
struct FasState {
  StateFingerprint fine_state;
  Vector coarse_correction;                // e^
  Vector coarse_base;                      // u^ = R u
  std::vector<FactoredJacobian> a_hat;     // f^'(e^ + u^)
  std::vector<Matrix> base_jacobian;       // f^'(u^)
  std::vector<Matrix> fine_jacobian;       // f'(u)
  std::size_t coarse_iterations = 0;
};

/// Source of a coarse correction c(u) and its Jacobian for the two-level map.
class CoarseCorrector {
 public:
  virtual ~CoarseCorrector() = default;
  [[nodiscard]] virtual Vector correct(const Vector& u) = 0;
  /// c'(u) v; requires correct(u) to have been called at this u.
  [[nodiscard]] virtual Vector jacobian_apply(const Vector& u, const Vector& v) = 0;
};

/// Full approximation scheme correction over the f - T operator.
class FasCorrector final : public CoarseCorrector {
 public:
  FasCorrector(std::shared_ptr<const CoarseSpace> space, Executor& exec, FasOptions opts = {});

  struct Correction {
    Vector c;
    FasState state;
  };

  /// Solves f^(e^ + R u) - T^ e^ - f^(R u) + R (f(u) - T u) = 0 and returns P e^.
  [[nodiscard]] Correction fas_correction(const Vector& u) const;
  /// c'(u) v using the factorizations stored in state.
  [[nodiscard]] Vector fas_jacobian_apply(const FasState& state, const Vector& u, const Vector& v) const;

  [[nodiscard]] Vector correct(const Vector& u) override;
  [[nodiscard]] Vector jacobian_apply(const Vector& u, const Vector& v) override;

  [[nodiscard]] const CoarseSpace& space() const { return *space_; }
  [[nodiscard]] std::size_t coarse_newton_iterations() const { return coarse_newton_iterations_; }
  /// Residual evaluations whose coarse solve failed and was skipped.
  [[nodiscard]] std::size_t skipped_corrections() const { return skipped_; }

 private:
  std::shared_ptr<const CoarseSpace> space_;
  Executor* exec_;
  FasOptions opts_;
  std::optional<FasState> last_;
  StateFingerprint skipped_state_;
  std::size_t coarse_newton_iterations_ = 0;
  std::size_t skipped_ = 0;
};

/// Two-level system h(u) = c(u) + F(u + c(u)) with F the base system
/// (f - T for NKS, g for SNK).
class TwoLevelSystem final : public OuterSystem {
 public:
  TwoLevelSystem(OuterSystem& base, CoarseCorrector& corrector);

  [[nodiscard]] std::size_t size() const override { return base_->size(); }
  [[nodiscard]] Vector residual(const Vector& u) override;
  /// h'(u) v = c'(u) v + F'(u + c(u)) (v + c'(u) v).
  [[nodiscard]] Vector jacobian_apply(const Vector& u, const Vector& v) override;
  [[nodiscard]] bool has_preconditioner() const override { return base_->has_preconditioner(); }
  [[nodiscard]] Vector precondition(const Vector& u, const Vector& r) override;

 private:
  OuterSystem* base_;
  CoarseCorrector* corrector_;
  StateFingerprint state_;
  Vector shifted_;
};

}  // namespace schwarz
