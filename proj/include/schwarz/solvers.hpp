#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "schwarz/decomposition.hpp"
#include "schwarz/executor.hpp"
#include "schwarz/local.hpp"
#include "schwarz/outer_system.hpp"
#include "schwarz/pde.hpp"
#include "schwarz/transfer.hpp"

namespace schwarz {

/// The multidomain discretization: decomposition, problem, per-subdomain
/// operators f_i and the transfer operator T.
class Discretization {
 public:
  Discretization(Decomposition dec, ProblemPtr problem);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  [[nodiscard]] const Decomposition& decomposition() const { return dec_; }
  [[nodiscard]] const PdeProblem& problem() const { return *problem_; }
  [[nodiscard]] const ProblemPtr& problem_ptr() const { return problem_; }
  [[nodiscard]] const FieldLayout& layout() const { return transfer_.layout(); }
  [[nodiscard]] const TransferOperator& transfer() const { return transfer_; }
  [[nodiscard]] const LocalOperator& local(std::size_t i) const { return locals_[i]; }
  [[nodiscard]] std::size_t subdomains() const { return locals_.size(); }
  [[nodiscard]] std::size_t size() const { return layout().total(); }

  /// cat<f_i(u_i)>.
  [[nodiscard]] Vector eval(const Vector& u, Executor* exec = nullptr) const;
  /// The problem's initial guess sampled on every subdomain grid.
  [[nodiscard]] Vector initial_guess() const;
  /// max over i, j and x in G_ij of |u_i(x) - u_j(x)|.
  [[nodiscard]] double interface_mismatch(const Vector& u) const;

 private:
  Decomposition dec_;
  ProblemPtr problem_;
  TransferOperator transfer_;
  std::vector<LocalOperator> locals_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

[[nodiscard]] DiscretizationPtr make_discretization(Decomposition dec, ProblemPtr problem);

/// Newton-Krylov-Schwarz system F(e) = f(e + shift) - T e + rhs, right
/// preconditioned by the block diagonal of f'. With zero shift and rhs this
/// is the discrete multidomain problem f(u) - T u = 0; the shifted form is
/// the coarse equation of the full approximation scheme.
class NksSystem final : public OuterSystem {
 public:
  NksSystem(DiscretizationPtr disc, Executor& exec, Vector shift = {}, Vector rhs = {});

  [[nodiscard]] std::size_t size() const override { return disc_->size(); }
  [[nodiscard]] Vector residual(const Vector& u) override;
  [[nodiscard]] Vector jacobian_apply(const Vector& u, const Vector& v) override;
  [[nodiscard]] bool has_preconditioner() const override { return true; }
  [[nodiscard]] Vector precondition(const Vector& u, const Vector& r) override;

  /// Factored diagonal blocks f_i'(u_i + shift_i) at the cached state.
  [[nodiscard]] const std::vector<FactoredJacobian>& blocks(const Vector& u);

 private:
  void ensure_blocks(const Vector& u, const char* who);

  DiscretizationPtr disc_;
  Executor* exec_;
  Vector shift_;
  Vector rhs_;
  StateFingerprint state_;
  bool blocks_ready_ = false;
  std::vector<FactoredJacobian> blocks_;
};

/// Schwarz-Newton-Krylov system g(u) = u - f^{-1}(T u).
class SnkSystem final : public OuterSystem {
 public:
  SnkSystem(DiscretizationPtr disc, Executor& exec, LocalSolveOptions local = {});

  [[nodiscard]] std::size_t size() const override { return disc_->size(); }
  [[nodiscard]] Vector residual(const Vector& u) override;
  [[nodiscard]] Vector jacobian_apply(const Vector& u, const Vector& v) override;

  /// Accepted local Newton steps summed over all residual evaluations.
  [[nodiscard]] std::size_t local_iterations() const { return local_iterations_; }
  /// Factorizations of f_i'(u_i - z_i) from the last residual evaluation.
  [[nodiscard]] const std::vector<FactoredJacobian>& factors() const { return factors_; }

 private:
  DiscretizationPtr disc_;
  Executor* exec_;
  LocalSolveOptions local_;
  StateFingerprint state_;
  std::vector<FactoredJacobian> factors_;
  std::size_t local_iterations_ = 0;
};

}  // namespace schwarz
