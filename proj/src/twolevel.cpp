#include "schwarz/twolevel.hpp"

#include <algorithm>
#include <sstream>

namespace schwarz {

namespace {

// Applies a per-subdomain grid map to every component of a block vector.
Vector map_blocks(const FieldLayout& from, const FieldLayout& to, const Vector& x,
                  const std::vector<const SparseMatrix*>& maps, Executor* exec) {
  from.check(x);
  Vector out(static_cast<Eigen::Index>(to.total()));
  auto body = [&](std::size_t i) {
    const auto nf = static_cast<Eigen::Index>(from.nodes(i));
    const auto nt = static_cast<Eigen::Index>(to.nodes(i));
    const auto src = from.block(x, i);
    auto dst = to.block(out, i);
    for (std::size_t c = 0; c < from.ncomp(); ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      dst.segment(ci * nt, nt) = *maps[i] * src.segment(ci * nf, nf);
    }
  };
  if (exec != nullptr) {
    exec->parallel_for(from.subdomains(), body);
  } else {
    for (std::size_t i = 0; i < from.subdomains(); ++i) body(i);
  }
  return out;
}

}  // namespace

CoarseSpace::CoarseSpace(DiscretizationPtr fine, std::size_t coarse_nx, std::size_t coarse_ny)
    : fine_(std::move(fine)),
      coarse_(make_discretization(with_resolution(fine_->decomposition(), coarse_nx, coarse_ny),
                                  fine_->problem_ptr())) {
  const auto& fd = fine_->decomposition();
  const auto& cd = coarse_->decomposition();
  maps_.reserve(fd.size());
  for (std::size_t i = 0; i < fd.size(); ++i) maps_.push_back(restriction_prolongation(fd[i].grid, cd[i].grid));
}

Vector CoarseSpace::restrict(const Vector& fine_vec, Executor* exec) const {
  std::vector<const SparseMatrix*> r;
  for (const auto& m : maps_) r.push_back(&m.restriction);
  return map_blocks(fine_->layout(), coarse_->layout(), fine_vec, r, exec);
}

Vector CoarseSpace::prolong(const Vector& coarse_vec, Executor* exec) const {
  std::vector<const SparseMatrix*> p;
  for (const auto& m : maps_) p.push_back(&m.prolongation);
  return map_blocks(coarse_->layout(), fine_->layout(), coarse_vec, p, exec);
}

FasCorrector::FasCorrector(std::shared_ptr<const CoarseSpace> space, Executor& exec, FasOptions opts)
    : space_(std::move(space)), exec_(&exec), opts_(opts) {}

FasCorrector::Correction FasCorrector::fas_correction(const Vector& u) const {
  const auto& fine = *space_->fine();
  const auto& coarse = space_->coarse();
  const auto& flay = fine.layout();
  const auto& clay = coarse->layout();

  const Vector fine_res = fine.eval(u, exec_) - fine.transfer().apply(u, exec_);
  Vector u_hat = space_->restrict(u, exec_);
  Vector r_hat = space_->restrict(fine_res, exec_) - coarse->eval(u_hat, exec_);

  const Vector e0 = Vector::Zero(static_cast<Eigen::Index>(clay.total()));
  NksSystem coarse_sys(coarse, *exec_, u_hat, r_hat);
  // The coarse residual cancels f^(u^) against r^, so it cannot be driven
  // below roundoff in their size. Near a fine solution the relative target
  // alone would ask for exactly that.
  const double floor = 1e-13 * r_hat.norm();
  Vector e_hat;
  std::size_t iterations = 0;
  if (opts_.method == FasOptions::Method::newton_krylov) {
    NewtonOptions nopts;
    nopts.rtol = opts_.coarse_rtol;
    nopts.max_outer = opts_.coarse_max_outer;
    nopts.atol = floor;
    nopts.step_tol = 1e-14;
    nopts.affine = coarse->problem().is_linear();
    auto solved = inexact_newton(coarse_sys, e0, nopts);
    if (!solved.report.converged()) {
      std::ostringstream msg;
      msg << "coarse FAS solve failed (" << to_string(solved.report.status) << ", relative residual "
          << solved.report.final_relative_residual() << " after " << solved.report.outer_iterations()
          << " iterations)";
      throw CoarseDivergenceError(msg.str());
    }
    e_hat = std::move(solved.u);
    iterations = solved.report.outer_iterations();
  } else {
    const Matrix t_hat = coarse->transfer().dense();
    auto residual = [&](const Vector& e) { return coarse_sys.residual(e); };
    auto jacobian = [&](const Vector& e) -> Matrix {
      const Vector shifted = e + u_hat;
      Matrix jac = -t_hat;
      exec_->parallel_for(clay.subdomains(), [&](std::size_t i) {
        const auto off = static_cast<Eigen::Index>(clay.offset(i));
        const auto n = static_cast<Eigen::Index>(clay.block_size(i));
        jac.block(off, off, n, n) += coarse->local(i).jacobian(clay.block(shifted, i));
      });
      return jac;
    };
    DoglegOptions dopts;
    dopts.max_iterations = opts_.coarse_max_outer;
    dopts.linear = coarse->problem().is_linear();
    dopts.target = std::max(opts_.coarse_rtol * residual(e0).norm(), floor);
    auto solved = dogleg_solve(residual, jacobian, e0, dopts);
    if (!solved.converged) {
      std::ostringstream msg;
      msg << "coarse FAS solve failed (" << solved.failure << ", relative residual "
          << solved.history.back() / std::max(solved.history.front(), 1e-300) << " after " << solved.iterations
          << " iterations)";
      throw CoarseDivergenceError(msg.str());
    }
    e_hat = std::move(solved.x);
    iterations = solved.iterations;
  }

  Correction out;
  out.c = space_->prolong(e_hat, exec_);
  FasState& st = out.state;
  st.fine_state.set(u);
  st.coarse_iterations = iterations;
  // f^'(e^ + u^) at the coarse solution, one factored block per subdomain
  (void)coarse_sys.residual(e_hat);
  st.a_hat = coarse_sys.blocks(e_hat);
  st.base_jacobian.resize(clay.subdomains());
  st.fine_jacobian.resize(flay.subdomains());
  exec_->parallel_for(clay.subdomains(), [&](std::size_t i) {
    st.base_jacobian[i] = coarse->local(i).jacobian(clay.block(u_hat, i));
    st.fine_jacobian[i] = fine.local(i).jacobian(flay.block(u, i));
  });
  st.coarse_correction = std::move(e_hat);
  st.coarse_base = std::move(u_hat);
  return out;
}

Vector FasCorrector::fas_jacobian_apply(const FasState& st, const Vector& u, const Vector& v) const {
  st.fine_state.require(u, "FasCorrector::fas_jacobian_apply");
  const auto& fine = *space_->fine();
  const auto& coarse = *space_->coarse();
  const auto& flay = fine.layout();
  const auto& clay = coarse.layout();
  flay.check(v);

  Vector lin = fine.transfer().apply(v, exec_);
  exec_->parallel_for(flay.subdomains(), [&](std::size_t i) {
    auto blk = flay.block(lin, i);
    blk = st.fine_jacobian[i] * flay.block(v, i) - blk;
  });
  const Vector r_hat = space_->restrict(lin, exec_);
  const Vector v_hat = space_->restrict(v, exec_);

  Vector b_hat(r_hat.size());
  exec_->parallel_for(clay.subdomains(), [&](std::size_t i) {
    const auto vi = clay.block(v_hat, i);
    clay.block(b_hat, i) = st.a_hat[i].apply(vi) - st.base_jacobian[i] * vi + clay.block(r_hat, i);
  });

  LinearMap apply = [&](const Vector& y) {
    Vector out = coarse.transfer().apply(y, exec_);
    exec_->parallel_for(clay.subdomains(), [&](std::size_t i) {
      auto blk = clay.block(out, i);
      blk = st.a_hat[i].apply(clay.block(y, i)) - blk;
    });
    return out;
  };
  LinearMap precond = [&](const Vector& r) {
    Vector out(r.size());
    exec_->parallel_for(clay.subdomains(), [&](std::size_t i) { clay.block(out, i) = st.a_hat[i].solve(clay.block(r, i)); });
    return out;
  };
  const GmresResult y = gmres(apply, -b_hat, opts_.linear_rtol, opts_.linear_maxit, precond);
  if (!y.converged) {
    std::ostringstream msg;
    msg << "coarse linear solve did not converge (relative residual " << y.relres << ")";
    throw CoarseDivergenceError(msg.str());
  }
  return space_->prolong(y.x, exec_);
}

Vector FasCorrector::correct(const Vector& u) {
  last_.reset();
  skipped_state_.clear();
  try {
    auto corr = fas_correction(u);
    coarse_newton_iterations_ += corr.state.coarse_iterations;
    last_ = std::move(corr.state);
    return std::move(corr.c);
  } catch (const CoarseDivergenceError&) {
    if (!opts_.skip_failed) throw;
  }
  ++skipped_;
  skipped_state_.set(u);
  return Vector::Zero(u.size());
}

Vector FasCorrector::jacobian_apply(const Vector& u, const Vector& v) {
  if (skipped_state_.matches(u)) return Vector::Zero(v.size());
  if (!last_) throw StateMismatchError("FasCorrector::jacobian_apply: no correction computed");
  return fas_jacobian_apply(*last_, u, v);
}

TwoLevelSystem::TwoLevelSystem(OuterSystem& base, CoarseCorrector& corrector) : base_(&base), corrector_(&corrector) {}

Vector TwoLevelSystem::residual(const Vector& u) {
  state_.clear();
  const Vector c = corrector_->correct(u);
  shifted_ = u + c;
  Vector out = c + base_->residual(shifted_);
  state_.set(u);
  return out;
}

Vector TwoLevelSystem::jacobian_apply(const Vector& u, const Vector& v) {
  state_.require(u, "TwoLevelSystem::jacobian_apply");
  const Vector cv = corrector_->jacobian_apply(u, v);
  return cv + base_->jacobian_apply(shifted_, v + cv);
}

Vector TwoLevelSystem::precondition(const Vector& u, const Vector& r) {
  state_.require(u, "TwoLevelSystem::precondition");
  return base_->precondition(shifted_, r);
}

}  // namespace schwarz
