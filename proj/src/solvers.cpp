#include "schwarz/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace schwarz {

Discretization::Discretization(Decomposition dec, ProblemPtr problem)
    : dec_(std::move(dec)), problem_(std::move(problem)), transfer_(dec_, problem_->ncomp()) {
  locals_.reserve(dec_.size());
  for (const auto& sub : dec_.subdomains()) locals_.emplace_back(sub, problem_);
}

Vector Discretization::eval(const Vector& u, Executor* exec) const {
  layout().check(u);
  Vector out(u.size());
  auto body = [&](std::size_t i) { layout().block(out, i) = locals_[i].eval(layout().block(u, i)); };
  if (exec != nullptr) {
    exec->parallel_for(subdomains(), body);
  } else {
    for (std::size_t i = 0; i < subdomains(); ++i) body(i);
  }
  return out;
}

Vector Discretization::initial_guess() const {
  const auto& lay = layout();
  Vector u(static_cast<Eigen::Index>(lay.total()));
  std::vector<double> buf(lay.ncomp());
  for (const auto& sub : dec_.subdomains()) {
    for (std::size_t k = 0; k < sub.grid.size(); ++k) {
      problem_->initial_guess(sub.grid.point(k), buf);
      for (std::size_t c = 0; c < lay.ncomp(); ++c) u[static_cast<Eigen::Index>(lay.index(sub.id, c, k))] = buf[c];
    }
  }
  return u;
}

double Discretization::interface_mismatch(const Vector& u) const {
  const Vector tu = transfer_.apply(u);
  const auto& lay = layout();
  double worst = 0.0;
  for (const auto& sub : dec_.subdomains())
    for (const auto& [j, nodes] : sub.interface_groups)
      for (const std::size_t k : nodes)
        for (std::size_t c = 0; c < lay.ncomp(); ++c) {
          const auto idx = static_cast<Eigen::Index>(lay.index(sub.id, c, k));
          worst = std::max(worst, std::abs(u[idx] - tu[idx]));
        }
  return worst;
}

DiscretizationPtr make_discretization(Decomposition dec, ProblemPtr problem) {
  return std::make_shared<const Discretization>(std::move(dec), std::move(problem));
}

NksSystem::NksSystem(DiscretizationPtr disc, Executor& exec, Vector shift, Vector rhs)
    : disc_(std::move(disc)), exec_(&exec), shift_(std::move(shift)), rhs_(std::move(rhs)) {
  const auto n = static_cast<Eigen::Index>(disc_->size());
  if (shift_.size() == 0) shift_ = Vector::Zero(n);
  if (rhs_.size() == 0) rhs_ = Vector::Zero(n);
  disc_->layout().check(shift_);
  disc_->layout().check(rhs_);
}

Vector NksSystem::residual(const Vector& u) {
  const auto& lay = disc_->layout();
  lay.check(u);
  state_.clear();
  blocks_ready_ = false;
  const Vector shifted = u + shift_;
  Vector out(u.size());
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) {
    auto blk = lay.block(out, i);
    disc_->transfer().apply_block(u, i, blk);
    blk = disc_->local(i).eval(lay.block(shifted, i)) - blk + lay.block(rhs_, i);
  });
  state_.set(u);
  return out;
}

void NksSystem::ensure_blocks(const Vector& u, const char* who) {
  state_.require(u, who);
  if (blocks_ready_) return;
  const auto& lay = disc_->layout();
  blocks_.assign(lay.subdomains(), FactoredJacobian{});
  const Vector shifted = u + shift_;
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) {
    blocks_[i] = FactoredJacobian(disc_->local(i).jacobian(lay.block(shifted, i)), i);
  });
  blocks_ready_ = true;
}

const std::vector<FactoredJacobian>& NksSystem::blocks(const Vector& u) {
  ensure_blocks(u, "NksSystem::blocks");
  return blocks_;
}

Vector NksSystem::jacobian_apply(const Vector& u, const Vector& v) {
  ensure_blocks(u, "NksSystem::jacobian_apply");
  const auto& lay = disc_->layout();
  lay.check(v);
  Vector out(v.size());
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) {
    auto blk = lay.block(out, i);
    disc_->transfer().apply_block(v, i, blk);
    blk = blocks_[i].apply(lay.block(v, i)) - blk;
  });
  return out;
}

Vector NksSystem::precondition(const Vector& u, const Vector& r) {
  ensure_blocks(u, "NksSystem::precondition");
  const auto& lay = disc_->layout();
  lay.check(r);
  Vector out(r.size());
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) { lay.block(out, i) = blocks_[i].solve(lay.block(r, i)); });
  return out;
}

SnkSystem::SnkSystem(DiscretizationPtr disc, Executor& exec, LocalSolveOptions local)
    : disc_(std::move(disc)), exec_(&exec), local_(local) {}

Vector SnkSystem::residual(const Vector& u) {
  const auto& lay = disc_->layout();
  lay.check(u);
  state_.clear();
  const Vector tu = disc_->transfer().apply(u, exec_);
  std::vector<FactoredJacobian> factors(lay.subdomains());
  std::vector<std::size_t> iters(lay.subdomains(), 0);
  Vector out(u.size());
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) {
    auto solved = solve_local(disc_->local(i), lay.block(u, i), lay.block(tu, i), local_);
    lay.block(out, i) = solved.z;
    factors[i] = std::move(solved.jacobian);
    iters[i] = solved.iterations;
  });
  for (const std::size_t it : iters) local_iterations_ += it;
  factors_ = std::move(factors);
  state_.set(u);
  return out;
}

Vector SnkSystem::jacobian_apply(const Vector& u, const Vector& v) {
  state_.require(u, "SnkSystem::jacobian_apply");
  const auto& lay = disc_->layout();
  lay.check(v);
  const Vector tv = disc_->transfer().apply(v, exec_);
  Vector out(v.size());
  exec_->parallel_for(lay.subdomains(), [&](std::size_t i) {
    lay.block(out, i) = lay.block(v, i) - factors_[i].solve(lay.block(tv, i));
  });
  return out;
}

}  // namespace schwarz
