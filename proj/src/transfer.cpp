#include "schwarz/transfer.hpp"

#include <sstream>
#include <stdexcept>

#include "schwarz/executor.hpp"

namespace schwarz {

FieldLayout::FieldLayout(const Decomposition& dec, std::size_t ncomp) : ncomp_(ncomp), offsets_{0} {
  if (ncomp == 0) throw std::invalid_argument("FieldLayout: need at least one component");
  for (const auto& s : dec.subdomains()) {
    nodes_.push_back(s.grid.size());
    offsets_.push_back(offsets_.back() + s.grid.size() * ncomp);
  }
}

std::vector<Vector> FieldLayout::split(const Vector& v) const {
  check(v);
  std::vector<Vector> out;
  out.reserve(subdomains());
  for (std::size_t i = 0; i < subdomains(); ++i) out.emplace_back(block(v, i));
  return out;
}

Vector FieldLayout::merge(const std::vector<Vector>& blocks) const {
  if (blocks.size() != subdomains()) throw std::invalid_argument("FieldLayout::merge: wrong block count");
  Vector v(static_cast<Eigen::Index>(total()));
  for (std::size_t i = 0; i < subdomains(); ++i) {
    if (static_cast<std::size_t>(blocks[i].size()) != block_size(i))
      throw std::invalid_argument("FieldLayout::merge: wrong block length");
    block(v, i) = blocks[i];
  }
  return v;
}

void FieldLayout::check(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != total()) {
    std::ostringstream msg;
    msg << "field vector of length " << v.size() << " does not match layout of length " << total();
    throw std::invalid_argument(msg.str());
  }
}

TransferOperator::TransferOperator(const Decomposition& dec, std::size_t ncomp)
    : layout_(dec, ncomp), blocks_(dec.size()) {
  const double slack = 1e-12 * std::max(dec.domain().width(), dec.domain().height());
  for (const auto& sub : dec.subdomains()) {
    for (const auto& [j, nodes] : sub.interface_groups) {
      if (nodes.empty()) continue;
      const auto& src = dec[j];
      std::vector<Point2> pts;
      pts.reserve(nodes.size());
      for (const std::size_t k : nodes) {
        const Point2 p = sub.grid.point(k);
        if (!src.box.contains(p, slack)) {
          std::ostringstream msg;
          msg << "interface node (" << p.x << ", " << p.y << ") of subdomain " << sub.id
              << " lies outside source subdomain " << j;
          throw ConstructionError(msg.str());
        }
        pts.push_back(p);
      }
      blocks_[sub.id].push_back(TransferBlock{sub.id, j, nodes, tensor_interp_matrix(src.grid, pts)});
    }
  }
}

bool TransferOperator::empty() const {
  for (const auto& b : blocks_)
    if (!b.empty()) return false;
  return true;
}

void TransferOperator::apply_block(const Vector& u, std::size_t target, Eigen::Ref<Vector> out) const {
  out.setZero();
  const std::size_t nt = layout_.nodes(target);
  for (const auto& tb : blocks_[target]) {
    const std::size_t ns = layout_.nodes(tb.source);
    const auto src = layout_.block(u, tb.source);
    for (std::size_t c = 0; c < layout_.ncomp(); ++c) {
      const Vector vals = tb.interp * src.segment(static_cast<Eigen::Index>(c * ns), static_cast<Eigen::Index>(ns));
      for (std::size_t r = 0; r < tb.nodes.size(); ++r)
        out[static_cast<Eigen::Index>(c * nt + tb.nodes[r])] = vals[static_cast<Eigen::Index>(r)];
    }
  }
}

Vector TransferOperator::apply(const Vector& u, Executor* exec) const {
  layout_.check(u);
  Vector out(static_cast<Eigen::Index>(layout_.total()));
  auto body = [&](std::size_t i) { apply_block(u, i, layout_.block(out, i)); };
  if (exec != nullptr) {
    exec->parallel_for(layout_.subdomains(), body);
  } else {
    for (std::size_t i = 0; i < layout_.subdomains(); ++i) body(i);
  }
  return out;
}

Matrix TransferOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(layout_.total());
  Matrix t = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < layout_.subdomains(); ++i) {
    for (const auto& tb : blocks_[i]) {
      for (std::size_t c = 0; c < layout_.ncomp(); ++c) {
        for (Eigen::Index r = 0; r < tb.interp.outerSize(); ++r) {
          const auto row = static_cast<Eigen::Index>(layout_.index(i, c, tb.nodes[static_cast<std::size_t>(r)]));
          for (SparseMatrix::InnerIterator it(tb.interp, r); it; ++it)
            t(row, static_cast<Eigen::Index>(layout_.index(tb.source, c, static_cast<std::size_t>(it.col())))) +=
                it.value();
        }
      }
    }
  }
  return t;
}

}  // namespace schwarz
