#pragma once

#include <cstddef>
#include <vector>

#include "schwarz/chebyshev.hpp"
#include "schwarz/decomposition.hpp"

namespace schwarz {

class Executor;

/// Offsets of the concatenated per-subdomain unknowns. Within a subdomain the
/// values are component-major: [comp 0 nodes, comp 1 nodes, ...].
class FieldLayout {
 public:
  FieldLayout(const Decomposition& dec, std::size_t ncomp);

  [[nodiscard]] std::size_t ncomp() const { return ncomp_; }
  [[nodiscard]] std::size_t subdomains() const { return nodes_.size(); }
  [[nodiscard]] std::size_t nodes(std::size_t i) const { return nodes_[i]; }
  [[nodiscard]] std::size_t block_size(std::size_t i) const { return nodes_[i] * ncomp_; }
  [[nodiscard]] std::size_t offset(std::size_t i) const { return offsets_[i]; }
  [[nodiscard]] std::size_t total() const { return offsets_.back(); }
  /// Position of (subdomain, component, node) in the flat vector.
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t c, std::size_t k) const {
    return offsets_[i] + c * nodes_[i] + k;
  }

  [[nodiscard]] auto block(Vector& v, std::size_t i) const {
    return v.segment(static_cast<Eigen::Index>(offsets_[i]), static_cast<Eigen::Index>(block_size(i)));
  }
  [[nodiscard]] auto block(const Vector& v, std::size_t i) const {
    return v.segment(static_cast<Eigen::Index>(offsets_[i]), static_cast<Eigen::Index>(block_size(i)));
  }

  [[nodiscard]] std::vector<Vector> split(const Vector& v) const;
  [[nodiscard]] Vector merge(const std::vector<Vector>& blocks) const;

  /// Throws std::invalid_argument if v does not match this layout.
  void check(const Vector& v) const;

  friend bool operator==(const FieldLayout&, const FieldLayout&) = default;

 private:
  std::size_t ncomp_;
  std::vector<std::size_t> nodes_;
  std::vector<std::size_t> offsets_;
};

/// Interpolation of subdomain j's field onto the interface nodes G_ij.
struct TransferBlock {
  std::size_t target = 0;
  std::size_t source = 0;
  std::vector<std::size_t> nodes;  // grid nodes of the target
  SparseMatrix interp;             // |nodes| x n_source
};

/// The linear transfer operator T: zero on interior and physical-boundary
/// rows, foreign interpolant values on interface rows.
class TransferOperator {
 public:
  TransferOperator(const Decomposition& dec, std::size_t ncomp);

  [[nodiscard]] const FieldLayout& layout() const { return layout_; }
  [[nodiscard]] const std::vector<TransferBlock>& blocks(std::size_t target) const { return blocks_[target]; }
  [[nodiscard]] bool empty() const;

  /// T u; parallel over target subdomains when an executor is given.
  [[nodiscard]] Vector apply(const Vector& u, Executor* exec = nullptr) const;
  /// Writes T_i u into out (length block_size(i)).
  void apply_block(const Vector& u, std::size_t target, Eigen::Ref<Vector> out) const;

  /// Dense assembly, for small cases.
  [[nodiscard]] Matrix dense() const;

 private:
  FieldLayout layout_;
  std::vector<std::vector<TransferBlock>> blocks_;
};

[[nodiscard]] inline TransferOperator build_transfer(const Decomposition& dec, std::size_t ncomp) {
  return TransferOperator(dec, ncomp);
}

}  // namespace schwarz
