#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "schwarz/chebyshev.hpp"

namespace schwarz {

struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double height() const { return y1 - y0; }
  [[nodiscard]] double area() const { return width() * height(); }
  /// Closed containment with an absolute slack.
  [[nodiscard]] bool contains(Point2 p, double slack = 0.0) const {
    return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack;
  }
  [[nodiscard]] bool strictly_contains(Point2 p, double slack = 0.0) const {
    return p.x > x0 + slack && p.x < x1 - slack && p.y > y0 + slack && p.y < y1 - slack;
  }
  [[nodiscard]] bool on_boundary(Point2 p, double tol) const;
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One overlapping patch Omega_i, its zone Z_i, and its classified nodes.
struct Subdomain {
  std::size_t id = 0;
  Rect box;
  Rect zone;
  TensorGrid grid;
  std::vector<std::size_t> interior_nodes;      // X_i
  std::vector<std::size_t> boundary_nodes;      // B_i
  std::vector<std::size_t> physical_boundary;   // G_i0
  std::map<std::size_t, std::vector<std::size_t>> interface_groups;  // j -> G_ij

  enum class NodeKind { interior, physical, interface };
  /// Per-node classification, indexed by grid node.
  std::vector<NodeKind> node_kind;
};

class Decomposition {
 public:
  Decomposition(Rect domain, std::vector<Subdomain> subdomains);

  [[nodiscard]] const Rect& domain() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return subdomains_.size(); }
  [[nodiscard]] const Subdomain& operator[](std::size_t i) const { return subdomains_[i]; }
  [[nodiscard]] const std::vector<Subdomain>& subdomains() const { return subdomains_; }
  /// Subdomains j with G_ij nonempty, ascending.
  [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }

 private:
  Rect domain_;
  std::vector<Subdomain> subdomains_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

/// Node-set classification of one subdomain against all zones. Physical
/// boundary wins over interfaces; ties between zones go to the lowest index.
void classify_nodes(Subdomain& sub, const Rect& domain, const std::vector<Rect>& zones);

/// Uniform mx x my array of zones; each box grows its zone on interior sides
/// by overlap times the zone extent in that direction.
[[nodiscard]] Decomposition build_uniform(const Rect& domain, std::size_t mx, std::size_t my, double overlap,
                                          std::size_t nx, std::size_t ny);

/// Same geometry with a different node count per subdomain.
[[nodiscard]] Decomposition with_resolution(const Decomposition& dec, std::size_t nx, std::size_t ny);

}  // namespace schwarz
