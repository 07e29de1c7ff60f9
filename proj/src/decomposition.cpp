#include "schwarz/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schwarz {

namespace {

double geometric_tol(const Rect& r) { return 1e-12 * std::max(r.width(), r.height()); }

Subdomain make_subdomain(std::size_t id, const Rect& box, const Rect& zone, std::size_t nx, std::size_t ny) {
  return Subdomain{.id = id,
                   .box = box,
                   .zone = zone,
                   .grid = TensorGrid(Grid1D(nx, box.x0, box.x1), Grid1D(ny, box.y0, box.y1)),
                   .interior_nodes = {},
                   .boundary_nodes = {},
                   .physical_boundary = {},
                   .interface_groups = {},
                   .node_kind = {}};
}

}  // namespace

bool Rect::on_boundary(Point2 p, double tol) const {
  if (!contains(p, tol)) return false;
  return std::abs(p.x - x0) <= tol || std::abs(p.x - x1) <= tol || std::abs(p.y - y0) <= tol ||
         std::abs(p.y - y1) <= tol;
}

void classify_nodes(Subdomain& sub, const Rect& domain, const std::vector<Rect>& zones) {
  const double tol = geometric_tol(domain);
  const auto& g = sub.grid;
  sub.interior_nodes.clear();
  sub.boundary_nodes.clear();
  sub.physical_boundary.clear();
  sub.interface_groups.clear();
  sub.node_kind.assign(g.size(), Subdomain::NodeKind::interior);

  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto [i, j] = g.coords(k);
    const bool on_edge = i == 0 || j == 0 || i + 1 == g.nx() || j + 1 == g.ny();
    if (!on_edge) {
      sub.interior_nodes.push_back(k);
      continue;
    }
    sub.boundary_nodes.push_back(k);
    const Point2 p = g.point(k);
    if (domain.on_boundary(p, tol)) {
      sub.physical_boundary.push_back(k);
      sub.node_kind[k] = Subdomain::NodeKind::physical;
      continue;
    }
    std::size_t owner = zones.size();
    for (std::size_t z = 0; z < zones.size(); ++z) {
      if (z == sub.id) continue;
      if (zones[z].contains(p, tol)) {
        owner = z;
        break;
      }
    }
    if (owner == zones.size()) {
      std::ostringstream msg;
      msg << "subdomain " << sub.id << ": boundary node (" << p.x << ", " << p.y
          << ") lies in no foreign zone; overlap too small";
      throw ConstructionError(msg.str());
    }
    sub.interface_groups[owner].push_back(k);
    sub.node_kind[k] = Subdomain::NodeKind::interface;
  }
}

Decomposition::Decomposition(Rect domain, std::vector<Subdomain> subdomains)
    : domain_(domain), subdomains_(std::move(subdomains)), neighbors_(subdomains_.size()) {
  for (std::size_t i = 0; i < subdomains_.size(); ++i)
    for (const auto& [j, nodes] : subdomains_[i].interface_groups)
      if (!nodes.empty()) neighbors_[i].push_back(j);
}

Decomposition build_uniform(const Rect& domain, std::size_t mx, std::size_t my, double overlap, std::size_t nx,
                            std::size_t ny) {
  if (mx < 1 || my < 1) throw std::invalid_argument("build_uniform: need at least one zone per direction");
  if (!(overlap > 0.0 && overlap < 1.0)) throw std::invalid_argument("build_uniform: overlap must lie in (0, 1)");
  if (nx < 3 || ny < 3) throw std::invalid_argument("build_uniform: need at least 3 nodes per direction");
  if (!(domain.x0 < domain.x1 && domain.y0 < domain.y1)) throw std::invalid_argument("build_uniform: empty domain");

  const double zw = domain.width() / static_cast<double>(mx);
  const double zh = domain.height() / static_cast<double>(my);
  auto xcut = [&](std::size_t a) { return a == mx ? domain.x1 : domain.x0 + zw * static_cast<double>(a); };
  auto ycut = [&](std::size_t b) { return b == my ? domain.y1 : domain.y0 + zh * static_cast<double>(b); };

  std::vector<Rect> zones;
  std::vector<Rect> boxes;
  for (std::size_t b = 0; b < my; ++b) {
    for (std::size_t a = 0; a < mx; ++a) {
      const Rect zone{xcut(a), xcut(a + 1), ycut(b), ycut(b + 1)};
      Rect box = zone;
      if (a > 0) box.x0 -= overlap * zw;
      if (a + 1 < mx) box.x1 += overlap * zw;
      if (b > 0) box.y0 -= overlap * zh;
      if (b + 1 < my) box.y1 += overlap * zh;
      zones.push_back(zone);
      boxes.push_back(box);
    }
  }

  std::vector<Subdomain> subs;
  subs.reserve(zones.size());
  for (std::size_t id = 0; id < zones.size(); ++id) {
    subs.push_back(make_subdomain(id, boxes[id], zones[id], nx, ny));
    classify_nodes(subs.back(), domain, zones);
  }
  return Decomposition(domain, std::move(subs));
}

Decomposition with_resolution(const Decomposition& dec, std::size_t nx, std::size_t ny) {
  std::vector<Rect> zones;
  for (const auto& s : dec.subdomains()) zones.push_back(s.zone);
  std::vector<Subdomain> subs;
  for (const auto& s : dec.subdomains()) {
    subs.push_back(make_subdomain(s.id, s.box, s.zone, nx, ny));
    classify_nodes(subs.back(), dec.domain(), zones);
  }
  return Decomposition(dec.domain(), std::move(subs));
}

}  // namespace schwarz
