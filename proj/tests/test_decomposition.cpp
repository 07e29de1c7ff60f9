#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "schwarz/decomposition.hpp"

using namespace schwarz;

namespace {

const Rect unit{0, 1, 0, 1};

void check_partition(const Subdomain& s) {
  std::set<std::size_t> all(s.interior_nodes.begin(), s.interior_nodes.end());
  for (const auto k : s.boundary_nodes) CHECK(all.insert(k).second);
  CHECK(all.size() == s.grid.size());

  std::size_t counted = s.physical_boundary.size();
  for (const auto& [j, nodes] : s.interface_groups) counted += nodes.size();
  CHECK(counted == s.boundary_nodes.size());
}

}  // namespace

TEST_CASE("single subdomain: everything on the physical boundary") {
  const auto dec = build_uniform(unit, 1, 1, 0.2, 9, 9);
  REQUIRE(dec.size() == 1);
  const auto& s = dec[0];
  CHECK(s.interface_groups.empty());
  CHECK(s.physical_boundary.size() == 32);
  CHECK(s.interior_nodes.size() == 49);
  CHECK(dec.neighbors(0).empty());
  check_partition(s);
}

TEST_CASE("two subdomains: hand-checked geometry") {
  const auto dec = build_uniform(unit, 2, 1, 0.25, 9, 9);
  REQUIRE(dec.size() == 2);
  const auto& s0 = dec[0];
  CHECK(s0.box.x0 == 0.0);
  CHECK(s0.box.x1 == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(s0.box.y0 == 0.0);
  CHECK(s0.box.y1 == 1.0);
  CHECK(s0.zone.x1 == doctest::Approx(0.5));
  CHECK(dec[1].box.x0 == doctest::Approx(0.375));

  REQUIRE(s0.interface_groups.count(1) == 1);
  const auto& g01 = s0.interface_groups.at(1);
  // the edge x = 0.625 has 9 nodes; its two corners lie on the domain boundary
  CHECK(g01.size() == 7);
  for (const auto k : g01) CHECK(s0.grid.point(k).x == doctest::Approx(0.625));
  for (const auto k : s0.physical_boundary) {
    const auto p = s0.grid.point(k);
    CHECK((p.x == 0.0 || p.y == 0.0 || p.y == 1.0));
  }
  CHECK(dec.neighbors(0) == std::vector<std::size_t>{1});
  CHECK(dec.neighbors(1) == std::vector<std::size_t>{0});
  check_partition(s0);
  check_partition(dec[1]);
}

TEST_CASE("4x4 layout: interior subdomains see edge and diagonal neighbors") {
  const auto dec = build_uniform(unit, 4, 4, 0.25, 9, 9);
  REQUIRE(dec.size() == 16);
  // subdomain 5 sits at (1, 1); its corner nodes fall in diagonal zones
  const auto& nb = dec.neighbors(5);
  for (std::size_t j : {1u, 4u, 6u, 9u}) CHECK(std::find(nb.begin(), nb.end(), j) != nb.end());
  for (std::size_t j : {0u, 2u, 8u, 10u}) CHECK(std::find(nb.begin(), nb.end(), j) != nb.end());
  for (const auto& s : dec.subdomains()) check_partition(s);
}

TEST_CASE("property: zones tile the domain and boxes contain zones") {
  for (auto [mx, my] : {std::pair{1, 1}, {2, 1}, {3, 2}, {4, 4}, {5, 3}}) {
    const Rect dom{-1, 1, -1, 1};
    const auto dec = build_uniform(dom, std::size_t(mx), std::size_t(my), 0.3, 7, 9);
    double area = 0.0;
    for (const auto& s : dec.subdomains()) {
      area += s.zone.area();
      CHECK(s.box.x0 <= s.zone.x0);
      CHECK(s.box.x1 >= s.zone.x1);
      CHECK(s.box.y0 <= s.zone.y0);
      CHECK(s.box.y1 >= s.zone.y1);
      CHECK(dom.contains({s.box.x0, s.box.y0}));
      CHECK(dom.contains({s.box.x1, s.box.y1}));
      check_partition(s);
      // every interface node lies inside its source box and zone
      for (const auto& [j, nodes] : s.interface_groups)
        for (const auto k : nodes) {
          CHECK(dec[j].zone.contains(s.grid.point(k), 1e-12));
          CHECK(dec[j].box.strictly_contains(s.grid.point(k)));
        }
    }
    CHECK(area == doctest::Approx(dom.area()).epsilon(1e-12));
  }
}

TEST_CASE("tie-breaks: physical boundary first, then lowest zone index") {
  const auto dec = build_uniform(unit, 2, 2, 0.25, 9, 9);
  // subdomain 3 = upper right; its lower-left corner (0.375, 0.375) lies in zone 0 only
  const auto& s3 = dec[3];
  const auto corner = s3.grid.index(0, 0);
  CHECK(s3.node_kind[corner] == Subdomain::NodeKind::interface);
  CHECK(s3.interface_groups.at(0).front() == corner);

  // a node exactly on the edge shared by zones 1 and 2 goes to zone 1
  Subdomain s{.id = 0,
              .box = {0.0, 0.75, 0.0, 0.75},
              .zone = {0, 0.5, 0, 0.5},
              .grid = TensorGrid(Grid1D(3, 0.0, 0.75), Grid1D(3, 0.0, 0.75)),
              .interior_nodes = {},
              .boundary_nodes = {},
              .physical_boundary = {},
              .interface_groups = {},
              .node_kind = {}};
  std::vector<Rect> zones{{0, 0.5, 0, 0.5}, {0.5, 1, 0, 0.5}, {0, 0.5, 0.5, 1}, {0.5, 1, 0.5, 1}};
  classify_nodes(s, {0, 1, 0, 1}, zones);
  // node (0.75, 0.375): inside zone 1 only
  CHECK(s.node_kind[s.grid.index(2, 1)] == Subdomain::NodeKind::interface);
  // node (0.75, 0.75) is inside zone 3; node (0.375, 0.75) inside zone 2
  CHECK(std::ranges::count(s.interface_groups.at(3), s.grid.index(2, 2)) == 1);
  CHECK(std::ranges::count(s.interface_groups.at(2), s.grid.index(1, 2)) == 1);

  Subdomain edge = s;
  edge.grid = TensorGrid(Grid1D(3, 0.0, 0.5), Grid1D(3, 0.0, 0.75));
  edge.box = {0.0, 0.5, 0.0, 0.75};
  classify_nodes(edge, {0, 1, 0, 1}, zones);
  // node (0.5, 0.75) lies on the shared edge of zones 2 and 3; the lower index wins
  CHECK(std::ranges::count(edge.interface_groups.at(2), edge.grid.index(2, 2)) == 1);
  CHECK(edge.interface_groups.count(3) == 0);
  // node (0.5, 0.375) touches its own zone and zone 1; own zone never counts
  CHECK(std::ranges::count(edge.interface_groups.at(1), edge.grid.index(2, 1)) == 1);
}

TEST_CASE("classification is deterministic across rebuilds") {
  const auto a = build_uniform(unit, 3, 3, 0.25, 9, 9);
  const auto b = build_uniform(unit, 3, 3, 0.25, 9, 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].interface_groups == b[i].interface_groups);
    CHECK(a[i].physical_boundary == b[i].physical_boundary);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS((void)build_uniform(unit, 0, 1, 0.25, 9, 9), std::invalid_argument);
  CHECK_THROWS_AS((void)build_uniform(unit, 2, 1, 0.0, 9, 9), std::invalid_argument);
  CHECK_THROWS_AS((void)build_uniform(unit, 2, 1, 1.0, 9, 9), std::invalid_argument);
  CHECK_THROWS_AS((void)build_uniform(unit, 2, 1, 0.25, 2, 9), std::invalid_argument);

  Subdomain s{.id = 0,
              .box = {0.0, 0.6, 0.0, 1.0},
              .zone = {0, 0.5, 0, 1},
              .grid = TensorGrid(Grid1D(5, 0.0, 0.6), Grid1D(5, 0.0, 1.0)),
              .interior_nodes = {},
              .boundary_nodes = {},
              .physical_boundary = {},
              .interface_groups = {},
              .node_kind = {}};
  CHECK_THROWS_AS(classify_nodes(s, unit, {{0, 0.5, 0, 1}}), ConstructionError);
}

TEST_CASE("with_resolution keeps geometry and classification structure") {
  const auto fine = build_uniform(unit, 2, 2, 0.25, 17, 17);
  const auto coarse = with_resolution(fine, 9, 9);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    CHECK(coarse[i].grid.nx() == 9);
    CHECK(coarse[i].grid.same_rect(fine[i].grid));
    CHECK(coarse.neighbors(i) == fine.neighbors(i));
  }
}
