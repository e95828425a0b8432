#include <doctest.h>

#include <algorithm>
#include <set>

#include "latinv/defect_probe.hpp"

using namespace latinv;
using namespace latinv::defect;

namespace {
std::vector<Eis> sorted(std::vector<Eis> v) {
  std::sort(v.begin(), v.end());
  return v;
}
}  // namespace

TEST_CASE("defect regions") {
  const HexParallelogram par = build_parallelogram(6);

  SUBCASE("an empty defect leaves the parallelogram unchanged") {
    const DefectRegion dr = build_defect_region(par, Defect{});
    CHECK(dr.region.interior.size() == par.region.interior.size());
    CHECK(dr.region.boundary.size() == par.region.boundary.size());
    CHECK(dr.removed_vertices == 0);
    CHECK(dr.removed_edges == 0);
    CHECK(dr.hole_boundary.empty());
  }

  SUBCASE("the flower loses one hexagon of vertices and its spokes") {
    const auto cells = honeycomb_defect(hex::cell_center(3, 3), 1);
    CHECK(cells.size() == 7);
    CHECK(interior_vertices(cells).size() == 6);
    CHECK(interior_edges(cells).size() == 12);
    const DefectRegion dr = build_defect_region(par, Defect{{cells}});
    CHECK(dr.removed_vertices == 6);
    CHECK(dr.hole_boundary.size() == 18);
    int deg2 = 0;
    for (int v : dr.hole_boundary) {
      CHECK(dr.region.is_interior(v));
      if (dr.graph->adj[v].size() == 2) ++deg2;
    }
    CHECK(deg2 == 6);
    CHECK(dr.region.interior.size() == par.region.interior.size() - 6);
  }

  SUBCASE("placements next to the boundary are refused") {
    CHECK_THROWS_AS(build_defect_region(par, Defect{{honeycomb_defect(hex::cell_center(0, 0), 1)}}),
                    DefectPlacementError);
  }

  SUBCASE("components sharing a vertex are refused") {
    const Defect d{{{hex::cell_center(2, 2)}, {hex::cell_center(3, 2)}}};
    CHECK_THROWS_AS(check_separated(d), DefectPlacementError);
  }
}

TEST_CASE("probing data vanishes on the zero half-plane") {
  const HexParallelogram par = build_parallelogram(4);
  const DNMap<quad> free_dn = free_dn_map(par, 0.3);
  for (Family fam : {Family::A, Family::B})
    for (int k = 0; k <= 4; ++k) {
      const ProbeLine line = fam == Family::A ? line_A(par, k) : line_B(par, k);
      const auto f = probing_data(par, free_dn, line);
      if (!f) continue;
      const ProbeGeometry pg = probe_geometry(par, line);
      double peak = 0.0;
      for (std::size_t b = 0; b < par.region.boundary.size(); ++b) {
        const Eis e = par.eis(par.region.boundary[b]);
        const double x = to_double(scalar_abs((*f)(b)));
        if (pg.in_zero(e)) CHECK(x < 1e-20);
        peak = std::max(peak, x);
      }
      CHECK(peak >= 1.0);
    }
}

TEST_CASE("admissible energies") {
  const HexParallelogram par = build_parallelogram(5);
  const DefectRegion dr = build_defect_region(par, Defect{{honeycomb_defect(hex::cell_center(2, 2), 1)}});
  CHECK_FALSE(check_energy(par, dr, 0.0).ok);
  CHECK(check_energy(par, dr, 0.3).ok);
}

TEST_CASE("line sweeps") {
  const HexParallelogram par = build_parallelogram(5);
  const DNMap<quad> free_dn = free_dn_map(par, 0.3);

  SUBCASE("no defect, no difference") {
    for (Family fam : {Family::A, Family::B})
      for (int frame : {0, 1}) {
        const ProbeReport rep = detect_line(par, free_dn, free_dn, fam, frame);
        CHECK_FALSE(rep.found);
        CHECK(rep.max_equal < 1e-25);
      }
  }

  SUBCASE("a flower is seen by the sweeps that reach it") {
    const auto cells = honeycomb_defect(hex::cell_center(2, 2), 1);
    const DefectRegion dr = build_defect_region(par, Defect{{cells}});
    const DNMap<quad> def_dn = defect_dn_map(par, dr, 0.3);
    int found = 0;
    for (Family fam : {Family::A, Family::B})
      for (int frame : {0, 1}) {
        const ProbeReport rep = detect_line(par, def_dn, free_dn, fam, frame);
        if (!rep.found) continue;
        ++found;
        CHECK(rep.margin > 1e-3);
        CHECK(rep.max_equal < 1e-20);
      }
    CHECK(found > 0);
  }
}

TEST_CASE("hull geometry") {
  const auto block = parallelogram_defect(hex::cell_center(1, 1), 2, 3);
  CHECK(block.size() == 6);
  const HexHull h = geometric_hull(block);
  for (int d = 0; d < 6; ++d) CHECK(h.h[d] == oracle_level(block, d));
  // A cell parallelogram is already hexagonally convex.
  CHECK(sorted(h.cells(12)) == sorted(block));
  for (const Eis& v : vertices_of_cells(block)) CHECK(h.contains_vertex(v));

  const auto flower = honeycomb_defect(hex::cell_center(0, 0), 1);
  CHECK(sorted(geometric_hull(flower).cells(12)) == sorted(flower));

  // Two separated cells fill in to their hull.
  const std::vector<Eis> pair{hex::cell_center(0, 0), hex::cell_center(3, 0)};
  const auto filled = geometric_hull(pair).cells(12);
  CHECK(filled.size() > 2);
  for (const Eis& c : pair) CHECK(std::count(filled.begin(), filled.end(), c) == 1);

  // Half-spaces and cells describe the same polygon.
  CHECK(sorted(polygon_cells(h.half_spaces(), 12)) == sorted(h.cells(12)));
}

TEST_CASE("views") {
  const Defect d{{honeycomb_defect(hex::cell_center(2, 2), 1)}};
  for (int r = 0; r < 6; ++r) {
    const View v{r, {0, 0}};
    const Defect t = transform(d, v);
    CHECK(t.cells().size() == d.cells().size());
  }
  const View six{0, {0, 0}};
  CHECK(sorted(transform(d, six).cells()) == sorted(d.cells()));
}

TEST_CASE("probing recovers the hull") {
  const HexParallelogram par = build_parallelogram(6);
  SUBCASE("flower") {
    const Defect d{{honeycomb_defect(hex::cell_center(3, 3), 1)}};
    const ProbeRun run = probe_defect(par, d);
    REQUIRE(run.hull.complete);
    CHECK(run.hull.hull == geometric_hull(d.cells()));
    for (const DirectionResult& r : run.hull.directions) {
      CHECK(r.level == oracle_level(d.cells(), r.direction));
      CHECK(r.report.margin > 1e-3);
    }
  }
  SUBCASE("two components") {
    const Defect d{{parallelogram_defect(hex::cell_center(1, 4), 1, 2), honeycomb_defect(hex::cell_center(4, 2), 1)}};
    check_separated(d);
    const ProbeRun run = probe_defect(par, d);
    REQUIRE(run.hull.complete);
    CHECK(run.hull.hull == geometric_hull(d.cells()));
  }
  SUBCASE("a single cell removes nothing and stays invisible") {
    const Defect d{{{hex::cell_center(3, 3)}}};
    CHECK(interior_vertices(d.cells()).empty());
    CHECK_FALSE(probe_defect(par, d).hull.complete);
  }
}

TEST_CASE("outer walls are critical") {
  for (int n : {1, 2}) {
    const auto net = outer_wall(honeycomb_defect(hex::cell_center(0, 0), n));
    net.validate();
    const auto res = network::is_critical(net, static_cast<int>(net.boundary.size()));
    CHECK(res.verdict == network::Tri::True);
    CHECK(res.certificates.size() == net.edges.size());
  }
  const auto net = outer_wall(parallelogram_defect(hex::cell_center(0, 0), 2, 2));
  CHECK(network::is_critical(net, static_cast<int>(net.boundary.size())).verdict == network::Tri::True);
}
