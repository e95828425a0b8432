#include <doctest.h>

#include <random>
#include <set>

#include "latinv/lattice_core.hpp"
#include "latinv/parallelogram.hpp"

using namespace latinv;

namespace {
std::complex<double> rc(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {n(rng), n(rng)};
}
}  // namespace

TEST_CASE("build_lattice window counts") {
  const LatticeGraph h = build_lattice(LatticeKind::Hexagonal, {0, 0, 0, 0});
  CHECK(h.size() == 2);
  CHECK(h.num_edges() == 1);
  CHECK(h.window_border[0]);
  CHECK(h.window_border[1]);

  const LatticeGraph s = build_lattice(LatticeKind::Square, {0, 2, 0, 2});
  CHECK(s.size() == 9);
  CHECK(s.num_edges() == 12);

  const LatticeGraph t = build_lattice(LatticeKind::Triangular, {0, 2, 0, 2});
  CHECK(t.num_edges() == 12 + 4);

  CHECK_THROWS_AS(build_lattice(LatticeKind::Custom, {0, 1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(LatticeKind::Square, {1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("hexagonal parallelogram window matches a brute-force enumeration") {
  for (int N = 1; N <= 3; ++N) {
    const std::vector<Eis> verts = vertices_of_cells(parallelogram_cells(N));
    std::set<Eis> vs(verts.begin(), verts.end());
    int edges = 0;
    for (const Eis& v : vs)
      for (const Eis& w : hex::neighbors(v)) edges += vs.count(w);
    edges /= 2;
    const LatticeGraph g = induced_subgraph(LatticeKind::Hexagonal, [&] {
      std::vector<VertexId> ids;
      for (const Eis& e : vs) ids.push_back(hex::from_eis(e));
      return ids;
    }());
    CHECK(g.size() == static_cast<int>(vs.size()));
    CHECK(g.num_edges() == edges);
    const HexParallelogram par = build_parallelogram(N);
    CHECK(par.region.interior.size() == vs.size());
  }
}

TEST_CASE("hexagonal vertices have degree three and adjacency is simple") {
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-3, 3, -3, 3});
  g.check_invariants();
  for (int i = 0; i < g.size(); ++i)
    if (!g.window_border[i]) CHECK(g.degree(i) == 3);
  for (int i = 0; i < g.size(); ++i) {
    const auto nb = lattice_neighbors(LatticeKind::Hexagonal, g.vertices[i]);
    for (const VertexId& w : nb) {
      const int k = g.index_of(w);
      if (k >= 0) CHECK(g.has_edge(i, k));
    }
  }
}

TEST_CASE("edge and vertex deletions") {
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-2, 2, -2, 2});
  const EditResult same = delete_edges(g, {});
  CHECK(same.graph.vertices == g.vertices);
  CHECK(same.graph.adj == g.adj);

  const VertexId a{1, 0, 0};
  const VertexId b = lattice_neighbors(LatticeKind::Hexagonal, a)[0];
  const EditResult one = delete_edges(g, {{a, b}});
  CHECK(one.graph.degree(one.graph.index_of(a)) == 2);
  one.graph.check_invariants();

  CHECK_THROWS_AS(delete_edges(g, {{a, VertexId{1, 1, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(delete_vertices(g, {VertexId{1, 50, 50}}), std::invalid_argument);

  const EditResult cut = delete_vertices(g, {a});
  CHECK(cut.graph.index_of(a) < 0);
  CHECK(cut.graph.size() == g.size() - 1);
  cut.graph.check_invariants();
}

TEST_CASE("degree bookkeeping survives random edits") {
  std::mt19937_64 rng(7);
  LatticeGraph g = build_lattice(LatticeKind::Square, {-6, 6, -6, 6});
  std::vector<int> deg(g.size());
  for (int i = 0; i < g.size(); ++i) deg[i] = g.degree(i);
  const std::vector<VertexId> original = g.vertices;
  for (int step = 0; step < 1000; ++step) {
    const int v = std::uniform_int_distribution<int>(0, g.size() - 1)(rng);
    if (g.adj[v].empty()) continue;
    const int w = g.adj[v][std::uniform_int_distribution<std::size_t>(0, g.adj[v].size() - 1)(rng)];
    const VertexId vv = g.vertices[v], ww = g.vertices[w];
    g = delete_edges(g, {{vv, ww}}).graph;
    --deg[std::lower_bound(original.begin(), original.end(), vv) - original.begin()];
    --deg[std::lower_bound(original.begin(), original.end(), ww) - original.begin()];
  }
  g.check_invariants();
  for (int i = 0; i < g.size(); ++i) {
    const int k = std::lower_bound(original.begin(), original.end(), g.vertices[i]) - original.begin();
    CHECK(g.degree(i) == deg[k]);
  }
}

TEST_CASE("close_region examples") {
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-3, 3, -3, 3});
  const Region one = close_region(g, std::vector<VertexId>{VertexId{1, 0, 0}});
  CHECK(one.boundary.size() == 3);
  for (int v : one.boundary) CHECK(one.deg_d[v] == 1);

  // The six vertices of one hexagon cell.
  std::vector<VertexId> ring;
  for (const Eis& e : hex::cell_corners(hex::cell_center(0, 0))) ring.push_back(hex::from_eis(e));
  const Region hr = close_region(g, ring);
  CHECK(hr.interior.size() == 6);
  CHECK(hr.boundary.size() == 6);

  const LatticeGraph s = build_lattice(LatticeKind::Square, {-3, 3, -3, 3});
  const Region sq = close_region(s, std::vector<VertexId>{{1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, 1, 1}});
  CHECK(sq.boundary.size() == 8);
  for (int v : sq.interior) CHECK(sq.deg_d[v] == 4);

  CHECK_THROWS_AS(close_region(g, std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(close_region(s, std::vector<VertexId>{{1, 0, 0}, {1, 2, 2}}), std::invalid_argument);
}

TEST_CASE("laplacian examples") {
  const LatticeGraph s = build_lattice(LatticeKind::Square, {-4, 4, -4, 4});
  GridFunction c(s.size()), alt(s.size());
  for (int i = 0; i < s.size(); ++i) {
    c.set(i, {2.5, -1.0});
    alt.set(i, ((s.vertices[i].n1 + s.vertices[i].n2) % 2 == 0) ? 1.0 : -1.0);
  }
  std::vector<int> inner;
  for (int i = 0; i < s.size(); ++i)
    if (!s.window_border[i]) inner.push_back(i);
  const GridFunction lc = laplacian(s, c, inner), la = laplacian(s, alt, inner);
  for (int v : inner) {
    CHECK(std::abs(lc.at(v) - std::complex<double>(2.5, -1.0)) < 1e-15);
    CHECK(std::abs(la.at(v) + alt.at(v)) < 1e-15);
  }

  std::mt19937_64 rng(3);
  const LatticeGraph w = build_lattice(LatticeKind::Square, {0, 3, 0, 3});
  GridFunction u(w.size());
  for (int i = 0; i < w.size(); ++i) u.set(i, rc(rng));
  std::vector<int> all(w.size());
  for (int i = 0; i < w.size(); ++i) all[i] = i;
  const GridFunction lu = laplacian(w, u, all);
  for (int i = 0; i < w.size(); ++i) {
    std::complex<double> acc = 0;
    for (const VertexId& nb : lattice_neighbors(LatticeKind::Square, w.vertices[i])) {
      const int k = w.index_of(nb);
      if (k >= 0) acc += u.at(k);
    }
    CHECK(std::abs(lu.at(i) - acc / double(w.degree(i))) < 1e-14);
  }

  GridFunction partial(w.size());
  partial.set(0, 1.0);
  CHECK_THROWS(laplacian(w, partial, {0}));
}

TEST_CASE("normal derivative examples") {
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-3, 3, -3, 3});
  const Region one = close_region(g, std::vector<VertexId>{VertexId{1, 0, 0}});
  GridFunction u(g.size());
  u.set(one.interior[0], 0.7);
  const GridFunction dn = normal_derivative(one, u);
  for (int v : one.boundary) CHECK(std::abs(dn.at(v) + 0.7) < 1e-15);

  std::vector<VertexId> ring;
  for (const Eis& e : hex::cell_corners(hex::cell_center(0, 0))) ring.push_back(hex::from_eis(e));
  const Region hr = close_region(g, ring);
  std::mt19937_64 rng(11);
  GridFunction z(g.size()), r(g.size());
  for (int v : hr.interior) {
    z.set(v, 0.0);
    r.set(v, rc(rng));
  }
  for (int v : hr.boundary) r.set(v, 1e6);  // outside values must not matter
  const GridFunction dz = normal_derivative(hr, z), dr = normal_derivative(hr, r);
  for (int v : hr.boundary) {
    CHECK(std::abs(dz.at(v)) == 0.0);
    std::complex<double> acc = 0;
    int deg = 0;
    for (int w : g.adj[v])
      if (hr.is_interior(w)) {
        acc += r.at(w);
        ++deg;
      }
    CHECK(std::abs(dr.at(v) + acc / double(deg)) < 1e-15);
  }
}

TEST_CASE("Green's identity holds on random regions of all three lattices") {
  std::mt19937_64 rng(5);
  for (LatticeKind k : {LatticeKind::Hexagonal, LatticeKind::Square, LatticeKind::Triangular}) {
    const LatticeGraph g = build_lattice(k, {-6, 6, -6, 6});
    for (int t = 0; t < 10; ++t) {
      std::vector<int> omega{g.index_of(VertexId{1, 0, 0})};
      std::set<int> in(omega.begin(), omega.end());
      const int target = 1 + static_cast<int>(rng() % 60);
      while (static_cast<int>(omega.size()) < target) {
        const int v = omega[rng() % omega.size()];
        const int w = g.adj[v][rng() % g.adj[v].size()];
        if (g.window_border[w] || in.count(w)) continue;
        in.insert(w);
        omega.push_back(w);
      }
      const Region r = close_region(g, omega);
      GridFunction f(g.size()), h(g.size());
      for (const auto* s : {&r.interior, &r.boundary})
        for (int v : *s) {
          f.set(v, rc(rng));
          h.set(v, rc(rng));
        }
      CHECK(green_identity(r, f, h).residual < 1e-12);
    }
  }
}

TEST_CASE("graph JSON round trip") {
  const LatticeGraph g = build_lattice(LatticeKind::Triangular, {-1, 1, -1, 1});
  const EditResult e = delete_edges(g, {{VertexId{1, 0, 0}, VertexId{1, 1, 0}}});
  const LatticeGraph back = graph_from_json(graph_to_json(e.graph));
  CHECK(back.vertices == e.graph.vertices);
  CHECK(back.adj == e.graph.adj);
}
