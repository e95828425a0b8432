#include <doctest.h>

#include <random>

#include "latinv/network.hpp"
#include "latinv/parallelogram.hpp"

using namespace latinv;
using namespace latinv::network;

namespace {
// Dense Kirchhoff matrix and its Schur complement onto the boundary.
Eigen::MatrixXd schur_oracle(const ConductanceNetwork& net) {
  const int n = net.num_vertices;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : net.edges) {
    if (e.u == e.v) continue;
    K(e.u, e.u) += e.gamma;
    K(e.v, e.v) += e.gamma;
    K(e.u, e.v) -= e.gamma;
    K(e.v, e.u) -= e.gamma;
  }
  std::vector<int> in;
  for (int v = 0; v < n; ++v)
    if (!net.is_boundary(v) && K(v, v) > 0) in.push_back(v);
  const int b = net.boundary.size(), m = in.size();
  Eigen::MatrixXd Kbb(b, b), Kbi(b, m), Kii(m, m);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) Kbb(i, j) = K(net.boundary[i], net.boundary[j]);
    for (int j = 0; j < m; ++j) Kbi(i, j) = K(net.boundary[i], in[j]);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Kii(i, j) = K(in[i], in[j]);
  if (m == 0) return Kbb;
  return Kbb - Kbi * Kii.lu().solve(Kbi.transpose());
}

ConductanceNetwork star(double g1, double g2, double g3) {
  ConductanceNetwork y;
  y.num_vertices = 4;
  y.boundary = {1, 2, 3};
  y.edges = {{0, 1, g1}, {0, 2, g2}, {0, 3, g3}};
  return y;
}

int find_edge(const ConductanceNetwork& net, int a, int b) {
  for (std::size_t k = 0; k < net.edges.size(); ++k)
    if ((net.edges[k].u == a && net.edges[k].v == b) || (net.edges[k].u == b && net.edges[k].v == a)) return k;
  return -1;
}
}  // namespace

TEST_CASE("response matrices of small networks") {
  ConductanceNetwork two;
  two.num_vertices = 2;
  two.boundary = {0, 1};
  two.edges = {{0, 1, 2.5}};
  const Eigen::MatrixXd L = dn_map_res(two);
  CHECK(L(0, 0) == 2.5);
  CHECK(L(0, 1) == -2.5);
  CHECK(L(1, 1) == 2.5);

  ConductanceNetwork delta;
  delta.num_vertices = 4;
  delta.boundary = {1, 2, 3};
  delta.edges = {{1, 2, 1.0 / 3}, {2, 3, 1.0 / 3}, {1, 3, 1.0 / 3}};
  CHECK(relative_difference(dn_map_res(star(1, 1, 1)), dn_map_res(delta)) < 1e-15);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const ConductanceNetwork net = random_circular_network(rng, 12);
    Eigen::MatrixXd L1;
    try {
      L1 = dn_map_res(net);
    } catch (const DisconnectedError&) {
      continue;
    }
    const Eigen::MatrixXd L2 = schur_oracle(net);
    CHECK(relative_difference(L1, L2) < 1e-12);
    CHECK((L1 - L1.transpose()).norm() < 1e-12 * L1.norm());
    CHECK(L1.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12 * L1.norm());
  }

  ConductanceNetwork lonely;
  lonely.num_vertices = 4;
  lonely.boundary = {0, 1};
  lonely.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK_THROWS_AS(dn_map_res(lonely), DisconnectedError);
}

TEST_CASE("raising one conductance raises the matching diagonal entry") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 20; ++t) {
    ConductanceNetwork net = random_circular_network(rng, 20);
    Eigen::MatrixXd before;
    try {
      before = dn_map_res(net);
    } catch (const DisconnectedError&) {
      continue;
    }
    const int e = rng() % net.edges.size();
    net.edges[e].gamma *= 3.0;
    const Eigen::MatrixXd after = dn_map_res(net);
    for (int i = 0; i < before.rows(); ++i) CHECK(after(i, i) >= before(i, i) - 1e-12);
  }
}

TEST_CASE("elementary transformation formulas") {
  ConductanceNetwork s;
  s.num_vertices = 3;
  s.boundary = {0, 2};
  s.edges = {{0, 1, 2.0}, {1, 2, 2.0}};
  const ConductanceNetwork ss = apply_transform(s, {TransformKind::Series, 1});
  REQUIRE(ss.edges.size() == 1);
  CHECK(ss.edges[0].gamma == doctest::Approx(1.0));

  ConductanceNetwork p;
  p.num_vertices = 2;
  p.boundary = {0, 1};
  p.edges = {{0, 1, 1.0}, {1, 0, 2.0}};
  const ConductanceNetwork pp = apply_transform(p, {TransformKind::Parallel, -1, 0, 1});
  REQUIRE(pp.edges.size() == 1);
  CHECK(pp.edges[0].gamma == 3.0);

  const ConductanceNetwork y = star(1, 2, 3);
  const ConductanceNetwork d = apply_transform(y, {TransformKind::YDelta, 0});
  REQUIRE(d.edges.size() == 3);
  // The centre is removed, so the tips are renumbered 0, 1, 2.
  const int e12 = find_edge(d, 0, 1), e13 = find_edge(d, 0, 2), e23 = find_edge(d, 1, 2);
  REQUIRE((e12 >= 0 && e13 >= 0 && e23 >= 0));
  CHECK(d.edges[e12].gamma == doctest::Approx(2.0 / 6));
  CHECK(d.edges[e13].gamma == doctest::Approx(3.0 / 6));
  CHECK(d.edges[e23].gamma == doctest::Approx(6.0 / 6));
  CHECK(relative_difference(dn_map_res(y), dn_map_res(d)) < 1e-14);

  CHECK_THROWS_AS(apply_transform(y, {TransformKind::Series, 0}), TransformError);
  CHECK_THROWS_AS(apply_transform(y, {TransformKind::YDelta, 1}), TransformError);
  CHECK_THROWS_AS(apply_transform(y, {TransformKind::Loop, -1, 0}), TransformError);
  CHECK_THROWS_AS(apply_transform(p, {TransformKind::Parallel, -1, 0, 0}), TransformError);
}

TEST_CASE("every transformation preserves the response matrix") {
  std::mt19937_64 rng(33);
  std::array<int, 6> seen{};
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const ConductanceNetwork net = random_circular_network(rng, 30);
    const auto ts = applicable_transforms(net);
    if (ts.empty()) continue;
    const ElementaryTransform tr = ts[rng() % ts.size()];
    const ConductanceNetwork out = apply_transform(net, tr);
    out.validate();
    CHECK(out.num_vertices <= net.num_vertices);
    CHECK(out.edges.size() <= net.edges.size());
    worst = std::max(worst, relative_difference(dn_map_res(net), dn_map_res(out)));
    ++seen[static_cast<int>(tr.kind)];
  }
  CHECK(worst < 1e-12);
  for (int k = 0; k < 6; ++k) {
    CAPTURE(k);
    CHECK(seen[k] > 0);
  }
}

TEST_CASE("connections") {
  for (int N : {1, 2, 3}) {
    const ConductanceNetwork net = parallelogram_network(N);
    const HexParallelogram par = build_parallelogram(N);
    auto ids = [&](const std::vector<int>& side, std::size_t from, std::size_t count) {
      std::vector<int> out;
      for (std::size_t k = from; k < from + count; ++k) {
        const auto p = par.graph->position(side[k]);
        for (int b : net.boundary)
          if (std::hypot(net.position[b][0] - p[0], net.position[b][1] - p[1]) < 1e-9) out.push_back(b);
      }
      return out;
    };
    const std::vector<int> L = ids(par.left, 1, N + 1), R = ids(par.right, 0, N + 1);
    REQUIRE(L.size() == static_cast<std::size_t>(N + 1));
    REQUIRE(R.size() == static_cast<std::size_t>(N + 1));
    const ConnectionResult c = is_connection(net, L, R);
    CHECK(c.connected);
    CHECK(c.paths.size() == static_cast<std::size_t>(N + 1));

    // Cutting an edge on every witness path disconnects one pair.
    ConductanceNetwork cut = net;
    std::vector<int> drop;
    for (const auto& path : c.paths) drop.push_back(find_edge(net, path[0], path[1]));
    std::sort(drop.rbegin(), drop.rend());
    for (int e : drop) cut = delete_edge(cut, e);
    CHECK_FALSE(is_connection(cut, L, R).connected);
  }
  const ConductanceNetwork net = honeycomb_network(1);
  CHECK_THROWS_AS(is_connection(net, {net.boundary[0]}, {net.boundary[0]}), std::invalid_argument);
  CHECK_THROWS_AS(is_connection(net, {net.boundary[0]}, {}), std::invalid_argument);
}

TEST_CASE("criticality fixtures") {
  for (int n : {1, 2}) {
    for (const ConductanceNetwork& net : {honeycomb_network(n), outer_wall_network(honeycomb_cells(n))}) {
      const CriticalityResult c = is_critical(net, net.boundary.size());
      CHECK(c.verdict == Tri::True);
      CHECK(c.certificates.size() == net.edges.size());
      for (const EdgeCertificate& e : c.certificates) CHECK(e.critical);
    }
  }
  // A detour b1 - a - b2 next to a boundary four-cycle is removable.
  ConductanceNetwork d;
  d.num_vertices = 5;
  d.boundary = {0, 1, 2, 3};
  d.edges = {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}, {0, 4, 1}, {4, 1, 1}};
  CHECK(is_critical(d, 4).verdict == Tri::False);
}

TEST_CASE("the stricter rule rejects the radius-2 outer wall") {
  CriticalityOptions both;
  both.rule = CriticalityRule::Both;
  const ConductanceNetwork wall = outer_wall_network(honeycomb_cells(2));
  CHECK(is_critical(wall, wall.boundary.size(), both).verdict == Tri::False);
}

TEST_CASE("reduction") {
  const ConductanceNetwork crit = honeycomb_network(1);
  const ReductionResult same = reduce(crit);
  CHECK(same.steps.empty());
  CHECK(same.net.edges.size() == crit.edges.size());

  ConductanceNetwork ld;
  ld.num_vertices = 4;
  ld.boundary = {0, 1};
  ld.edges = {{0, 1, 1.0}, {0, 0, 2.0}, {1, 3, 1.5}};
  const ReductionResult r = reduce(ld);
  CHECK(r.complete);
  CHECK(relative_difference(dn_map_res(ld), dn_map_res(r.net)) < 1e-14);
  int live = 0;
  for (const Edge& e : r.net.edges) live += e.u != e.v;
  CHECK(r.net.edges.size() == 1);
  CHECK(live == 1);

  // A star embedded between boundary vertices of a larger net.
  ConductanceNetwork emb;
  emb.num_vertices = 6;
  emb.boundary = {1, 2, 3, 4};
  emb.edges = {{0, 1, 1.0}, {0, 2, 2.0}, {0, 5, 3.0}, {5, 3, 1.0}, {5, 4, 0.5}, {3, 4, 1.0}};
  const ReductionResult re = reduce(emb);
  CHECK(relative_difference(dn_map_res(emb), dn_map_res(re.net)) < 1e-12);
  for (const ReductionStep& s : re.steps) CHECK(s.dn_change < 1e-12);

  std::mt19937_64 rng(34);
  for (int t = 0; t < 30; ++t) {
    const ConductanceNetwork net = random_circular_network(rng, 30);
    const ReductionResult red = reduce(net);
    CHECK(red.complete);
    int V = net.num_vertices, E = net.edges.size();
    ArcCount A = count_arcs(net, 5'000'000);
    for (const ReductionStep& s : red.steps) {
      CHECK(s.vertices <= V);
      CHECK(s.edges <= E);
      if (A.exact && s.arcs.exact) CHECK(s.arcs.count <= A.count);
      V = s.vertices;
      E = s.edges;
      A = s.arcs;
    }
  }
}

TEST_CASE("arc counts") {
  ConductanceNetwork two;
  two.num_vertices = 2;
  two.boundary = {0, 1};
  two.edges = {{0, 1, 1.0}};
  CHECK(count_arcs(two).count == 1);
  CHECK(count_arcs(star(1, 1, 1)).count == 3);
  const auto cells = honeycomb_cells(2);
  CHECK(count_arcs(polygon_network(cells)).count != count_arcs(outer_wall_network(cells)).count);
}

TEST_CASE("JSON round trip") {
  std::mt19937_64 rng(35);
  const ConductanceNetwork net = random_circular_network(rng, 20);
  const ConductanceNetwork back = network_from_json(to_json(net));
  CHECK(network_hash(back) == network_hash(net));
  CHECK(relative_difference(dn_map_res(back), dn_map_res(net)) == 0.0);
}
