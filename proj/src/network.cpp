#include "latinv/network.hpp"

#include <algorithm>
#include <bit>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/edmonds_karp_max_flow.hpp>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_set>

#include "latinv/parallelogram.hpp"

namespace latinv::network {

bool ConductanceNetwork::is_boundary(int v) const {
  return std::find(boundary.begin(), boundary.end(), v) != boundary.end();
}

std::vector<char> ConductanceNetwork::boundary_mask() const {
  std::vector<char> m(num_vertices, 0);
  for (int b : boundary) m[b] = 1;
  return m;
}

int ConductanceNetwork::degree(int v) const {
  int d = 0;
  for (const Edge& e : edges) d += (e.u == v) + (e.v == v);
  return d;
}

std::vector<std::vector<int>> ConductanceNetwork::incident_edges() const {
  std::vector<std::vector<int>> inc(num_vertices);
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    inc[edges[i].u].push_back(i);
    if (edges[i].v != edges[i].u) inc[edges[i].v].push_back(i);
  }
  return inc;
}

void ConductanceNetwork::validate() const {
  if (num_vertices < 0) throw std::invalid_argument("negative vertex count");
  std::vector<char> seen(num_vertices, 0);
  for (int b : boundary) {
    if (b < 0 || b >= num_vertices) throw std::invalid_argument("boundary vertex out of range");
    if (seen[b]) throw std::invalid_argument("boundary vertex listed twice");
    seen[b] = 1;
  }
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices)
      throw std::invalid_argument("edge endpoint out of range");
    if (!(e.gamma > 0.0) || !std::isfinite(e.gamma)) throw std::invalid_argument("conductance must be positive");
  }
  if (!position.empty() && static_cast<int>(position.size()) != num_vertices)
    throw std::invalid_argument("position list does not match the vertex count");
}

Eigen::MatrixXd dn_map_res(const ConductanceNetwork& net) {
  net.validate();
  const int n = net.num_vertices;
  if (net.boundary.empty()) throw std::invalid_argument("network has no boundary vertices");
  // Components through non-loop edges.
  std::vector<int> comp(n, -1);
  const auto inc = net.incident_edges();
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int ei : inc[x]) {
        const Edge& e = net.edges[ei];
        const int y = e.u == x ? e.v : e.u;
        if (comp[y] < 0) {
          comp[y] = ncomp;
          stack.push_back(y);
        }
      }
    }
    ++ncomp;
  }
  std::vector<char> has_boundary(ncomp, 0), has_edge(ncomp, 0);
  for (int b : net.boundary) has_boundary[comp[b]] = 1;
  for (const Edge& e : net.edges)
    if (e.u != e.v) has_edge[comp[e.u]] = 1;
  for (int c = 0; c < ncomp; ++c)
    if (has_edge[c] && !has_boundary[c]) throw DisconnectedError("a component with edges has no boundary vertex");

  const auto bmask = net.boundary_mask();
  std::vector<int> pos(n, -1);
  const int m = static_cast<int>(net.boundary.size());
  for (int k = 0; k < m; ++k) pos[net.boundary[k]] = k;
  int ni = 0;
  for (int v = 0; v < n; ++v)
    if (!bmask[v] && has_boundary[comp[v]] && has_edge[comp[v]]) pos[v] = m + ni++;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m + ni, m + ni);
  for (const Edge& e : net.edges) {
    if (e.u == e.v) continue;
    const int a = pos[e.u], b = pos[e.v];
    L(a, a) += e.gamma;
    L(b, b) += e.gamma;
    L(a, b) -= e.gamma;
    L(b, a) -= e.gamma;
  }
  if (ni == 0) return L;
  const Eigen::MatrixXd Lii = L.bottomRightCorner(ni, ni);
  const Eigen::MatrixXd Lib = L.bottomLeftCorner(ni, m);
  Eigen::LLT<Eigen::MatrixXd> llt(Lii);
  if (llt.info() != Eigen::Success) throw DisconnectedError("interior block is singular");
  Eigen::MatrixXd out = L.topLeftCorner(m, m) - Lib.transpose() * llt.solve(Lib);
  return 0.5 * (out + out.transpose());
}

double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::Point: return "point";
    case TransformKind::Loop: return "loop";
    case TransformKind::DeadArm: return "dead_arm";
    case TransformKind::Series: return "series";
    case TransformKind::Parallel: return "parallel";
    case TransformKind::YDelta: return "y_delta";
  }
  return "?";
}

std::string to_string(Tri t) {
  switch (t) {
    case Tri::False: return "false";
    case Tri::True: return "true";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

namespace {

// Drops vertex v (which must have no edges) and renumbers the rest.
ConductanceNetwork remove_isolated_vertex(const ConductanceNetwork& net, int v) {
  ConductanceNetwork out;
  out.num_vertices = net.num_vertices - 1;
  auto map = [v](int x) { return x > v ? x - 1 : x; };
  for (int b : net.boundary)
    if (b != v) out.boundary.push_back(map(b));
  for (const Edge& e : net.edges) out.edges.push_back({map(e.u), map(e.v), e.gamma});
  for (int i = 0; i < static_cast<int>(net.position.size()); ++i)
    if (i != v) out.position.push_back(net.position[i]);
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw TransformError(msg);
}

// Non-loop incident edges of v, or nullopt if v carries a loop.
std::optional<std::vector<int>> plain_incidence(const ConductanceNetwork& net, int v) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(net.edges.size()); ++i) {
    const Edge& e = net.edges[i];
    if (e.u == v && e.v == v) return std::nullopt;
    if (e.u == v || e.v == v) out.push_back(i);
  }
  return out;
}

int other_end(const Edge& e, int v) { return e.u == v ? e.v : e.u; }

ConductanceNetwork without_edges(const ConductanceNetwork& net, std::vector<int> drop) {
  std::sort(drop.begin(), drop.end());
  ConductanceNetwork out = net;
  out.edges.clear();
  for (int i = 0; i < static_cast<int>(net.edges.size()); ++i)
    if (!std::binary_search(drop.begin(), drop.end(), i)) out.edges.push_back(net.edges[i]);
  return out;
}

}  // namespace

ConductanceNetwork apply_transform(const ConductanceNetwork& net, const ElementaryTransform& t) {
  const int n = net.num_vertices, ne = static_cast<int>(net.edges.size());
  auto check_vertex = [&] { require(t.vertex >= 0 && t.vertex < n, "transform vertex out of range"); };
  auto check_edge = [&](int e) { require(e >= 0 && e < ne, "transform edge out of range"); };
  switch (t.kind) {
    case TransformKind::Point: {
      check_vertex();
      require(!net.is_boundary(t.vertex), "point removal needs an interior vertex");
      require(net.degree(t.vertex) == 0, "point removal needs an isolated vertex");
      return remove_isolated_vertex(net, t.vertex);
    }
    case TransformKind::Loop: {
      check_edge(t.edge);
      require(net.edges[t.edge].u == net.edges[t.edge].v, "edge is not a loop");
      return without_edges(net, {t.edge});
    }
    case TransformKind::DeadArm: {
      check_edge(t.edge);
      const Edge& e = net.edges[t.edge];
      require(e.u != e.v, "dead arm cannot be a loop");
      const bool leaf_u = !net.is_boundary(e.u) && net.degree(e.u) == 1;
      const bool leaf_v = !net.is_boundary(e.v) && net.degree(e.v) == 1;
      require(leaf_u || leaf_v, "dead arm needs an interior end point of degree 1");
      return without_edges(net, {t.edge});
    }
    case TransformKind::Series: {
      check_vertex();
      const int a = t.vertex;
      require(!net.is_boundary(a), "series reduction needs an interior vertex");
      const auto inc = plain_incidence(net, a);
      require(inc && inc->size() == 2, "series reduction needs degree 2 without loops");
      const Edge& e1 = net.edges[(*inc)[0]];
      const Edge& e2 = net.edges[(*inc)[1]];
      const int b = other_end(e1, a), c = other_end(e2, a);
      require(b != c, "series neighbours coincide");
      ConductanceNetwork out = without_edges(net, *inc);
      out.edges.push_back({b, c, 1.0 / (1.0 / e1.gamma + 1.0 / e2.gamma)});
      return remove_isolated_vertex(out, a);
    }
    case TransformKind::Parallel: {
      check_edge(t.edge);
      check_edge(t.edge2);
      require(t.edge != t.edge2, "parallel reduction needs two distinct edges");
      const Edge& e1 = net.edges[t.edge];
      const Edge& e2 = net.edges[t.edge2];
      require(e1.u != e1.v, "parallel reduction does not apply to loops");
      require((e1.u == e2.u && e1.v == e2.v) || (e1.u == e2.v && e1.v == e2.u), "edges do not join the same vertices");
      ConductanceNetwork out = without_edges(net, {t.edge, t.edge2});
      out.edges.push_back({e1.u, e1.v, e1.gamma + e2.gamma});
      return out;
    }
    case TransformKind::YDelta: {
      check_vertex();
      const int o = t.vertex;
      require(!net.is_boundary(o), "Y-Delta needs an interior centre");
      const auto inc = plain_incidence(net, o);
      require(inc && inc->size() == 3, "Y-Delta needs degree 3 without loops");
      std::array<int, 3> nb{};
      std::array<double, 3> g{};
      for (int k = 0; k < 3; ++k) {
        nb[k] = other_end(net.edges[(*inc)[k]], o);
        g[k] = net.edges[(*inc)[k]].gamma;
      }
      require(nb[0] != nb[1] && nb[1] != nb[2] && nb[0] != nb[2], "Y-Delta needs three distinct neighbours");
      const double sum = g[0] + g[1] + g[2];
      ConductanceNetwork out = without_edges(net, *inc);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) out.edges.push_back({nb[i], nb[j], g[i] * g[j] / sum});
      return remove_isolated_vertex(out, o);
    }
  }
  throw TransformError("unknown transform");
}

std::vector<ElementaryTransform> applicable_transforms(const ConductanceNetwork& net) {
  std::vector<ElementaryTransform> out;
  const auto bmask = net.boundary_mask();
  const int ne = static_cast<int>(net.edges.size());
  std::vector<int> deg(net.num_vertices, 0);
  std::vector<char> has_loop(net.num_vertices, 0);
  for (const Edge& e : net.edges) {
    ++deg[e.u];
    ++deg[e.v];
    if (e.u == e.v) has_loop[e.u] = 1;
  }
  for (int v = 0; v < net.num_vertices; ++v)
    if (!bmask[v] && deg[v] == 0) out.push_back({TransformKind::Point, v, -1, -1});
  for (int i = 0; i < ne; ++i) {
    const Edge& e = net.edges[i];
    if (e.u == e.v) {
      out.push_back({TransformKind::Loop, -1, i, -1});
      continue;
    }
    if ((!bmask[e.u] && deg[e.u] == 1) || (!bmask[e.v] && deg[e.v] == 1))
      out.push_back({TransformKind::DeadArm, -1, i, -1});
    for (int j = i + 1; j < ne; ++j) {
      const Edge& f = net.edges[j];
      if ((e.u == f.u && e.v == f.v) || (e.u == f.v && e.v == f.u)) out.push_back({TransformKind::Parallel, -1, i, j});
    }
  }
  for (int v = 0; v < net.num_vertices; ++v) {
    if (bmask[v] || has_loop[v] || (deg[v] != 2 && deg[v] != 3)) continue;
    std::set<int> nbrs;
    for (const Edge& e : net.edges)
      if (e.u == v || e.v == v) nbrs.insert(other_end(e, v));
    if (static_cast<int>(nbrs.size()) != deg[v]) continue;
    out.push_back({deg[v] == 2 ? TransformKind::Series : TransformKind::YDelta, v, -1, -1});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vertex-disjoint paths.

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
struct ArcProp {
  long capacity = 0;
  long residual = 0;
  Traits::edge_descriptor reverse;
  int net_edge = -1;
};
using FlowGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS, boost::no_property, ArcProp>;
using Arc = Traits::edge_descriptor;

// Split graph: vertex v becomes v_in = 2v -> v_out = 2v+1 with capacity one.
// Source and sink arcs exist for every boundary vertex; a query switches on
// the ones in P and Q and blocks paths through other boundary vertices.
class FlowNetwork {
 public:
  explicit FlowNetwork(const ConductanceNetwork& net) : net_(net), bmask_(net.boundary_mask()) {
    const int n = net.num_vertices;
    g_ = FlowGraph(2 * n + 2);
    source_ = 2 * n;
    sink_ = 2 * n + 1;
    into_.resize(n);
    outof_.resize(n);
    src_.resize(n);
    snk_.resize(n);
    for (int v = 0; v < n; ++v) {
      const Arc a = add_arc(2 * v, 2 * v + 1, -1);
      g_[a].capacity = 1;
    }
    for (int i = 0; i < static_cast<int>(net.edges.size()); ++i) {
      const Edge& e = net.edges[i];
      if (e.u == e.v) continue;
      for (auto [x, y] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
        const Arc a = add_arc(2 * x + 1, 2 * y, i);
        if (bmask_[x]) outof_[x].push_back(a);
        if (bmask_[y]) into_[y].push_back(a);
        if (!bmask_[x] && !bmask_[y]) g_[a].capacity = 1;
      }
    }
    for (int b : net.boundary) {
      src_[b] = add_arc(source_, 2 * b, -1);
      snk_[b] = add_arc(2 * b + 1, sink_, -1);
    }
  }

  PathSystem solve(const std::vector<int>& P, const std::vector<int>& Q) {
    std::vector<char> inP(net_.num_vertices, 0), inQ(net_.num_vertices, 0);
    for (int p : P) inP[p] = 1;
    for (int q : Q) inQ[q] = 1;
    for (int b : net_.boundary) {
      g_[src_[b]].capacity = inP[b];
      g_[snk_[b]].capacity = inQ[b];
      for (const Arc& a : into_[b]) g_[a].capacity = 0;
      for (const Arc& a : outof_[b]) g_[a].capacity = 0;
    }
    // An arc out of a P vertex is usable when its head may be entered; an arc
    // into a Q vertex when its tail may be left.
    for (int b : net_.boundary) {
      if (inP[b])
        for (const Arc& a : outof_[b]) {
          const int head = static_cast<int>(boost::target(a, g_)) / 2;
          if (!bmask_[head] || inQ[head]) g_[a].capacity = 1;
        }
      if (inQ[b])
        for (const Arc& a : into_[b]) {
          const int tail = static_cast<int>(boost::source(a, g_)) / 2;
          if (!bmask_[tail]) g_[a].capacity = 1;
        }
    }
    const long flow = boost::edmonds_karp_max_flow(
        g_, source_, sink_,
        boost::capacity_map(boost::get(&ArcProp::capacity, g_))
            .residual_capacity_map(boost::get(&ArcProp::residual, g_))
            .reverse_edge_map(boost::get(&ArcProp::reverse, g_)));
    PathSystem ps;
    ps.count = static_cast<int>(flow);
    auto flow_arc = [&](std::size_t node) -> std::optional<Arc> {
      for (auto [it, end] = boost::out_edges(node, g_); it != end; ++it)
        if (g_[*it].capacity > 0 && g_[*it].capacity - g_[*it].residual > 0) return *it;
      return std::nullopt;
    };
    for (auto [it, end] = boost::out_edges(source_, g_); it != end; ++it) {
      if (g_[*it].capacity == 0 || g_[*it].residual > 0) continue;
      std::vector<int> vs, es;
      std::size_t node = boost::target(*it, g_);
      while (node != sink_) {
        if (node % 2 == 0) vs.push_back(static_cast<int>(node / 2));
        const auto a = flow_arc(node);
        if (!a) throw std::logic_error("flow decomposition failed");
        if (g_[*a].net_edge >= 0) es.push_back(g_[*a].net_edge);
        node = boost::target(*a, g_);
      }
      ps.vertices.push_back(std::move(vs));
      ps.edges.push_back(std::move(es));
    }
    return ps;
  }

 private:
  Arc add_arc(std::size_t x, std::size_t y, int net_edge) {
    const Arc a = boost::add_edge(x, y, g_).first;
    const Arc r = boost::add_edge(y, x, g_).first;
    g_[a].reverse = r;
    g_[r].reverse = a;
    g_[a].net_edge = net_edge;
    g_[r].net_edge = net_edge;
    return a;
  }

  const ConductanceNetwork& net_;
  std::vector<char> bmask_;
  FlowGraph g_;
  std::size_t source_ = 0, sink_ = 0;
  std::vector<std::vector<Arc>> into_, outof_;
  std::vector<Arc> src_, snk_;
};

void check_terminals(const ConductanceNetwork& net, const std::vector<int>& P, const std::vector<int>& Q) {
  if (P.size() != Q.size()) throw std::invalid_argument("P and Q must have equal length");
  const auto bmask = net.boundary_mask();
  std::set<int> all;
  for (const auto* s : {&P, &Q})
    for (int v : *s) {
      if (v < 0 || v >= net.num_vertices || !bmask[v]) throw std::invalid_argument("connection terminal is not a boundary vertex");
      if (!all.insert(v).second) throw std::invalid_argument("connection terminals must be distinct");
    }
}

}  // namespace

PathSystem disjoint_paths(const ConductanceNetwork& net, const std::vector<int>& P, const std::vector<int>& Q) {
  net.validate();
  std::set<int> all(P.begin(), P.end());
  for (int q : Q)
    if (all.count(q)) throw std::invalid_argument("P and Q overlap");
  const auto bmask = net.boundary_mask();
  for (const auto* s : {&P, &Q})
    for (int v : *s)
      if (v < 0 || v >= net.num_vertices || !bmask[v]) throw std::invalid_argument("terminal is not a boundary vertex");
  FlowNetwork fn(net);
  return fn.solve(P, Q);
}

ConnectionResult is_connection(const ConductanceNetwork& net, const std::vector<int>& P, const std::vector<int>& Q) {
  check_terminals(net, P, Q);
  if (P.empty()) throw std::invalid_argument("empty connection");
  const PathSystem ps = disjoint_paths(net, P, Q);
  ConnectionResult r;
  r.connected = ps.count == static_cast<int>(P.size());
  if (r.connected)
    for (int p : P)
      for (const auto& path : ps.vertices)
        if (path.front() == p) r.paths.push_back(path);
  return r;
}

ConductanceNetwork delete_edge(const ConductanceNetwork& net, int e) {
  if (e < 0 || e >= static_cast<int>(net.edges.size())) throw std::invalid_argument("edge out of range");
  return without_edges(net, {e});
}

ConductanceNetwork contract_edge(const ConductanceNetwork& net, int e) {
  if (e < 0 || e >= static_cast<int>(net.edges.size())) throw std::invalid_argument("edge out of range");
  const Edge& ed = net.edges[e];
  if (ed.u == ed.v) return without_edges(net, {e});
  const bool bu = net.is_boundary(ed.u), bv = net.is_boundary(ed.v);
  if (bu && bv) throw std::invalid_argument("contraction of an edge between two boundary vertices is not defined here");
  const int keep = bv ? ed.v : ed.u, gone = bv ? ed.u : ed.v;
  ConductanceNetwork out = without_edges(net, {e});
  for (Edge& x : out.edges) {
    if (x.u == gone) x.u = keep;
    if (x.v == gone) x.v = keep;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criticality.

namespace {

struct ConnectionRecord {
  std::vector<int> P, Q;
  std::vector<int> edges;     // witness edges in the original network
  std::vector<int> vertices;  // witness vertices
};

// Orders the witness so that P follows the boundary order from the record's
// starting point and Q lists the matching far ends.
ConnectionRecord make_record(const PathSystem& ps, const std::vector<int>& bpos) {
  std::vector<int> order(ps.vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return bpos[ps.vertices[a].front()] < bpos[ps.vertices[b].front()]; });
  ConnectionRecord r;
  for (int i : order) {
    r.P.push_back(ps.vertices[i].front());
    r.Q.push_back(ps.vertices[i].back());
    r.vertices.insert(r.vertices.end(), ps.vertices[i].begin(), ps.vertices[i].end());
    r.edges.insert(r.edges.end(), ps.edges[i].begin(), ps.edges[i].end());
  }
  std::sort(r.edges.begin(), r.edges.end());
  std::sort(r.vertices.begin(), r.vertices.end());
  return r;
}

bool contains(const std::vector<int>& sorted, int x) { return std::binary_search(sorted.begin(), sorted.end(), x); }

}  // namespace

CriticalityResult is_critical(const ConductanceNetwork& net, int k_max, const CriticalityOptions& opt) {
  net.validate();
  CriticalityResult res;
  const int m = static_cast<int>(net.boundary.size());
  const int ne = static_cast<int>(net.edges.size());
  if (m < 2) {
    res.verdict = ne == 0 ? Tri::True : Tri::False;
    res.reason = "fewer than two boundary vertices";
    return res;
  }
  std::vector<int> bpos(net.num_vertices, -1);
  for (int k = 0; k < m; ++k) bpos[net.boundary[k]] = k;
  const auto bmask = net.boundary_mask();
  std::vector<int> deg(net.num_vertices, 0);
  for (const Edge& e : net.edges) {
    ++deg[e.u];
    ++deg[e.v];
  }

  // Structural witnesses: removing a loop or a dead arm leaves every
  // connection intact under both removals.
  for (int i = 0; i < ne; ++i) {
    const Edge& e = net.edges[i];
    const bool loop = e.u == e.v;
    const bool arm = !loop && ((!bmask[e.u] && deg[e.u] == 1) || (!bmask[e.v] && deg[e.v] == 1));
    if (loop || arm) {
      EdgeCertificate c;
      c.edge = i;
      c.note = loop ? "loop: no path uses it" : "dead arm: no path uses it";
      res.certificates.push_back(c);
      res.verdict = Tri::False;
      res.reason = c.note;
      return res;
    }
  }

  FlowNetwork base(net);
  std::vector<ConnectionRecord> records;
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  auto add_record = [&](const std::vector<int>& P, const std::vector<int>& Q, bool require_full) {
    ++res.flows;
    const PathSystem ps = base.solve(P, Q);
    if (ps.count == 0 || ps.count > k_max) return;
    if (require_full && ps.count != static_cast<int>(P.size())) return;
    ConnectionRecord r = make_record(ps, bpos);
    if (seen.insert({r.P, r.Q}).second) records.push_back(std::move(r));
  };

  // Pairs of disjoint boundary arcs; the maximal path systems between them
  // are circular-pair connections.
  for (int start = 0; start < m; ++start)
    for (int la = 1; la < m; ++la)
      for (int gap = 0; la + gap < m; ++gap)
        for (int lb = 1; la + gap + lb <= m; ++lb) {
          const int b0 = start + la + gap;
          std::vector<int> A, B;
          for (int k = 0; k < la; ++k) A.push_back(net.boundary[(start + k) % m]);
          for (int k = 0; k < lb; ++k) B.push_back(net.boundary[(b0 + k) % m]);
          add_record(A, B, false);
        }
  const std::size_t arc_records = records.size();
  bool exhaustive_done = false;

  // Every circular pair of size at most k_max, used only when the arc pairs
  // do not settle an edge.
  auto run_exhaustive = [&] {
    if (exhaustive_done) return;
    exhaustive_done = true;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      const int bits = std::popcount(mask);
      if (bits % 2 || bits / 2 > k_max) continue;
      std::vector<int> s;
      for (int k = 0; k < m; ++k)
        if (mask & (1u << k)) s.push_back(net.boundary[k]);
      const int k = bits / 2;
      for (int r = 0; r < k; ++r) {
        std::vector<int> P, Q;
        for (int i = 0; i < k; ++i) P.push_back(s[(r + i) % bits]);
        for (int i = 0; i < k; ++i) Q.push_back(s[(r + bits - 1 - i) % bits]);
        add_record(P, Q, true);
      }
      if (res.flows > opt.flow_budget) return;
    }
  };

  auto find_break = [&](FlowNetwork& fn, const std::function<bool(const ConnectionRecord&)>& relevant,
                        std::size_t from, std::size_t to, EdgeCertificate& cert) {
    for (std::size_t i = from; i < to; ++i) {
      const ConnectionRecord& r = records[i];
      if (!relevant(r)) continue;
      ++res.flows;
      if (fn.solve(r.P, r.Q).count < static_cast<int>(r.P.size())) {
        cert.P = r.P;
        cert.Q = r.Q;
        return true;
      }
    }
    return false;
  };

  bool unknown = false;
  for (int i = 0; i < ne; ++i) {
    const Edge& e = net.edges[i];
    EdgeCertificate cert;
    cert.edge = i;
    const ConductanceNetwork deleted = delete_edge(net, i);
    FlowNetwork fdel(deleted);
    auto uses_edge = [i](const ConnectionRecord& r) { return contains(r.edges, i); };
    auto touches = [&e](const ConnectionRecord& r) { return contains(r.vertices, e.u) || contains(r.vertices, e.v); };
    const bool can_contract = !(bmask[e.u] && bmask[e.v]);
    std::optional<ConductanceNetwork> contracted;
    std::optional<FlowNetwork> fcon;
    if (can_contract) {
      contracted = contract_edge(net, i);
      fcon.emplace(*contracted);
    }
    auto try_range = [&](std::size_t from, std::size_t to, bool& del_ok, bool& con_ok, EdgeCertificate& dc,
                         EdgeCertificate& cc) {
      if (!del_ok) del_ok = find_break(fdel, uses_edge, from, to, dc);
      const bool need_con = opt.rule == CriticalityRule::Both ? can_contract : !del_ok && can_contract;
      if (need_con && !con_ok) con_ok = find_break(*fcon, touches, from, to, cc);
    };
    bool del_ok = false, con_ok = false;
    EdgeCertificate dc = cert, cc = cert;
    try_range(0, arc_records, del_ok, con_ok, dc, cc);
    auto settled = [&] {
      return opt.rule == CriticalityRule::Either ? (del_ok || con_ok) : (del_ok && (con_ok || !can_contract));
    };
    bool complete_search = false;
    if (!settled() && m <= opt.exhaustive_boundary_limit) {
      run_exhaustive();
      try_range(arc_records, records.size(), del_ok, con_ok, dc, cc);
      complete_search = res.flows <= opt.flow_budget;
    }
    if (settled()) {
      cert = del_ok ? dc : cc;
      cert.critical = true;
      cert.mode = del_ok ? Removal::Delete : Removal::Contract;
      cert.note = del_ok ? "deletion breaks the connection" : "contraction breaks the connection";
      if (opt.rule == CriticalityRule::Both && can_contract) cert.note += "; contraction breaks (" +
                                                                         std::to_string(cc.P.size()) + "-connection)";
      res.certificates.push_back(cert);
      continue;
    }
    if (complete_search) {
      cert.critical = false;
      cert.mode = del_ok ? Removal::Contract : Removal::Delete;
      cert.note = "no connection of size <= k_max breaks under this removal (exhaustive)";
      res.certificates.push_back(cert);
      res.verdict = Tri::False;
      res.reason = "edge " + std::to_string(i) + " is removable";
      return res;
    }
    cert.note = "undecided within the search budget";
    res.certificates.push_back(cert);
    unknown = true;
  }
  res.verdict = unknown ? Tri::Unknown : Tri::True;
  res.reason = unknown ? "some edges undecided" : "every edge breaks a connection";
  return res;
}

// ---------------------------------------------------------------------------
// Arc counting.

ArcCount count_arcs(const ConductanceNetwork& net, long long budget) {
  net.validate();
  ArcCount out;
  const auto bmask = net.boundary_mask();
  std::vector<int> bpos(net.num_vertices, -1);
  for (int k = 0; k < static_cast<int>(net.boundary.size()); ++k) bpos[net.boundary[k]] = k;
  const auto inc = net.incident_edges();
  std::vector<char> on_path(net.num_vertices, 0);
  long long work = 0;
  std::function<void(int, int)> dfs = [&](int s, int x) {
    for (int ei : inc[x]) {
      if (++work > budget) {
        out.exact = false;
        return;
      }
      const Edge& e = net.edges[ei];
      if (e.u == e.v) continue;
      const int y = other_end(e, x);
      if (bmask[y]) {
        if (bpos[y] > bpos[s]) ++out.count;
      } else if (!on_path[y]) {
        on_path[y] = 1;
        dfs(s, y);
        on_path[y] = 0;
      }
      if (!out.exact) return;
    }
  };
  for (int s : net.boundary) {
    dfs(s, s);
    if (!out.exact) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reduction.

std::uint64_t network_hash(const ConductanceNetwork& net) {
  std::vector<std::tuple<int, int, std::uint64_t>> es;
  for (const Edge& e : net.edges) {
    std::uint64_t bits;
    const double g = std::round(e.gamma * 1e12) / 1e12;
    std::memcpy(&bits, &g, sizeof bits);
    es.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v), bits);
  }
  std::sort(es.begin(), es.end());
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(net.num_vertices));
  for (int b : net.boundary) mix(static_cast<std::uint64_t>(b) + 0x100000000ULL);
  for (const auto& [u, v, g] : es) {
    mix(static_cast<std::uint64_t>(u));
    mix(static_cast<std::uint64_t>(v));
    mix(g);
  }
  return h;
}

ReductionResult reduce(const ConductanceNetwork& input, const ReduceOptions& opt) {
  input.validate();
  ReductionResult res;
  res.net = input;
  std::unordered_set<std::uint64_t> seen{network_hash(input)};
  const Eigen::MatrixXd dn0 = opt.check_dn ? dn_map_res(input) : Eigen::MatrixXd();
  auto record = [&](const ElementaryTransform& t, const ArcCount& arcs) {
    ReductionStep s;
    s.transform = t;
    s.vertices = res.net.num_vertices;
    s.edges = static_cast<int>(res.net.edges.size());
    s.arcs = arcs;
    if (opt.check_dn) s.dn_change = relative_difference(dn0, dn_map_res(res.net));
    res.steps.push_back(s);
  };
  ArcCount arcs = count_arcs(res.net, opt.arc_budget);
  for (int step = 0; step < opt.max_steps; ++step) {
    const auto ts = applicable_transforms(res.net);
    const auto simple = std::find_if(ts.begin(), ts.end(), [](const ElementaryTransform& t) {
      return t.kind != TransformKind::YDelta;
    });
    if (simple != ts.end()) {
      res.net = apply_transform(res.net, *simple);
      seen.insert(network_hash(res.net));
      arcs = count_arcs(res.net, opt.arc_budget);
      record(*simple, arcs);
      continue;
    }
    bool moved = false;
    for (const ElementaryTransform& t : ts) {
      ConductanceNetwork cand = apply_transform(res.net, t);
      const std::uint64_t h = network_hash(cand);
      if (seen.count(h)) continue;
      const ArcCount ca = count_arcs(cand, opt.arc_budget);
      if (!ca.exact || !arcs.exact || ca.count > arcs.count) continue;
      seen.insert(h);
      res.net = std::move(cand);
      arcs = ca;
      record(t, arcs);
      moved = true;
      break;
    }
    if (!moved) return res;
  }
  res.complete = false;
  return res;
}

// ---------------------------------------------------------------------------
// JSON.

nlohmann::json to_json(const ConductanceNetwork& net) {
  nlohmann::json j;
  j["num_vertices"] = net.num_vertices;
  j["boundary_order"] = net.boundary;
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : net.edges) j["edges"].push_back({e.u, e.v, e.gamma});
  if (!net.position.empty()) j["positions"] = net.position;
  return j;
}

ConductanceNetwork network_from_json(const nlohmann::json& j) {
  ConductanceNetwork net;
  net.boundary = j.at("boundary_order").get<std::vector<int>>();
  int top = -1;
  for (int b : net.boundary) top = std::max(top, b);
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument("edge entries must be [u, v, gamma]");
    net.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    top = std::max({top, net.edges.back().u, net.edges.back().v});
  }
  net.num_vertices = j.contains("num_vertices") ? j.at("num_vertices").get<int>() : top + 1;
  if (j.contains("positions")) net.position = j.at("positions").get<std::vector<std::array<double, 2>>>();
  net.validate();
  return net;
}

// ---------------------------------------------------------------------------
// Hexagonal fixtures.

std::vector<Eis> honeycomb_cells(int n) {
  if (n < 1) throw std::invalid_argument("honeycomb size must be at least 1");
  std::vector<Eis> out;
  for (int a = -(n - 1); a <= n - 1; ++a)
    for (int b = -(n - 1); b <= n - 1; ++b)
      if (std::abs(a + b) <= n - 1) out.push_back(hex::cell_center(a, b));
  return out;
}

namespace {

ConductanceNetwork hex_network(const std::vector<Eis>& cells, bool outer_wall) {
  const std::vector<Eis> inner = vertices_of_cells(cells);
  const std::set<Eis> inner_set(inner.begin(), inner.end()), cell_set(cells.begin(), cells.end());
  std::map<Eis, int> id;
  for (const Eis& v : inner) id.emplace(v, static_cast<int>(id.size()));
  ConductanceNetwork net;
  std::vector<std::pair<Eis, Eis>> pendants;  // (inner vertex, outside vertex)
  for (const Eis& v : inner) {
    int deg = 0;
    Eis out{};
    for (const Eis& w : hex::neighbors(v)) {
      if (inner_set.count(w)) {
        ++deg;
        if (!(v < w)) continue;
        if (outer_wall) {
          int shared = 0;
          for (const Eis& c : hex::incident_cells(v)) {
            const auto wc = hex::incident_cells(w);
            if (cell_set.count(c) && std::find(wc.begin(), wc.end(), c) != wc.end()) ++shared;
          }
          if (shared != 1) continue;
        }
        net.edges.push_back({id.at(v), id.at(w), 1.0});
      } else {
        out = w;
      }
    }
    if (deg == 2) pendants.push_back({v, out});
  }
  double cx = 0, cy = 0;
  for (const Eis& v : inner) {
    const auto p = hex::position(v);
    cx += p[0];
    cy += p[1];
  }
  cx /= inner.size();
  cy /= inner.size();
  std::sort(pendants.begin(), pendants.end(), [&](const auto& a, const auto& b) {
    const auto pa = hex::position(a.second), pb = hex::position(b.second);
    return std::atan2(pa[1] - cy, pa[0] - cx) < std::atan2(pb[1] - cy, pb[0] - cx);
  });
  net.num_vertices = static_cast<int>(inner.size() + pendants.size());
  for (const Eis& v : inner) net.position.push_back(hex::position(v));
  for (const auto& [v, w] : pendants) {
    const int b = static_cast<int>(net.position.size());
    net.position.push_back(hex::position(w));
    net.boundary.push_back(b);
    net.edges.push_back({id.at(v), b, 1.0});
  }
  return net;
}

}  // namespace

ConductanceNetwork polygon_network(const std::vector<Eis>& cells) { return hex_network(cells, false); }
ConductanceNetwork outer_wall_network(const std::vector<Eis>& cells) { return hex_network(cells, true); }
ConductanceNetwork honeycomb_network(int n) { return polygon_network(honeycomb_cells(n)); }
ConductanceNetwork parallelogram_network(int N) { return polygon_network(parallelogram_cells(N)); }

// ---------------------------------------------------------------------------
// Random circular planar networks.

ConductanceNetwork random_circular_network(std::mt19937_64& rng, int max_vertices) {
  std::uniform_real_distribution<double> gam(0.5, 2.0), unit(0.0, 1.0);
  auto pick = [&rng](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int rows = 2 + pick(3), cols = 2 + pick(3);
  while (rows * cols > std::max(4, max_vertices - 4)) (rows > cols ? rows : cols)--;
  ConductanceNetwork net;
  net.num_vertices = rows * cols;
  auto vid = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) net.position.push_back({double(c), double(r)});
  std::vector<int> perimeter;
  for (int c = 0; c < cols; ++c) perimeter.push_back(vid(0, c));
  for (int r = 1; r < rows; ++r) perimeter.push_back(vid(r, cols - 1));
  for (int c = cols - 2; c >= 0; --c) perimeter.push_back(vid(rows - 1, c));
  for (int r = rows - 2; r >= 1; --r) perimeter.push_back(vid(r, 0));
  for (int v : perimeter)
    if (unit(rng) < 0.6) net.boundary.push_back(v);
  while (net.boundary.size() < 2) {
    net.boundary.clear();
    for (int v : perimeter)
      if (unit(rng) < 0.6) net.boundary.push_back(v);
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols && unit(rng) < 0.85) net.edges.push_back({vid(r, c), vid(r, c + 1), gam(rng)});
      if (r + 1 < rows && unit(rng) < 0.85) net.edges.push_back({vid(r, c), vid(r + 1, c), gam(rng)});
    }
  const auto bmask = net.boundary_mask();
  auto add_vertex = [&](double x, double y) {
    net.position.push_back({x, y});
    return net.num_vertices++;
  };
  const int decorations = 1 + pick(std::max(1, max_vertices - net.num_vertices + 3));
  for (int d = 0; d < decorations; ++d) {
    const int kind = pick(6);
    const bool room = net.num_vertices < max_vertices;
    if (kind == 0 && !net.edges.empty()) {
      Edge e = net.edges[pick(static_cast<int>(net.edges.size()))];
      e.gamma = gam(rng);
      net.edges.push_back(e);
    } else if (kind == 1) {
      std::vector<int> inner;
      for (int v = 0; v < rows * cols; ++v)
        if (!bmask[v]) inner.push_back(v);
      if (!inner.empty()) {
        const int v = inner[pick(static_cast<int>(inner.size()))];
        net.edges.push_back({v, v, gam(rng)});
      }
    } else if (kind == 2 && room && !net.edges.empty()) {
      const int i = pick(static_cast<int>(net.edges.size()));
      const Edge e = net.edges[i];
      if (e.u == e.v) continue;
      const auto pu = net.position[e.u], pv = net.position[e.v];
      const int w = add_vertex(0.5 * (pu[0] + pv[0]), 0.5 * (pu[1] + pv[1]));
      net.edges[i] = {e.u, w, gam(rng)};
      net.edges.push_back({w, e.v, gam(rng)});
    } else if (kind == 3 && room) {
      const int v = pick(rows * cols);
      const int w = add_vertex(net.position[v][0] + 0.2, net.position[v][1] + 0.3);
      net.edges.push_back({v, w, gam(rng)});
    } else if (kind == 4 && room) {
      add_vertex(0.5, 0.5);
    } else if (kind == 5 && room && rows > 1 && cols > 1) {
      const int r = pick(rows - 1), c = pick(cols - 1);
      const int w = add_vertex(c + 0.5, r + 0.5);
      net.edges.push_back({w, vid(r, c), gam(rng)});
      net.edges.push_back({w, vid(r, c + 1), gam(rng)});
      net.edges.push_back({w, vid(r + 1, c + 1), gam(rng)});
    }
  }
  // Components without a boundary vertex lose their edges.
  {
    std::vector<int> comp(net.num_vertices, -1);
    const auto inc = net.incident_edges();
    for (int s = 0, nc = 0; s < net.num_vertices; ++s, ++nc) {
      if (comp[s] >= 0) continue;
      std::vector<int> st{s};
      comp[s] = nc;
      while (!st.empty()) {
        const int x = st.back();
        st.pop_back();
        for (int ei : inc[x]) {
          const int y = other_end(net.edges[ei], x);
          if (comp[y] < 0) {
            comp[y] = nc;
            st.push_back(y);
          }
        }
      }
    }
    std::set<int> good;
    for (int b : net.boundary) good.insert(comp[b]);
    std::vector<Edge> kept;
    for (const Edge& e : net.edges)
      if (good.count(comp[e.u])) kept.push_back(e);
    net.edges = kept;
  }
  return net;
}

}  // namespace latinv::network
