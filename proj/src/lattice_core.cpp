#include "latinv/lattice_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace latinv {

std::string to_string(LatticeKind k) {
  switch (k) {
    case LatticeKind::Hexagonal: return "hexagonal";
    case LatticeKind::Square: return "square";
    case LatticeKind::Triangular: return "triangular";
    case LatticeKind::Custom: return "custom";
  }
  return "custom";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
  if (s == "hexagonal" || s == "hex") return LatticeKind::Hexagonal;
  if (s == "square") return LatticeKind::Square;
  if (s == "triangular" || s == "tri") return LatticeKind::Triangular;
  if (s == "custom") return LatticeKind::Custom;
  throw std::invalid_argument("unsupported lattice kind: " + s);
}

namespace hex {

namespace {
constexpr Eis kP1{1, -1};
constexpr Eis kP2{1, 0};
constexpr std::array<Eis, 6> kCorner{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};
int mod3(int x) { return ((x % 3) + 3) % 3; }
}  // namespace

int sublattice(const Eis& e) { return mod3(e.b - e.a); }

Eis to_eis(const VertexId& v) {
  const Eis p = v.j == 1 ? kP1 : kP2;
  return {p.a + v.n1 - v.n2, p.b + v.n1 + 2 * v.n2};
}

VertexId from_eis(const Eis& e) {
  const int j = sublattice(e);
  if (j == 0) throw std::invalid_argument("hexagon centre is not a lattice vertex");
  const Eis d = e - (j == 1 ? kP1 : kP2);
  const int n2 = (d.b - d.a) / 3;
  return {j, d.a + n2, n2};
}

std::array<Eis, 3> neighbors(const Eis& e) {
  const int j = sublattice(e);
  if (j == 1) return {{e + Eis{0, 1}, e + Eis{-1, 0}, e + Eis{1, -1}}};
  if (j == 2) return {{e + Eis{1, 0}, e + Eis{-1, 1}, e + Eis{0, -1}}};
  throw std::invalid_argument("hexagon centre has no neighbours");
}

Eis cell_center(int n1, int n2) { return {n1 - n2, n1 + 2 * n2}; }

std::array<Eis, 6> cell_corners(const Eis& c) {
  std::array<Eis, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = c + kCorner[k];
  return out;
}

std::array<Eis, 3> incident_cells(const Eis& v) {
  const int j = sublattice(v);
  if (j == 1) return {{v - Eis{0, 1}, v - Eis{-1, 0}, v - Eis{1, -1}}};
  if (j == 2) return {{v - Eis{1, 0}, v - Eis{-1, 1}, v - Eis{0, -1}}};
  throw std::invalid_argument("hexagon centre has no incident cells");
}

std::array<double, 2> position(const Eis& e) {
  return {e.a + 0.5 * e.b, 0.5 * std::sqrt(3.0) * e.b};
}

}  // namespace hex

std::vector<VertexId> lattice_neighbors(LatticeKind kind, const VertexId& v) {
  switch (kind) {
    case LatticeKind::Hexagonal: {
      std::vector<VertexId> out;
      for (const Eis& e : hex::neighbors(hex::to_eis(v))) out.push_back(hex::from_eis(e));
      return out;
    }
    case LatticeKind::Square:
      return {{1, v.n1 + 1, v.n2}, {1, v.n1 - 1, v.n2}, {1, v.n1, v.n2 + 1}, {1, v.n1, v.n2 - 1}};
    case LatticeKind::Triangular:
      return {{1, v.n1 + 1, v.n2},     {1, v.n1 - 1, v.n2},     {1, v.n1, v.n2 + 1},
              {1, v.n1, v.n2 - 1},     {1, v.n1 + 1, v.n2 - 1}, {1, v.n1 - 1, v.n2 + 1}};
    case LatticeKind::Custom: break;
  }
  throw std::invalid_argument("custom graphs have no lattice rule");
}

int lattice_degree(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Hexagonal: return 3;
    case LatticeKind::Square: return 4;
    case LatticeKind::Triangular: return 6;
    case LatticeKind::Custom: break;
  }
  throw std::invalid_argument("custom graphs have no lattice rule");
}

std::array<double, 2> lattice_position(LatticeKind kind, const VertexId& v) {
  switch (kind) {
    case LatticeKind::Hexagonal: return hex::position(hex::to_eis(v));
    case LatticeKind::Triangular: return {v.n1 + 0.5 * v.n2, 0.5 * std::sqrt(3.0) * v.n2};
    default: return {double(v.n1), double(v.n2)};
  }
}

int LatticeGraph::index_of(const VertexId& v) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), v,
                             [](const auto& p, const VertexId& x) { return p.first < x; });
  if (it == lookup_.end() || !(it->first == v)) return -1;
  return it->second;
}

int LatticeGraph::num_edges() const {
  std::size_t s = 0;
  for (const auto& a : adj) s += a.size();
  return static_cast<int>(s / 2);
}

bool LatticeGraph::has_edge(int a, int b) const {
  return std::binary_search(adj[a].begin(), adj[a].end(), b);
}

std::array<double, 2> LatticeGraph::position(int i) const {
  return lattice_position(kind == LatticeKind::Custom ? LatticeKind::Square : kind, vertices[i]);
}

void LatticeGraph::check_invariants() const {
  for (int i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < adj[i].size(); ++k) {
      const int w = adj[i][k];
      if (w == i) throw std::logic_error("self-loop");
      if (k > 0 && adj[i][k - 1] == w) throw std::logic_error("multiple edge");
      if (!has_edge(w, i)) throw std::logic_error("asymmetric adjacency");
    }
  }
}

LatticeGraph make_graph(LatticeKind kind, std::vector<VertexId> vs,
                        const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  LatticeGraph g;
  g.kind = kind;
  g.vertices = vs;
  g.adj.assign(vs.size(), {});
  g.window_border.assign(vs.size(), 0);
  g.lookup_.reserve(vs.size());
  for (int i = 0; i < static_cast<int>(vs.size()); ++i) g.lookup_.emplace_back(vs[i], i);
  for (const auto& [u, v] : edges) {
    const int a = g.index_of(u), b = g.index_of(v);
    if (a < 0 || b < 0) throw std::invalid_argument("edge endpoint not among the vertices");
    if (a == b) throw std::invalid_argument("self-loop");
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  if (kind != LatticeKind::Custom) {
    const int full = lattice_degree(kind);
    for (int i = 0; i < g.size(); ++i) g.window_border[i] = g.degree(i) < full;
  }
  return g;
}

LatticeGraph induced_subgraph(LatticeKind kind, std::vector<VertexId> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const VertexId& v : vs) {
    for (const VertexId& w : lattice_neighbors(kind, v)) {
      if (v < w && std::binary_search(vs.begin(), vs.end(), w)) edges.emplace_back(v, w);
    }
  }
  return make_graph(kind, std::move(vs), edges);
}

LatticeGraph build_lattice(LatticeKind kind, const CellWindow& extent) {
  if (kind == LatticeKind::Custom) throw std::invalid_argument("unsupported kind for build_lattice");
  if (extent.n1_max < extent.n1_min || extent.n2_max < extent.n2_min)
    throw std::invalid_argument("empty cell window");
  const int sublattices = kind == LatticeKind::Hexagonal ? 2 : 1;
  std::vector<VertexId> vs;
  for (int n1 = extent.n1_min; n1 <= extent.n1_max; ++n1)
    for (int n2 = extent.n2_min; n2 <= extent.n2_max; ++n2)
      for (int j = 1; j <= sublattices; ++j) vs.push_back({j, n1, n2});
  LatticeGraph g = induced_subgraph(kind, std::move(vs));
  g.extent = extent;
  return g;
}

namespace {
std::vector<std::pair<VertexId, VertexId>> edge_list(const LatticeGraph& g) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (int i = 0; i < g.size(); ++i)
    for (int w : g.adj[i])
      if (i < w) out.emplace_back(g.vertices[i], g.vertices[w]);
  return out;
}

EditResult finish_edit(const LatticeGraph& src, std::vector<VertexId> vs,
                       const std::vector<std::pair<VertexId, VertexId>>& edges) {
  EditResult r{make_graph(src.kind, std::move(vs), edges), {}};
  r.graph.extent = src.extent;
  r.graph.deleted_edges = src.deleted_edges;
  r.graph.deleted_vertices = src.deleted_vertices;
  // Window-border flags are inherited: an edit is not a truncation.
  for (int i = 0; i < r.graph.size(); ++i) {
    const int k = src.index_of(r.graph.vertices[i]);
    r.graph.window_border[i] = src.window_border[k];
    if (r.graph.degree(i) == 0 && src.degree(k) > 0) r.isolated.push_back(r.graph.vertices[i]);
  }
  return r;
}
}  // namespace

EditResult delete_edges(const LatticeGraph& g,
                        const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::set<std::pair<int, int>> drop;
  for (const auto& [u, v] : edges) {
    const int a = g.index_of(u), b = g.index_of(v);
    if (a < 0 || b < 0 || !g.has_edge(a, b)) throw std::invalid_argument("nonexistent edge");
    drop.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<std::pair<VertexId, VertexId>> keep;
  for (int i = 0; i < g.size(); ++i)
    for (int w : g.adj[i])
      if (i < w && !drop.count({i, w})) keep.emplace_back(g.vertices[i], g.vertices[w]);
  EditResult r = finish_edit(g, g.vertices, keep);
  for (const auto& e : edges) r.graph.deleted_edges.push_back(e);
  return r;
}

EditResult delete_vertices(const LatticeGraph& g, const std::vector<VertexId>& vs) {
  std::vector<char> gone(g.size(), 0);
  for (const VertexId& v : vs) {
    const int i = g.index_of(v);
    if (i < 0) throw std::invalid_argument("nonexistent vertex");
    gone[i] = 1;
  }
  std::vector<VertexId> keep_v;
  for (int i = 0; i < g.size(); ++i)
    if (!gone[i]) keep_v.push_back(g.vertices[i]);
  std::vector<std::pair<VertexId, VertexId>> keep_e;
  for (const auto& [u, v] : edge_list(g))
    if (!gone[g.index_of(u)] && !gone[g.index_of(v)]) keep_e.emplace_back(u, v);
  EditResult r = finish_edit(g, keep_v, keep_e);
  for (const auto& v : vs) r.graph.deleted_vertices.push_back(v);
  return r;
}

Region close_region(const LatticeGraph& g, const std::vector<int>& omega_in) {
  if (omega_in.empty()) throw std::invalid_argument("empty region");
  Region r;
  r.graph = &g;
  r.role.assign(g.size(), 0);
  r.deg_d.assign(g.size(), 0);
  for (int i : omega_in) {
    if (i < 0 || i >= g.size()) throw std::invalid_argument("region vertex out of range");
    r.role[i] = 1;
  }
  // Connectivity of Omega inside g.
  {
    std::vector<char> seen(g.size(), 0);
    std::queue<int> q;
    q.push(omega_in.front());
    seen[omega_in.front()] = 1;
    int count = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      ++count;
      for (int w : g.adj[v])
        if (r.role[w] == 1 && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
    }
    std::set<int> uniq(omega_in.begin(), omega_in.end());
    if (count != static_cast<int>(uniq.size())) throw std::invalid_argument("region is disconnected");
  }
  for (int i = 0; i < g.size(); ++i) {
    if (r.role[i] == 1) {
      r.interior.push_back(i);
      for (int w : g.adj[i])
        if (r.role[w] == 0) r.role[w] = 2;
    }
  }
  for (int i = 0; i < g.size(); ++i) {
    if (r.role[i] == 2) r.boundary.push_back(i);
  }
  for (int i : r.interior) r.deg_d[i] = g.degree(i);
  for (int i : r.boundary)
    for (int w : g.adj[i]) r.deg_d[i] += r.role[w] == 1;
  return r;
}

Region close_region(const LatticeGraph& g, const std::vector<VertexId>& omega) {
  std::vector<int> idx;
  for (const VertexId& v : omega) {
    const int i = g.index_of(v);
    if (i < 0) throw std::invalid_argument("region vertex not in graph");
    idx.push_back(i);
  }
  return close_region(g, idx);
}

std::complex<double> GridFunction::at(int i) const {
  if (i < 0 || i >= graph_size() || !defined_[i]) throw std::out_of_range("grid function undefined at vertex");
  return values_[i];
}

GridFunction laplacian(const LatticeGraph& g, const GridFunction& u, const std::vector<int>& at) {
  GridFunction out(g.size());
  for (int v : at) {
    if (g.degree(v) == 0) throw std::invalid_argument("Laplacian at an isolated vertex");
    std::complex<double> s = 0;
    for (int w : g.adj[v]) {
      if (!u.defined(w)) throw std::out_of_range("missing neighbour value");
      s += u.at(w);
    }
    out.set(v, s / double(g.degree(v)));
  }
  return out;
}

GridFunction laplacian(const Region& r, const GridFunction& u) {
  return laplacian(*r.graph, u, r.interior);
}

GridFunction normal_derivative(const Region& r, const GridFunction& u, BoundaryDegreeRule rule) {
  const LatticeGraph& g = *r.graph;
  GridFunction out(g.size());
  for (int v : r.boundary) {
    std::complex<double> s = 0;
    for (int w : g.adj[v])
      if (r.is_interior(w)) s += u.at(w);
    out.set(v, -s / double(r.boundary_degree(v, rule)));
  }
  return out;
}

std::complex<double> inner(const GridFunction& f, const GridFunction& g, const std::vector<int>& set,
                           const std::function<double(int)>& weight) {
  std::complex<double> s = 0;
  for (int v : set) s += weight(v) * f.at(v) * std::conj(g.at(v));
  return s;
}

std::complex<double> inner_unweighted(const GridFunction& f, const GridFunction& g,
                                      const std::vector<int>& set) {
  return inner(f, g, set, [](int) { return 1.0; });
}

GreenIdentity green_identity(const Region& r, const GridFunction& f, const GridFunction& g) {
  const GridFunction lf = laplacian(r, f), lg = laplacian(r, g);
  const GridFunction nf = normal_derivative(r, f), ng = normal_derivative(r, g);
  auto w = [&](int v) { return double(r.deg_d[v]); };
  GreenIdentity out;
  out.lhs = inner(lf, g, r.interior, w) - inner(f, lg, r.interior, w);
  out.rhs = inner(nf, g, r.boundary, w) - inner(f, ng, r.boundary, w);
  double scale = 1.0;
  for (int v : r.interior) scale = std::max(scale, std::abs(f.at(v)) * std::abs(g.at(v)) * w(v));
  out.residual = std::abs(out.lhs - out.rhs) / scale;
  return out;
}

nlohmann::json graph_to_json(const LatticeGraph& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind);
  j["extent"] = {g.extent.n1_min, g.extent.n1_max, g.extent.n2_min, g.extent.n2_max};
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertices) vs.push_back({v.j, v.n1, v.n2});
  auto& de = j["deleted_edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.deleted_edges) de.push_back({{a.j, a.n1, a.n2}, {b.j, b.n1, b.n2}});
  auto& dv = j["deleted_vertices"] = nlohmann::json::array();
  for (const auto& v : g.deleted_vertices) dv.push_back({v.j, v.n1, v.n2});
  if (g.kind == LatticeKind::Custom) {
    auto& ed = j["edges"] = nlohmann::json::array();
    for (int i = 0; i < g.size(); ++i)
      for (int w : g.adj[i])
        if (i < w) ed.push_back({i, w});
  }
  return j;
}

namespace {
VertexId vid(const nlohmann::json& a) { return {a.at(0).get<int>(), a.at(1).get<int>(), a.at(2).get<int>()}; }
}  // namespace

LatticeGraph graph_from_json(const nlohmann::json& j) {
  const LatticeKind kind = lattice_kind_from_string(j.at("kind").get<std::string>());
  std::vector<VertexId> vs;
  for (const auto& a : j.at("vertices")) vs.push_back(vid(a));
  LatticeGraph g;
  if (kind == LatticeKind::Custom) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<VertexId> sorted = vs;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& e : j.at("edges")) edges.emplace_back(sorted.at(e.at(0).get<int>()), sorted.at(e.at(1).get<int>()));
    g = make_graph(kind, vs, edges);
  } else {
    g = induced_subgraph(kind, vs);
    std::vector<std::pair<VertexId, VertexId>> de;
    if (j.contains("deleted_edges"))
      for (const auto& e : j["deleted_edges"]) de.emplace_back(vid(e.at(0)), vid(e.at(1)));
    if (!de.empty()) g = delete_edges(g, de).graph;
    if (j.contains("deleted_vertices"))
      for (const auto& v : j["deleted_vertices"]) g.deleted_vertices.push_back(vid(v));
  }
  if (j.contains("extent") && j["extent"].size() == 4) {
    g.extent = {j["extent"][0].get<int>(), j["extent"][1].get<int>(), j["extent"][2].get<int>(),
                j["extent"][3].get<int>()};
  }
  return g;
}

}  // namespace latinv
