#pragma once
// Finite windows of periodic lattices, graph edits, interior/boundary regions,
// the degree-normalized Laplacian, the normal derivative and Green's identity.
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace latinv {

enum class LatticeKind { Hexagonal, Square, Triangular, Custom };

std::string to_string(LatticeKind k);
LatticeKind lattice_kind_from_string(const std::string& s);

// Vertex a = p_j + n1*v1 + n2*v2. Ordering is lexicographic on (n1, n2, j).
struct VertexId {
  int j = 1;
  int n1 = 0;
  int n2 = 0;
  friend bool operator==(const VertexId&, const VertexId&) = default;
  friend bool operator<(const VertexId& a, const VertexId& b) {
    if (a.n1 != b.n1) return a.n1 < b.n1;
    if (a.n2 != b.n2) return a.n2 < b.n2;
    return a.j < b.j;
  }
};

struct VertexIdHash {
  std::size_t operator()(const VertexId& v) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(v.n1);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(v.n2);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(v.j);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// Eisenstein integer a + b*w with w = exp(i*pi/3). Hexagonal lattice vertices
// live on the classes (b - a) mod 3 = 1 (sublattice 1) and 2 (sublattice 2);
// class 0 points are hexagon centres.
struct Eis {
  int a = 0;
  int b = 0;
  friend bool operator==(const Eis&, const Eis&) = default;
  friend auto operator<=>(const Eis&, const Eis&) = default;
  Eis operator+(const Eis& o) const { return {a + o.a, b + o.b}; }
  Eis operator-(const Eis& o) const { return {a - o.a, b - o.b}; }
  Eis operator*(int k) const { return {a * k, b * k}; }
};

struct EisHash {
  std::size_t operator()(const Eis& e) const noexcept {
    return VertexIdHash{}(VertexId{0, e.a, e.b});
  }
};

namespace hex {
// Sublattice of an Eisenstein point: 1, 2, or 0 for a hexagon centre.
int sublattice(const Eis& e);
Eis to_eis(const VertexId& v);
VertexId from_eis(const Eis& e);  // throws for hexagon centres
std::array<Eis, 3> neighbors(const Eis& e);
// Centre of the hexagon cell n, and its six corners in counterclockwise order.
Eis cell_center(int n1, int n2);
std::array<Eis, 6> cell_corners(const Eis& centre);
// Cells (as centres) incident to a lattice vertex.
std::array<Eis, 3> incident_cells(const Eis& v);
// Level functions: s = x1 + sqrt3 x2, t = x1 - sqrt3 x2, x1 doubled.
inline int level_s(const Eis& e) { return e.a + 2 * e.b; }
inline int level_t(const Eis& e) { return e.a - e.b; }
inline int level_x(const Eis& e) { return 2 * e.a + e.b; }
// Counterclockwise rotation by 60 degrees about the origin.
inline Eis rot60(const Eis& e) { return {-e.b, e.a + e.b}; }
std::array<double, 2> position(const Eis& e);
}  // namespace hex

struct CellWindow {
  int n1_min = 0, n1_max = 0, n2_min = 0, n2_max = 0;
};

class LatticeGraph {
 public:
  LatticeKind kind = LatticeKind::Custom;
  CellWindow extent{};
  std::vector<VertexId> vertices;        // sorted
  std::vector<std::vector<int>> adj;     // sorted neighbour indices
  std::vector<char> window_border;       // lattice degree exceeds window degree
  std::vector<std::pair<VertexId, VertexId>> deleted_edges;
  std::vector<VertexId> deleted_vertices;

  int size() const { return static_cast<int>(vertices.size()); }
  int index_of(const VertexId& v) const;  // -1 when absent
  int degree(int i) const { return static_cast<int>(adj[i].size()); }
  int num_edges() const;
  bool has_edge(int a, int b) const;
  std::array<double, 2> position(int i) const;
  // Throws std::logic_error if adjacency is not simple and symmetric.
  void check_invariants() const;

 private:
  friend LatticeGraph make_graph(LatticeKind, std::vector<VertexId>,
                                 const std::vector<std::pair<VertexId, VertexId>>&);
  std::vector<std::pair<VertexId, int>> lookup_;  // sorted by VertexId
};

// Neighbours of v in the infinite periodic lattice.
std::vector<VertexId> lattice_neighbors(LatticeKind kind, const VertexId& v);
int lattice_degree(LatticeKind kind);
std::array<double, 2> lattice_position(LatticeKind kind, const VertexId& v);

LatticeGraph build_lattice(LatticeKind kind, const CellWindow& extent);
// Subgraph of the periodic lattice induced on the given vertices.
LatticeGraph induced_subgraph(LatticeKind kind, std::vector<VertexId> vs);
// Custom graph from an explicit edge list over the given vertices.
LatticeGraph make_graph(LatticeKind kind, std::vector<VertexId> vs,
                        const std::vector<std::pair<VertexId, VertexId>>& edges);

struct EditResult {
  LatticeGraph graph;
  std::vector<VertexId> isolated;  // vertices left with no edges
};
EditResult delete_edges(const LatticeGraph& g,
                        const std::vector<std::pair<VertexId, VertexId>>& edges);
EditResult delete_vertices(const LatticeGraph& g, const std::vector<VertexId>& vs);

enum class BoundaryDegreeRule { RegionDegree, Unit };

struct Region {
  const LatticeGraph* graph = nullptr;
  std::vector<int> interior;  // sorted graph indices
  std::vector<int> boundary;  // sorted graph indices
  std::vector<int> deg_d;     // per graph vertex, 0 outside D
  std::vector<signed char> role;  // 1 interior, 2 boundary, 0 outside

  bool is_interior(int i) const { return role[i] == 1; }
  bool is_boundary(int i) const { return role[i] == 2; }
  // Boundary degree under the chosen rule (Unit gives 1 everywhere).
  int boundary_degree(int i, BoundaryDegreeRule rule) const {
    return rule == BoundaryDegreeRule::Unit ? 1 : deg_d[i];
  }
};

Region close_region(const LatticeGraph& g, const std::vector<int>& omega);
Region close_region(const LatticeGraph& g, const std::vector<VertexId>& omega);

// Function on a declared vertex set of a graph.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(int graph_size) : values_(graph_size), defined_(graph_size, 0) {}
  void set(int i, std::complex<double> v) {
    values_[i] = v;
    defined_[i] = 1;
  }
  bool defined(int i) const { return defined_[i] != 0; }
  std::complex<double> at(int i) const;
  int graph_size() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<std::complex<double>> values_;
  std::vector<char> defined_;
};

// (Delta u)(v) = average of u over the graph neighbours of v, for v in `at`.
GridFunction laplacian(const LatticeGraph& g, const GridFunction& u, const std::vector<int>& at);
GridFunction laplacian(const Region& r, const GridFunction& u);
// (d_nu u)(v) = -(1/deg_D v) * sum of u over interior neighbours, v on the boundary.
GridFunction normal_derivative(const Region& r, const GridFunction& u,
                               BoundaryDegreeRule rule = BoundaryDegreeRule::RegionDegree);

// Weighted inner product sum w(v) f(v) conj(g(v)) over `set`.
std::complex<double> inner(const GridFunction& f, const GridFunction& g, const std::vector<int>& set,
                           const std::function<double(int)>& weight);
std::complex<double> inner_unweighted(const GridFunction& f, const GridFunction& g,
                                      const std::vector<int>& set);

struct GreenIdentity {
  std::complex<double> lhs, rhs;
  double residual;
};
// (Df,g)_Omega - (f,Dg)_Omega versus (d_nu f,g)_bd - (f,d_nu g)_bd, with degree weights.
GreenIdentity green_identity(const Region& r, const GridFunction& f, const GridFunction& g);

nlohmann::json graph_to_json(const LatticeGraph& g);
LatticeGraph graph_from_json(const nlohmann::json& j);

}  // namespace latinv
