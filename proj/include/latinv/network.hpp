#pragma once
// Circular planar resistor networks: response matrices, the six elementary
// transformations, vertex-disjoint connections, criticality certificates,
// greedy reduction, and arc counting.
#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latinv/lattice_core.hpp"

namespace latinv::network {

struct Edge {
  int u = 0, v = 0;
  double gamma = 1.0;
};

// Vertices are 0..num_vertices-1. Boundary vertices are listed in cyclic order
// around the outer face; every other vertex is interior. Parallel edges and
// loops are allowed so that every transformation has a well-defined input.
struct ConductanceNetwork {
  int num_vertices = 0;
  std::vector<int> boundary;
  std::vector<Edge> edges;
  std::vector<std::array<double, 2>> position;  // empty, or one per vertex

  bool is_boundary(int v) const;
  std::vector<char> boundary_mask() const;
  // Loops count twice.
  int degree(int v) const;
  std::vector<std::vector<int>> incident_edges() const;
  // Throws std::invalid_argument on bad ids, repeated boundary entries or gamma <= 0.
  void validate() const;
};

class DisconnectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schur complement of the Kirchhoff matrix onto the boundary, rows in
// boundary order. Isolated interior vertices are ignored; a component with
// edges but no boundary vertex raises DisconnectedError.
Eigen::MatrixXd dn_map_res(const ConductanceNetwork& net);
double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class TransformKind { Point, Loop, DeadArm, Series, Parallel, YDelta };
std::string to_string(TransformKind k);

// Point, Series and YDelta act on `vertex`; Loop and DeadArm on `edge`;
// Parallel on the pair `edge`, `edge2`.
struct ElementaryTransform {
  TransformKind kind = TransformKind::Point;
  int vertex = -1;
  int edge = -1;
  int edge2 = -1;
};

class TransformError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ConductanceNetwork apply_transform(const ConductanceNetwork& net, const ElementaryTransform& t);
std::vector<ElementaryTransform> applicable_transforms(const ConductanceNetwork& net);

// Vertex-disjoint paths between boundary sets P and Q whose internal vertices
// are interior, from a unit-capacity vertex-split maximum flow.
struct PathSystem {
  int count = 0;
  std::vector<std::vector<int>> vertices;  // each path from a P vertex to a Q vertex
  std::vector<std::vector<int>> edges;     // edge indices along each path
};
PathSystem disjoint_paths(const ConductanceNetwork& net, const std::vector<int>& P, const std::vector<int>& Q);

// True when the circular pair (P, Q) is connected. In a circular planar
// network the flow paths then join p_i to q_i; the witness lists them in P order.
struct ConnectionResult {
  bool connected = false;
  std::vector<std::vector<int>> paths;
};
ConnectionResult is_connection(const ConductanceNetwork& net, const std::vector<int>& P, const std::vector<int>& Q);

// Contracting an edge keeps the boundary endpoint when there is one; the
// absorbed vertex stays behind as an isolated vertex so ids are stable.
ConductanceNetwork delete_edge(const ConductanceNetwork& net, int e);
ConductanceNetwork contract_edge(const ConductanceNetwork& net, int e);

enum class Removal { Delete, Contract };
enum class Tri { False, True, Unknown };
std::string to_string(Tri t);

// Either: an edge counts as critical when deleting it or contracting it breaks
// a connection. Both: each of the two removals must break one (contraction is
// not applied to edges joining two boundary vertices).
enum class CriticalityRule { Either, Both };

struct EdgeCertificate {
  int edge = -1;
  bool critical = false;
  Removal mode = Removal::Delete;
  std::vector<int> P, Q;  // broken connection, boundary vertex ids
  std::string note;
};

struct CriticalityOptions {
  CriticalityRule rule = CriticalityRule::Either;
  int exhaustive_boundary_limit = 14;  // enumerate every circular pair up to this boundary size
  long long flow_budget = 5'000'000;
};

struct CriticalityResult {
  Tri verdict = Tri::Unknown;
  std::vector<EdgeCertificate> certificates;  // one per edge
  long long flows = 0;
  std::string reason;
};
CriticalityResult is_critical(const ConductanceNetwork& net, int k_max, const CriticalityOptions& opt = {});

// Boundary-to-boundary simple paths whose internal vertices are distinct
// interior vertices, counted once per edge sequence and unordered endpoints.
struct ArcCount {
  long long count = 0;
  bool exact = true;
};
ArcCount count_arcs(const ConductanceNetwork& net, long long budget = 100'000'000);

struct ReduceOptions {
  int max_steps = 10'000;
  long long arc_budget = 5'000'000;
  bool check_dn = true;
};
struct ReductionStep {
  ElementaryTransform transform;
  int vertices = 0, edges = 0;
  ArcCount arcs;
  double dn_change = 0.0;  // relative change of the response matrix, when checked
};
struct ReductionResult {
  ConductanceNetwork net;
  std::vector<ReductionStep> steps;
  bool complete = true;  // false when the step budget ran out
};
// Applies Point, Loop, DeadArm, Series and Parallel while any applies, then
// the first Y-Delta move that leads to an unseen graph without raising the
// arc count, and repeats.
ReductionResult reduce(const ConductanceNetwork& net, const ReduceOptions& opt = {});

std::uint64_t network_hash(const ConductanceNetwork& net);

nlohmann::json to_json(const ConductanceNetwork& net);
ConductanceNetwork network_from_json(const nlohmann::json& j);

// Hexagonal fixtures. Cells are hexagon centres in Eisenstein coordinates.
std::vector<Eis> honeycomb_cells(int n);  // cells within cell distance n-1 of the origin cell
// The polygon with boundary: all cell edges, plus a pendant boundary vertex at
// every vertex of degree 2.
ConductanceNetwork polygon_network(const std::vector<Eis>& cells);
// Only the peripheral cycle, with the same pendants.
ConductanceNetwork outer_wall_network(const std::vector<Eis>& cells);
ConductanceNetwork honeycomb_network(int n);
ConductanceNetwork parallelogram_network(int N);

// Grid-based circular planar network decorated with loops, parallel edges,
// series vertices, dead arms and isolated vertices; at most max_vertices.
ConductanceNetwork random_circular_network(std::mt19937_64& rng, int max_vertices = 30);

}  // namespace latinv::network
