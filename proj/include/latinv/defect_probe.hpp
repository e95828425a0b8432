#pragma once
// Defect detection in the hexagonal parallelogram. A defect is a union of
// convex cell polygons; the defect region keeps the peripheral edges of each
// polygon and drops its interior vertices and interior edges. Probing waves
// of the defect-free problem are compared through the two D-N maps, and the
// first line at which they differ fixes one supporting half-plane of the
// hexagonal convex hull.
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latinv/bvp.hpp"
#include "latinv/network.hpp"
#include "latinv/parallelogram.hpp"
#include "latinv/reconstruction.hpp"

namespace latinv::defect {

// Half-space H^(+-)_{i,j,k} of the cell lattice, i != j in {1,2,3}: the cells
// m v_i + l v_j + U_h with m >= k (sign +) or m <= k (sign -), l arbitrary.
// Cell centres are Eisenstein integers; v1 = (1,1), v2 = (-1,2), v3 = (-2,1).
struct HalfSpace {
  int i = 1, j = 2;
  int k = 0;
  int sign = +1;
  bool contains(const Eis& cell_centre) const;
};

// Cells of a finite intersection of half-spaces, searched within a box of
// cell coordinates |n1|, |n2| <= radius around the origin.
std::vector<Eis> polygon_cells(const std::vector<HalfSpace>& hs, int radius);

// Honeycomb of cell radius n about a centre: n = 1 is the seven-cell flower
// whose interior is one hexagon of vertices.
std::vector<Eis> honeycomb_defect(const Eis& centre, int n);
// Parallelogram block of cells centre + a v1 + b v2, 0 <= a < w, 0 <= b < h.
std::vector<Eis> parallelogram_defect(const Eis& corner, int w, int h);

struct Defect {
  std::vector<std::vector<Eis>> components;  // cell sets of the convex pieces
  std::vector<Eis> cells() const;
};
// Throws if two components share a vertex.
void check_separated(const Defect& d);

// Vertices with all three incident cells in D, and edges whose two adjacent
// cells both lie in D.
std::vector<Eis> interior_vertices(const std::vector<Eis>& cells);
std::vector<std::pair<Eis, Eis>> interior_edges(const std::vector<Eis>& cells);

struct DefectRegion {
  std::shared_ptr<const LatticeGraph> graph;
  Region region;                    // boundary is the parallelogram boundary
  std::vector<int> hole_boundary;   // remaining vertices of the defect cells
  int removed_vertices = 0;
  int removed_edges = 0;            // edges dropped between remaining vertices
};

class DefectPlacementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requires every defect cell to be a parallelogram cell at least one cell
// away from the outermost ring.
DefectRegion build_defect_region(const HexParallelogram& par, const Defect& d);

// Six level functions: 0:+s 1:-s 2:+t 3:-t 4:+x 5:-x.
int direction_level(int dir, const Eis& v);
std::string direction_name(int dir);

// Supporting levels h_d = max over the defect's vertices of the level function.
struct HexHull {
  std::array<int, 6> h{};
  bool contains_vertex(const Eis& v) const;
  // Cells all of whose corners satisfy every bound.
  std::vector<Eis> cells(int radius) const;
  std::vector<HalfSpace> half_spaces() const;
  friend bool operator==(const HexHull&, const HexHull&) = default;
};
HexHull geometric_hull(const std::vector<Eis>& cells);

// A view places the defect in the parallelogram after rotating it by
// `rotation` sixths of a turn about the origin and translating by a cell
// vector. The parallelogram's A lines then probe the rotated s level.
struct View {
  int rotation = 0;
  Eis shift{0, 0};
  Eis apply(const Eis& v) const;
  friend bool operator==(const View&, const View&) = default;
};
Defect transform(const Defect& d, const View& v);
// Shift for the given rotation that keeps the clearance of every cell and
// reaches furthest across the centre line of the sweep measuring `view_dir`
// (lines of one frame stop just past the centre). Ties go to the placement
// that reaches across all four senses.
std::optional<View> centred_view(const HexParallelogram& par, const Defect& d, int rotation, int view_dir);

// Modified-convention D-N maps of the problem -Delta u = lambda u with the
// free parallelogram and with the defect.
DNMap<quad> free_dn_map(const HexParallelogram& par, double lambda);
DNMap<quad> defect_dn_map(const HexParallelogram& par, const DefectRegion& dr, double lambda);

// Admissible energy: lambda != 0 and both Dirichlet problems uniquely solvable.
struct EnergyCheck {
  bool ok = false;
  double free_ratio = 0.0, defect_ratio = 0.0;
  std::string reason;
};
EnergyCheck check_energy(const HexParallelogram& par, const DefectRegion& dr, double lambda);
const std::vector<double>& lambda_retry_list();

// Full boundary trace f_k of the free probing solution along one line.
std::optional<Vec<quad>> probing_data(const HexParallelogram& par, const DNMap<quad>& free_dn, const ProbeLine& line);

struct LineProbe {
  int level = 0;               // frame level of the line
  double difference = 0.0;     // |Lambda_def f - Lambda_0 f|_inf / |f|_inf
  bool differs = false;
};

struct ProbeReport {
  Family family = Family::A;
  int frame = 0;
  std::vector<LineProbe> sweep;   // in sweep order
  bool found = false;
  int first_difference = 0;       // frame level of A_{m-1} (or B_{m-1})
  int touching_level = 0;         // frame level of the last line that meets D
  double margin = 0.0;            // relative difference at the first differing line
  double max_equal = 0.0;         // largest relative difference among equal lines
};

struct DetectOptions {
  double tol = 1e-8;  // relative to |f_k|_inf
};

// Sweeps lines inward from the far side of the zero half-plane and stops at
// the first line where the two D-N maps disagree on f_k.
ProbeReport detect_line(const HexParallelogram& par, const DNMap<quad>& def_dn, const DNMap<quad>& free_dn,
                        Family family, int frame, const DetectOptions& opt = {});

// Level of the touching line in the original coordinates of a view.
struct DirectionResult {
  int direction = 0;
  bool found = false;
  int level = 0;  // h_d in original coordinates
  ProbeReport report;
};

struct HullResult {
  HexHull hull;
  std::vector<DirectionResult> directions;  // six entries
  bool complete = false;
};

// Probe data per view: the two D-N maps of the parallelogram with the view's
// image of the defect. View 0 supplies +-s and +-t, a view rotated by one
// sixth of a turn supplies +-x.
struct ViewData {
  View view;
  DNMap<quad> defect_dn;
};
HullResult convex_hull_of_defect(const HexParallelogram& par, const DNMap<quad>& free_dn,
                                 const std::vector<ViewData>& views, const DetectOptions& opt = {});

// Full experiment. The defect as placed answers the four s and t directions
// whenever the sweeps reach it; otherwise, and for the two x directions, a
// rotated or shifted copy suited to the measuring sweep is used. Energies from
// lambda_retry_list are tried until the energy is admissible for every view used.
struct ProbeRun {
  HullResult hull;
  double lambda = 0.0;
  std::vector<View> views;
  std::vector<std::string> rejected;  // energies skipped, with the reason
};
ProbeRun probe_defect(const HexParallelogram& par, const Defect& d, const DetectOptions& opt = {});

// Expected touching level per direction from the cell geometry.
int oracle_level(const std::vector<Eis>& cells, int direction);

// Outer wall of a cell polygon, as a network with pendant boundary vertices.
inline network::ConductanceNetwork outer_wall(const std::vector<Eis>& cells) {
  return network::outer_wall_network(cells);
}

}  // namespace latinv::defect
