#pragma once
// The hexagonal parallelogram: the union of hexagon cells v(n), 0 <= n1,n2 <= N,
// with one pendant boundary vertex attached at each degree-2 vertex.
#include <memory>
#include <vector>

#include "latinv/lattice_core.hpp"

namespace latinv {

struct HexParallelogram {
  int N = 0;
  std::shared_ptr<const LatticeGraph> graph;  // interior plus boundary vertices
  Region region;
  // Boundary sides as graph indices, each listed in the order of its closed form:
  //   left   2w^4, beta_0..beta_N         (beta_k = -2 + k sqrt3 i)
  //   right  2 + N(1+w) + k sqrt3 i for k = 0..N, then the top corner
  //   top    alpha_k = beta_N + 2w + k(1+w), k = 0..N
  //   bottom 2w^5 + k(1+w), k = 0..N
  std::vector<int> left, right, top, bottom;
  std::vector<int> rot;  // graph index of the image under the half-turn symmetry

  Eis eis(int i) const { return hex::to_eis(graph->vertices[i]); }
  int index(const Eis& e) const;  // -1 when outside the closure
  // Half-turn about the centre; maps interior and boundary onto themselves.
  Eis half_turn(const Eis& e) const { return {-e.a, 3 * N - e.b}; }
};

HexParallelogram build_parallelogram(int N);

// Cells (as centres) of the parallelogram and the closed vertex set of a cell list.
std::vector<Eis> parallelogram_cells(int N);
std::vector<Eis> vertices_of_cells(const std::vector<Eis>& centres);

}  // namespace latinv
