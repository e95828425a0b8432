#include "latinv/parallelogram.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace latinv {

std::vector<Eis> parallelogram_cells(int N) {
  std::vector<Eis> out;
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = 0; n2 <= N; ++n2) out.push_back(hex::cell_center(n1, n2));
  return out;
}

std::vector<Eis> vertices_of_cells(const std::vector<Eis>& centres) {
  std::set<Eis> vs;
  for (const Eis& c : centres)
    for (const Eis& v : hex::cell_corners(c)) vs.insert(v);
  return {vs.begin(), vs.end()};
}

int HexParallelogram::index(const Eis& e) const {
  if (hex::sublattice(e) == 0) return -1;
  return graph->index_of(hex::from_eis(e));
}

HexParallelogram build_parallelogram(int N) {
  if (N < 1) throw std::invalid_argument("parallelogram size must be at least 1");
  const std::vector<Eis> inner = vertices_of_cells(parallelogram_cells(N));
  const std::set<Eis> inner_set(inner.begin(), inner.end());
  std::set<Eis> pendants;
  for (const Eis& v : inner) {
    int deg = 0;
    Eis out{};
    for (const Eis& w : hex::neighbors(v)) {
      if (inner_set.count(w)) ++deg; else out = w;
    }
    if (deg == 2) pendants.insert(out);
  }
  std::vector<VertexId> ids;
  for (const Eis& v : inner) ids.push_back(hex::from_eis(v));
  for (const Eis& v : pendants) ids.push_back(hex::from_eis(v));
  // Only the pendant edges join the boundary to the interior; edges among
  // pendant vertices never arise.
  auto g = std::make_shared<LatticeGraph>(induced_subgraph(LatticeKind::Hexagonal, ids));
  HexParallelogram par;
  par.N = N;
  par.graph = g;
  std::vector<int> omega;
  for (const Eis& v : inner) omega.push_back(g->index_of(hex::from_eis(v)));
  par.region = close_region(*g, omega);
  if (par.region.boundary.size() != pendants.size())
    throw std::logic_error("parallelogram boundary does not match the pendant set");

  auto idx = [&](Eis e) {
    const int i = par.index(e);
    if (i < 0 || !par.region.is_boundary(i)) throw std::logic_error("side vertex not on the boundary");
    return i;
  };
  const Eis v2{-1, 2}, diag{1, 1};
  const Eis beta0{-2, 0};
  par.left.push_back(idx({0, -2}));
  for (int k = 0; k <= N; ++k) par.left.push_back(idx(beta0 + v2 * k));
  const Eis r0 = Eis{2, 0} + diag * N;
  for (int k = 0; k <= N; ++k) par.right.push_back(idx(r0 + v2 * k));
  par.right.push_back(idx(r0 + v2 * N + Eis{-2, 2}));
  const Eis alpha0 = beta0 + v2 * N + Eis{0, 2};
  for (int k = 0; k <= N; ++k) par.top.push_back(idx(alpha0 + diag * k));
  for (int k = 0; k <= N; ++k) par.bottom.push_back(idx(Eis{2, -2} + diag * k));
  std::set<int> all;
  for (const auto* s : {&par.left, &par.right, &par.top, &par.bottom}) all.insert(s->begin(), s->end());
  if (all.size() != par.region.boundary.size() || static_cast<int>(all.size()) != 4 * N + 6)
    throw std::logic_error("boundary sides do not partition the boundary");
  par.rot.resize(g->size());
  for (int i = 0; i < g->size(); ++i) {
    const int j = par.index(par.half_turn(par.eis(i)));
    if (j < 0) throw std::logic_error("half-turn does not preserve the closure");
    par.rot[i] = j;
  }
  return par;
}

}  // namespace latinv
