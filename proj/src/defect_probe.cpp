#include "latinv/defect_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace latinv::defect {

namespace {

constexpr std::array<Eis, 4> kBasis{Eis{0, 0}, Eis{1, 1}, Eis{-1, 2}, Eis{-2, 1}};  // v1..v3 at 1..3

// Linear level functionals (ca, cb): phi(a, b) = ca a + cb b.
constexpr std::array<std::array<int, 2>, 6> kDir{{{1, 2}, {-1, -2}, {1, -1}, {-1, 1}, {2, 1}, {-2, -1}}};

int eval(const std::array<int, 2>& f, const Eis& v) { return f[0] * v.a + f[1] * v.b; }

// phi o R for the sixth-turn R(a, b) = (-b, a + b).
std::array<int, 2> compose_rot(const std::array<int, 2>& f) { return {f[1], f[1] - f[0]}; }

int direction_of(const std::array<int, 2>& f) {
  for (int d = 0; d < 6; ++d)
    if (kDir[d] == f) return d;
  throw std::logic_error("level functional is not one of the six directions");
}

// Cell coordinates (n1, n2) of a cell centre.
std::pair<int, int> cell_coords(const Eis& c) {
  const int n2 = (c.b - c.a) / 3;
  return {c.a + n2, n2};
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

bool HalfSpace::contains(const Eis& c) const {
  const Eis vi = kBasis.at(i), vj = kBasis.at(j);
  const int det = vi.a * vj.b - vi.b * vj.a;
  const int num = c.a * vj.b - c.b * vj.a;
  if (det == 0 || num % det != 0) throw std::invalid_argument("cell centre not in the span of the half-space basis");
  const int m = num / det;
  return sign > 0 ? m >= k : m <= k;
}

std::vector<Eis> polygon_cells(const std::vector<HalfSpace>& hs, int radius) {
  std::vector<Eis> out;
  for (int n1 = -radius; n1 <= radius; ++n1)
    for (int n2 = -radius; n2 <= radius; ++n2) {
      const Eis c = hex::cell_center(n1, n2);
      if (std::all_of(hs.begin(), hs.end(), [&](const HalfSpace& h) { return h.contains(c); })) out.push_back(c);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Eis> honeycomb_defect(const Eis& centre, int n) {
  std::vector<Eis> out;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      if (std::abs(a + b) <= n) out.push_back(centre + hex::cell_center(a, b));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Eis> parallelogram_defect(const Eis& corner, int w, int h) {
  std::vector<Eis> out;
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < h; ++b) out.push_back(corner + hex::cell_center(a, b));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Eis> Defect::cells() const {
  std::set<Eis> all;
  for (const auto& c : components) all.insert(c.begin(), c.end());
  return {all.begin(), all.end()};
}

void check_separated(const Defect& d) {
  std::vector<std::set<Eis>> vs;
  for (const auto& comp : d.components) {
    const auto v = vertices_of_cells(comp);
    vs.emplace_back(v.begin(), v.end());
  }
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      for (const Eis& v : vs[i])
        if (vs[j].count(v)) throw DefectPlacementError("defect components share a vertex");
}

std::vector<Eis> interior_vertices(const std::vector<Eis>& cells) {
  const std::set<Eis> cs(cells.begin(), cells.end());
  std::vector<Eis> out;
  for (const Eis& v : vertices_of_cells(cells)) {
    const auto inc = hex::incident_cells(v);
    if (std::all_of(inc.begin(), inc.end(), [&](const Eis& c) { return cs.count(c) > 0; })) out.push_back(v);
  }
  return out;
}

std::vector<std::pair<Eis, Eis>> interior_edges(const std::vector<Eis>& cells) {
  const std::set<Eis> cs(cells.begin(), cells.end());
  const auto verts = vertices_of_cells(cells);
  const std::set<Eis> vs(verts.begin(), verts.end());
  std::vector<std::pair<Eis, Eis>> out;
  for (const Eis& v : verts)
    for (const Eis& w : hex::neighbors(v)) {
      if (!(v < w) || !vs.count(w)) continue;
      int shared = 0;
      const auto cv = hex::incident_cells(v), cw = hex::incident_cells(w);
      for (const Eis& c : cv)
        if (cs.count(c) && std::find(cw.begin(), cw.end(), c) != cw.end()) ++shared;
      if (shared == 2) out.emplace_back(v, w);
    }
  return out;
}

DefectRegion build_defect_region(const HexParallelogram& par, const Defect& d) {
  check_separated(d);
  const std::vector<Eis> cells = d.cells();
  for (const Eis& c : cells) {
    if (hex::sublattice(c) != 0) throw DefectPlacementError("defect cell centre is not a hexagon centre");
    const auto [n1, n2] = cell_coords(c);
    if (n1 < 1 || n2 < 1 || n1 > par.N - 1 || n2 > par.N - 1)
      throw DefectPlacementError("defect cell touches the outer ring of the parallelogram");
  }
  const auto inner = interior_vertices(cells);
  const std::set<Eis> removed(inner.begin(), inner.end());
  std::vector<VertexId> drop;
  for (const Eis& v : inner) drop.push_back(hex::from_eis(v));
  EditResult ev = delete_vertices(*par.graph, drop);
  std::vector<std::pair<VertexId, VertexId>> drop_edges;
  for (const auto& [v, w] : interior_edges(cells))
    if (!removed.count(v) && !removed.count(w)) drop_edges.emplace_back(hex::from_eis(v), hex::from_eis(w));
  EditResult ee = delete_edges(ev.graph, drop_edges);
  if (!ev.isolated.empty() || !ee.isolated.empty()) throw DefectPlacementError("defect leaves an isolated vertex");
  DefectRegion dr;
  dr.removed_vertices = static_cast<int>(inner.size());
  dr.removed_edges = static_cast<int>(drop_edges.size());
  auto g = std::make_shared<LatticeGraph>(std::move(ee.graph));
  std::vector<VertexId> omega;
  for (int v : par.region.interior) {
    const VertexId id = par.graph->vertices[v];
    if (!removed.count(hex::to_eis(id))) omega.push_back(id);
  }
  dr.region = close_region(*g, omega);
  dr.graph = g;
  dr.region.graph = dr.graph.get();
  std::vector<VertexId> b0, b1;
  for (int v : par.region.boundary) b0.push_back(par.graph->vertices[v]);
  for (int v : dr.region.boundary) b1.push_back(g->vertices[v]);
  if (b0 != b1) throw std::logic_error("defect region boundary differs from the parallelogram boundary");
  for (const Eis& v : vertices_of_cells(cells))
    if (!removed.count(v)) dr.hole_boundary.push_back(g->index_of(hex::from_eis(v)));
  std::sort(dr.hole_boundary.begin(), dr.hole_boundary.end());
  return dr;
}

int direction_level(int dir, const Eis& v) { return eval(kDir.at(dir), v); }

std::string direction_name(int dir) {
  static const std::array<std::string, 6> names{"+s", "-s", "+t", "-t", "+x", "-x"};
  return names.at(dir);
}

bool HexHull::contains_vertex(const Eis& v) const {
  for (int d = 0; d < 6; ++d)
    if (direction_level(d, v) > h[d]) return false;
  return true;
}

std::vector<Eis> HexHull::cells(int radius) const {
  std::vector<Eis> out;
  for (int n1 = -radius; n1 <= radius; ++n1)
    for (int n2 = -radius; n2 <= radius; ++n2) {
      const Eis c = hex::cell_center(n1, n2);
      const auto corners = hex::cell_corners(c);
      if (std::all_of(corners.begin(), corners.end(), [&](const Eis& v) { return contains_vertex(v); }))
        out.push_back(c);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<HalfSpace> HexHull::half_spaces() const {
  // Every corner offset reaches level 2 in each direction. Pick i, j with the
  // functional vanishing on v_j and equal to +-3 on v_i.
  std::vector<HalfSpace> out;
  for (int d = 0; d < 6; ++d) {
    int i = 0, j = 0;
    for (int a = 1; a <= 3; ++a) {
      if (eval(kDir[d], kBasis[a]) == 0) j = a;
    }
    for (int a = 1; a <= 3; ++a)
      if (a != j) {
        i = a;
        break;
      }
    const int sigma = eval(kDir[d], kBasis[i]) / 3;
    const int bound = floor_div(h[d] - 2, 3);
    out.push_back(sigma > 0 ? HalfSpace{i, j, bound, -1} : HalfSpace{i, j, -bound, +1});
  }
  return out;
}

HexHull geometric_hull(const std::vector<Eis>& cells) {
  if (cells.empty()) throw std::invalid_argument("empty defect");
  HexHull hh;
  hh.h.fill(std::numeric_limits<int>::min());
  for (const Eis& v : vertices_of_cells(cells))
    for (int d = 0; d < 6; ++d) hh.h[d] = std::max(hh.h[d], direction_level(d, v));
  return hh;
}

int oracle_level(const std::vector<Eis>& cells, int direction) { return geometric_hull(cells).h.at(direction); }

Eis View::apply(const Eis& v) const {
  Eis p = v;
  for (int r = 0; r < ((rotation % 6) + 6) % 6; ++r) p = hex::rot60(p);
  return p + shift;
}

Defect transform(const Defect& d, const View& v) {
  Defect out;
  for (const auto& comp : d.components) {
    std::vector<Eis> c;
    for (const Eis& x : comp) c.push_back(v.apply(x));
    std::sort(c.begin(), c.end());
    out.components.push_back(std::move(c));
  }
  return out;
}

namespace {
double reach(const HexHull& h, int view_dir, int N) {
  switch (view_dir) {
    case 0: return h.h[0] - 3.0 * N;
    case 1: return h.h[1] + 3.0 * N;
    case 2: return h.h[2] + 1.5 * N;
    default: return h.h[3] - 1.5 * N;
  }
}
}  // namespace

std::optional<View> centred_view(const HexParallelogram& par, const Defect& d, int rotation, int view_dir) {
  const int N = par.N;
  std::optional<View> best;
  std::pair<double, double> best_score{-1e300, -1e300};
  for (int n1 = -3 * N; n1 <= 3 * N; ++n1)
    for (int n2 = -3 * N; n2 <= 3 * N; ++n2) {
      const View v{rotation, hex::cell_center(n1, n2)};
      const auto cells = transform(d, v).cells();
      const bool fits = std::all_of(cells.begin(), cells.end(), [&](const Eis& c) {
        const auto [m1, m2] = cell_coords(c);
        return m1 >= 1 && m2 >= 1 && m1 <= N - 1 && m2 <= N - 1;
      });
      if (!fits) continue;
      const HexHull h = geometric_hull(cells);
      const std::pair<double, double> score{
          reach(h, view_dir, N), std::min({reach(h, 0, N), reach(h, 1, N), reach(h, 2, N), reach(h, 3, N)})};
      if (score > best_score) {
        best_score = score;
        best = v;
      }
    }
  return best;
}

namespace {
Potential<quad> free_potential(std::size_t n, double lambda) {
  return Potential<quad>{std::vector<quad>(n, -quad(lambda) - quad(1))};
}
}  // namespace

DNMap<quad> free_dn_map(const HexParallelogram& par, double lambda) {
  return dn_map(par.region, free_potential(par.region.interior.size(), lambda), quad(lambda), Convention::Modified);
}

DNMap<quad> defect_dn_map(const HexParallelogram& par, const DefectRegion& dr, double lambda) {
  const DNMap<quad> dn =
      dn_map(dr.region, free_potential(dr.region.interior.size(), lambda), quad(lambda), Convention::Modified);
  return align_to(par, dn);
}

EnergyCheck check_energy(const HexParallelogram& par, const DefectRegion& dr, double lambda) {
  EnergyCheck ec;
  const auto a = assemble(par.region, free_potential(par.region.interior.size(), lambda), Convention::Modified);
  const auto b = assemble(dr.region, free_potential(dr.region.interior.size(), lambda), Convention::Modified);
  const auto ra = is_regular(a), rb = is_regular(b);
  ec.free_ratio = ra.ratio;
  ec.defect_ratio = rb.ratio;
  if (std::abs(lambda) < 1e-12) ec.reason = "lambda is zero";
  else if (!ra.regular) ec.reason = "lambda is a Dirichlet eigenvalue of the free problem";
  else if (!rb.regular) ec.reason = "lambda is a Dirichlet eigenvalue of the defect problem";
  ec.ok = ec.reason.empty();
  return ec;
}

const std::vector<double>& lambda_retry_list() {
  static const std::vector<double> list{0.3, 0.45, -0.35, 0.6, -0.55, 0.15, 0.75};
  return list;
}

std::optional<Vec<quad>> probing_data(const HexParallelogram& par, const DNMap<quad>& free_dn, const ProbeLine& line) {
  auto data = probe_boundary_data<quad>(par, line);
  if (!data) return std::nullopt;
  const ProbeFrame fr{&par, line.frame};
  const ProbeGeometry pg = probe_geometry(par, line);
  std::vector<int> pos(par.graph->size(), -1);
  for (std::size_t k = 0; k < par.region.boundary.size(); ++k) pos[par.region.boundary[k]] = static_cast<int>(k);
  std::vector<int> neu_pos, free_pos;
  for (int v : pg.neu_side) neu_pos.push_back(pos[fr.orig(v)]);
  for (int v : pg.free_side) free_pos.push_back(pos[fr.orig(v)]);
  return complete_boundary_data<quad>(free_dn.m, neu_pos, free_pos, data->first, Vec<quad>::Zero(neu_pos.size()));
}

namespace {

std::vector<int> sweep_levels(const HexParallelogram& par, Family family) {
  std::set<int> levels;
  for (int v : par.region.interior) {
    const Eis e = par.eis(v);
    if (family == Family::A && hex::sublattice(e) == 1) levels.insert(hex::level_s(e));
    if (family == Family::B && hex::sublattice(e) == 2) levels.insert(hex::level_t(e));
  }
  std::vector<int> out(levels.begin(), levels.end());
  if (family == Family::A) std::reverse(out.begin(), out.end());  // A: downward, B: upward
  return out;
}

double inf_norm(const Vec<quad>& v) {
  quad m(0);
  for (int i = 0; i < v.size(); ++i) m = std::max<quad>(m, scalar_abs(quad(v(i))));
  return to_double(m);
}

}  // namespace

ProbeReport detect_line(const HexParallelogram& par, const DNMap<quad>& def_dn, const DNMap<quad>& free_dn,
                        Family family, int frame, const DetectOptions& opt) {
  ProbeReport rep;
  rep.family = family;
  rep.frame = frame;
  for (int level : sweep_levels(par, family)) {
    const ProbeLine line{family, frame, level};
    const auto f = probing_data(par, free_dn, line);
    if (!f) continue;
    const double fn = inf_norm(*f);
    const Vec<quad> diff = def_dn.m * *f - free_dn.m * *f;
    LineProbe lp;
    lp.level = level;
    lp.difference = inf_norm(diff) / fn;
    lp.differs = lp.difference > opt.tol;
    rep.sweep.push_back(lp);
    if (lp.differs) {
      rep.found = true;
      rep.first_difference = level;
      rep.touching_level = family == Family::A ? level + 3 : level - 3;
      rep.margin = lp.difference;
      return rep;
    }
    rep.max_equal = std::max(rep.max_equal, lp.difference);
  }
  return rep;
}

namespace {

// Sweep (family, frame) measuring the view functional view_dir.
std::pair<Family, int> sweep_for(int view_dir) {
  switch (view_dir) {
    case 0: return {Family::A, 0};
    case 1: return {Family::A, 1};
    case 2: return {Family::B, 1};
    default: return {Family::B, 0};
  }
}

int original_direction(int view_dir, int rotation) {
  std::array<int, 2> f = kDir[view_dir];
  for (int r = 0; r < ((rotation % 6) + 6) % 6; ++r) f = compose_rot(f);
  return direction_of(f);
}

DirectionResult measure(const HexParallelogram& par, const DNMap<quad>& free_dn, const ViewData& vd, int view_dir,
                        const DetectOptions& opt) {
  const auto [fam, frame] = sweep_for(view_dir);
  DirectionResult dres;
  dres.direction = original_direction(view_dir, vd.view.rotation);
  dres.report = detect_line(par, vd.defect_dn, free_dn, fam, frame, opt);
  if (dres.report.found) {
    const int t = dres.report.touching_level;
    const int N = par.N;
    int view_level = 0;
    if (fam == Family::A) view_level = frame == 0 ? t : t - 6 * N;
    else view_level = frame == 0 ? -t : -t - 3 * N;
    dres.found = true;
    dres.level = view_level - eval(kDir[view_dir], vd.view.shift);
  }
  return dres;
}

}  // namespace

HullResult convex_hull_of_defect(const HexParallelogram& par, const DNMap<quad>& free_dn,
                                 const std::vector<ViewData>& views, const DetectOptions& opt) {
  HullResult res;
  res.hull.h.fill(std::numeric_limits<int>::max());
  std::array<bool, 6> have{};
  for (const ViewData& vd : views)
    for (int view_dir = 0; view_dir < 4; ++view_dir) {
      const int dir = original_direction(view_dir, vd.view.rotation);
      if (have[dir]) continue;
      DirectionResult dres = measure(par, free_dn, vd, view_dir, opt);
      if (dres.found) {
        res.hull.h[dir] = dres.level;
        have[dir] = true;
      }
      res.directions.push_back(std::move(dres));
    }
  std::sort(res.directions.begin(), res.directions.end(), [](const DirectionResult& a, const DirectionResult& b) {
    return a.direction != b.direction ? a.direction < b.direction : a.found > b.found;
  });
  std::vector<DirectionResult> unique;
  for (auto& d : res.directions)
    if (unique.empty() || unique.back().direction != d.direction) unique.push_back(std::move(d));
  res.directions = std::move(unique);
  res.complete = std::all_of(have.begin(), have.end(), [](bool b) { return b; });
  return res;
}

ProbeRun probe_defect(const HexParallelogram& par, const Defect& d, const DetectOptions& opt) {
  static constexpr std::array<int, 6> kRotations{0, 1, 5, 2, 4, 3};
  ProbeRun run;
  std::vector<std::string> rejected;
  for (double lambda : lambda_retry_list()) {
    run = ProbeRun{};
    run.rejected = rejected;
    run.lambda = lambda;
    const DNMap<quad> free_dn = free_dn_map(par, lambda);
    std::vector<ViewData> cache;
    std::string failure;
    std::array<bool, 6> have{};
    run.hull.hull.h.fill(std::numeric_limits<int>::max());
    std::vector<DirectionResult> results(6);
    for (int dir = 0; dir < 6 && failure.empty(); ++dir) {
      // The placement as given comes first; repositioned copies only when its
      // sweep cannot reach the defect or the direction needs a rotation.
      std::vector<std::pair<View, int>> candidates;
      for (int view_dir = 0; view_dir < 4; ++view_dir)
        if (original_direction(view_dir, 0) == dir) candidates.emplace_back(View{}, view_dir);
      for (int rot : kRotations)
        for (int view_dir = 0; view_dir < 4; ++view_dir)
          if (original_direction(view_dir, rot) == dir)
            if (auto v = centred_view(par, d, rot, view_dir)) candidates.emplace_back(*v, view_dir);
      for (const auto& [view, view_dir] : candidates) {
        auto it = std::find_if(cache.begin(), cache.end(), [&](const ViewData& c) { return c.view == view; });
        if (it == cache.end()) {
          const DefectRegion dr = build_defect_region(par, transform(d, view));
          const EnergyCheck ec = check_energy(par, dr, lambda);
          if (!ec.ok) {
            failure = ec.reason;
            break;
          }
          cache.push_back({view, defect_dn_map(par, dr, lambda)});
          it = cache.end() - 1;
        }
        DirectionResult dres = measure(par, free_dn, *it, view_dir, opt);
        if (dres.found || results[dir].report.sweep.empty()) results[dir] = dres;
        if (dres.found) {
          have[dir] = true;
          run.hull.hull.h[dir] = dres.level;
          if (std::find(run.views.begin(), run.views.end(), view) == run.views.end()) run.views.push_back(view);
          break;
        }
      }
    }
    if (!failure.empty()) {
      rejected.push_back(std::to_string(lambda) + ": " + failure);
      run.rejected = rejected;
      continue;
    }
    for (int dir = 0; dir < 6; ++dir) results[dir].direction = dir;
    run.hull.directions = std::move(results);
    run.hull.complete = std::all_of(have.begin(), have.end(), [](bool b) { return b; });
    return run;
  }
  return run;
}

}  // namespace latinv::defect
