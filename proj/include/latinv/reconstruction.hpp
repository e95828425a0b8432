#pragma once
// Potential reconstruction on the hexagonal parallelogram from the modified
// D-N map, by probing solutions that vanish on a half-plane and alternate
// +-1 along a diagonal line.
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latinv/bvp.hpp"
#include "latinv/parallelogram.hpp"

namespace latinv {

// A: lines x1 + sqrt3 x2 = const through sublattice-1 vertices, zero below.
// B: lines x1 - sqrt3 x2 = const through sublattice-2 vertices, zero above.
enum class Family { A, B };

struct ProbeLine {
  Family family = Family::A;
  int frame = 0;  // 0: as built, 1: after the half-turn
  int level = 0;  // value of the level function (in frame coordinates)
};

// Level of A_k (through alpha_k on the top side) and of B_l (through beta_l on the left side).
inline ProbeLine line_A(const HexParallelogram& par, int k) {
  return {Family::A, 0, hex::level_s(par.eis(par.top.at(k)))};
}
inline ProbeLine line_B(const HexParallelogram& par, int l) {
  return {Family::B, 0, hex::level_t(par.eis(par.left.at(l + 1)))};
}

// Per-probe geometry in frame coordinates. Graph index i in frame coordinates
// is the vertex `orig(i)` of the parallelogram as built.
struct ProbeFrame {
  const HexParallelogram* par;
  int frame;
  int orig(int i) const { return frame == 0 ? i : par->rot[i]; }
  Eis at(int i) const { return par->eis(i); }
};

struct ProbeGeometry {
  std::vector<int> free_side, neu_side;  // graph indices, frame coordinates
  Family family;
  int level;
  int level_of(const Eis& e) const { return family == Family::A ? hex::level_s(e) : hex::level_t(e); }
  bool in_zero(const Eis& e) const { return family == Family::A ? level_of(e) < level : level_of(e) > level; }
  bool on_line(const Eis& e) const { return level_of(e) == level; }
  // Sign (+1 / -1) of a line vertex relative to an anchor on the same line.
  static int parity(Family f, const Eis& x, const Eis& anchor) {
    const int steps = f == Family::A ? (x.a - anchor.a) / 2 : (x.a - anchor.a);
    return (steps % 2 == 0) ? 1 : -1;
  }
};

inline ProbeGeometry probe_geometry(const HexParallelogram& par, const ProbeLine& line) {
  ProbeGeometry pg;
  pg.family = line.family;
  pg.level = line.level;
  if (line.family == Family::A) {
    pg.free_side = par.right;
    pg.neu_side = par.left;
  } else {
    // The corner pendant at the foot of the right side joins the Neumann side
    // and beta_N joins the free side.
    pg.free_side = par.top;
    pg.free_side.push_back(par.left.back());
    pg.neu_side = par.bottom;
    pg.neu_side.push_back(par.right.front());
  }
  return pg;
}

template <class S>
struct ProbeSolution {
  ProbeLine line;
  std::vector<S> u;        // by graph index in frame coordinates
  std::vector<char> known;
  Vec<S> f;                // completed boundary data, boundary order of the region as built
  int anchor = -1;         // frame index of the anchor boundary vertex
  S pattern_error{};       // deviation of the completed data from the vanishing/alternating pattern
};

// Dirichlet data of the probe: +-1 on the line, 0 elsewhere, unknown (0) on
// the free side. Returns (data, anchor) or nullopt when the line has no
// boundary anchor off the free side.
template <class S>
std::optional<std::pair<Vec<S>, int>> probe_boundary_data(const HexParallelogram& par, const ProbeLine& line) {
  const ProbeFrame fr{&par, line.frame};
  const ProbeGeometry pg = probe_geometry(par, line);
  const Region& r = par.region;
  std::vector<char> is_free(par.graph->size(), 0);
  for (int v : pg.free_side) is_free[v] = 1;
  int anchor = -1;
  for (int v : r.boundary) {  // frame indices; r.boundary is invariant under the half-turn
    if (!is_free[v] && pg.on_line(fr.at(v))) {
      anchor = v;
      break;
    }
  }
  if (anchor < 0) return std::nullopt;
  Vec<S> f = Vec<S>::Zero(r.boundary.size());
  std::vector<int> pos(par.graph->size(), -1);
  for (std::size_t k = 0; k < r.boundary.size(); ++k) pos[r.boundary[k]] = static_cast<int>(k);
  for (int v : r.boundary) {
    if (is_free[v] || !pg.on_line(fr.at(v))) continue;
    f(pos[fr.orig(v)]) = S(ProbeGeometry::parity(pg.family, fr.at(v), fr.at(anchor)));
  }
  return std::make_pair(f, anchor);
}

// Probe solution from the D-N map alone. With `q_known` (by original graph
// index) the solution is continued through every centre whose potential is
// known; without it only the half-plane, the line, and the strip next to the
// boundary are filled in.
template <class S>
std::optional<ProbeSolution<S>> probe_solution_inverse(const HexParallelogram& par, const DNMap<S>& dn,
                                                       const ProbeLine& line,
                                                       const std::vector<std::optional<S>>* q_known = nullptr) {
  auto data = probe_boundary_data<S>(par, line);
  if (!data) return std::nullopt;
  const ProbeFrame fr{&par, line.frame};
  const ProbeGeometry pg = probe_geometry(par, line);
  const Region& r = par.region;
  const LatticeGraph& g = *par.graph;
  std::vector<int> pos(g.size(), -1);
  for (std::size_t k = 0; k < r.boundary.size(); ++k) pos[r.boundary[k]] = static_cast<int>(k);
  std::vector<int> neu_pos, free_pos;
  for (int v : pg.neu_side) neu_pos.push_back(pos[fr.orig(v)]);
  for (int v : pg.free_side) free_pos.push_back(pos[fr.orig(v)]);
  ProbeSolution<S> ps;
  ps.line = line;
  ps.anchor = data->second;
  ps.f = complete_boundary_data<S>(dn.m, neu_pos, free_pos, data->first, Vec<S>::Zero(neu_pos.size()));
  const Vec<S> lf = dn.m * ps.f;
  ps.u.assign(g.size(), S(0));
  ps.known.assign(g.size(), 0);
  S fmax(1);
  for (int k = 0; k < ps.f.size(); ++k) fmax = std::max<S>(fmax, scalar_abs(S(ps.f(k))));
  S pattern(0);
  for (int v : r.boundary) {  // frame index v, original fr.orig(v)
    const int k = pos[fr.orig(v)];
    ps.u[v] = ps.f(k);
    ps.known[v] = 1;
    for (int w : g.adj[v]) {
      if (!r.is_interior(w)) continue;
      ps.u[w] = ps.f(k) - lf(k);
      ps.known[w] = 1;
      const Eis e = fr.at(w);
      if (pg.in_zero(e)) pattern = std::max<S>(pattern, scalar_abs(ps.u[w]));
      if (pg.on_line(e))
        pattern = std::max<S>(pattern, scalar_abs(S(ps.u[w] - S(ProbeGeometry::parity(pg.family, e, fr.at(ps.anchor))))));
    }
    if (pg.in_zero(fr.at(v))) pattern = std::max<S>(pattern, scalar_abs(ps.u[v]));
  }
  ps.pattern_error = pattern / fmax;
  std::vector<std::optional<S>> coef(g.size());
  for (int v : r.interior) {
    const Eis e = fr.at(v);
    if (pg.in_zero(e)) {
      ps.u[v] = S(0);
      ps.known[v] = 1;
      coef[v] = S(1);
    } else if (pg.on_line(e)) {
      ps.u[v] = S(ProbeGeometry::parity(pg.family, e, fr.at(ps.anchor)));
      ps.known[v] = 1;
    }
    if (q_known && (*q_known)[fr.orig(v)]) coef[v] = S(1) + *(*q_known)[fr.orig(v)];
  }
  for (int v : r.boundary)
    if (pg.in_zero(fr.at(v))) ps.u[v] = S(0);
  propagate_four_point(g, column_order(g, r.interior), coef, ps.u, ps.known);
  return ps;
}

// Probe solution by a forward solve with the potential known (frame
// coordinates as in the inverse mode).
template <class S>
std::optional<ProbeSolution<S>> probe_solution_forward(const HexParallelogram& par, const Potential<S>& pot,
                                                       const ProbeLine& line) {
  const DNMap<S> dn = dn_map(par.region, pot, S(0), Convention::Modified);
  auto ps = probe_solution_inverse<S>(par, dn, line);
  if (!ps) return std::nullopt;
  const AssembledSystem<S> sys = assemble(par.region, pot, Convention::Modified);
  const Vec<S> u = solve_dirichlet(sys, ps->f);
  const ProbeFrame fr{&par, line.frame};
  const Region& r = par.region;
  std::vector<int> ipos(par.graph->size(), -1);
  for (std::size_t k = 0; k < r.interior.size(); ++k) ipos[r.interior[k]] = static_cast<int>(k);
  for (int v : r.interior) {
    ps->u[v] = u(ipos[fr.orig(v)]);
    ps->known[v] = 1;
  }
  return ps;
}

struct ReconstructionOptions {
  double pattern_tol = 1e-6;      // relative deviation allowed before a probe is skipped
  double final_min_abs = 0.05;    // smallest |u(c)| accepted in the general extraction pass
  bool verbose_log = true;
};

template <class S>
struct ReconstructionResult {
  std::vector<S> q;  // by interior order of par.region
  std::vector<S> v;  // Q + lambda + 1
  int probes_run = 0;
  int probes_skipped = 0;
  int general_extractions = 0;
  double rotation_consistency = 0.0;  // max disagreement when a known value is recomputed
  std::vector<std::string> log;
};

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Permutes a D-N map into the boundary order of the parallelogram.
template <class S>
DNMap<S> align_to(const HexParallelogram& par, const DNMap<S>& dn) {
  const Region& r = par.region;
  if (dn.boundary.size() != r.boundary.size()) throw std::invalid_argument("D-N map size does not match the boundary");
  std::vector<int> p(r.boundary.size());
  for (std::size_t k = 0; k < dn.boundary.size(); ++k) {
    const int gi = par.graph->index_of(dn.boundary[k]);
    auto it = std::lower_bound(r.boundary.begin(), r.boundary.end(), gi);
    if (gi < 0 || it == r.boundary.end() || *it != gi) throw std::invalid_argument("D-N map row is not a boundary vertex");
    p[k] = static_cast<int>(it - r.boundary.begin());
  }
  DNMap<S> out = dn;
  out.boundary.clear();
  for (int v : r.boundary) out.boundary.push_back(par.graph->vertices[v]);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) out.m(p[i], p[j]) = dn.m(i, j);
  return out;
}

template <class S>
ReconstructionResult<S> reconstruct_potential(const HexParallelogram& par, const DNMap<S>& dn_in, const S& lambda,
                                              const ReconstructionOptions& opt = {}) {
  if (dn_in.convention != Convention::Modified) throw std::invalid_argument("reconstruction expects the modified convention");
  const DNMap<S> dn = align_to(par, dn_in);
  const Region& r = par.region;
  const LatticeGraph& g = *par.graph;
  std::vector<std::optional<S>> q(g.size());
  ReconstructionResult<S> res;
  auto log = [&](const std::string& s) {
    if (opt.verbose_log) res.log.push_back(s);
  };
  auto all_known = [&](const ProbeSolution<S>& ps, int c) {
    for (int w : g.adj[c])
      if (!ps.known[w]) return false;
    return ps.known[c] != 0;
  };
  auto extract = [&](const ProbeSolution<S>& ps, int c) {
    S acc(0);
    for (int w : g.adj[c]) acc += ps.u[w];
    return acc / S(g.degree(c)) / ps.u[c] - S(1);
  };
  auto levels_for = [&](Family fam, int frame) {
    const ProbeFrame fr{&par, frame};
    std::vector<int> lv;
    for (int v : r.interior) {
      const Eis e = fr.at(v);
      if (hex::sublattice(e) != (fam == Family::A ? 1 : 2)) continue;
      lv.push_back(fam == Family::A ? hex::level_s(e) : hex::level_t(e));
    }
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    if (fam == Family::A) std::reverse(lv.begin(), lv.end());
    return lv;
  };
  auto sweep = [&](bool general) {
    bool progress = false;
    // Best general-pass candidate per vertex: (|u|, value).
    std::map<int, std::pair<S, S>> cand;
    for (int frame : {0, 1}) {
      const ProbeFrame fr{&par, frame};
      for (Family fam : {Family::A, Family::B}) {
        for (int level : levels_for(fam, frame)) {
          const ProbeLine line{fam, frame, level};
          auto ps = probe_solution_inverse<S>(par, dn, line, &q);
          if (!ps) continue;
          ++res.probes_run;
          if (ps->pattern_error > S(opt.pattern_tol)) {
            ++res.probes_skipped;
            continue;
          }
          const ProbeGeometry pg = probe_geometry(par, line);
          int found = 0;
          for (int c : r.interior) {
            const int oc = fr.orig(c);
            if (!all_known(*ps, c)) continue;
            if (general) {
              if (q[oc] || scalar_abs(ps->u[c]) < S(opt.final_min_abs)) continue;
              const S mag = scalar_abs(ps->u[c]);
              auto it = cand.find(oc);
              if (it == cand.end() || it->second.first < mag) cand[oc] = {mag, extract(*ps, c)};
              continue;
            }
            if (!pg.on_line(fr.at(c))) continue;
            if (scalar_abs(S(scalar_abs(ps->u[c]) - S(1))) > S(1e-20))
              throw ReconstructionError("line value lost unit modulus");
            const S val = extract(*ps, c);
            if (q[oc]) {
              res.rotation_consistency = std::max(res.rotation_consistency, to_double(scalar_abs(S(val - *q[oc]))));
              continue;
            }
            q[oc] = val;
            ++found;
            progress = true;
          }
          if (found) {
            std::ostringstream os;
            os << "frame " << frame << (fam == Family::A ? " A" : " B") << " level " << level << ": " << found
               << " value(s)";
            log(os.str());
          }
        }
      }
    }
    for (const auto& [oc, mv] : cand) {
      q[oc] = mv.second;
      ++res.general_extractions;
      progress = true;
      std::ostringstream os;
      const Eis e = par.eis(oc);
      os << "general extraction at (" << e.a << "," << e.b << ") with |u| = " << to_double(mv.first);
      log(os.str());
    }
    return progress;
  };
  for (;;) {
    while (sweep(false)) {
    }
    bool complete = true;
    for (int v : r.interior) complete = complete && q[v].has_value();
    if (complete) break;
    if (!sweep(true)) break;
  }
  for (int v : r.interior) {
    if (!q[v]) {
      const Eis e = par.eis(v);
      std::ostringstream os;
      os << "reconstruction incomplete: no probe reaches (" << e.a << "," << e.b << ")";
      throw ReconstructionError(os.str());
    }
    res.q.push_back(*q[v]);
    res.v.push_back(*q[v] + lambda + S(1));
  }
  return res;
}

}  // namespace latinv
