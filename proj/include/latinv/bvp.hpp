#pragma once
// Interior boundary value problems: block assembly, regularity, Dirichlet
// solves, Dirichlet-to-Neumann matrices, and partial-data completion.
// Everything is templated on the scalar so the parallelogram sweeps can run
// in binary128.
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "latinv/lattice_core.hpp"
#include "latinv/parallelogram.hpp"
#include "latinv/scalar.hpp"

namespace latinv {

// Standard: (-Delta + V - lambda) u = 0, Lambda f = d_nu u.
// Modified: (1 - Delta + Q) u = 0 with Q = V - lambda - 1, Lambda f = f + d_nu u.
enum class Convention { Standard, Modified };

inline std::string to_string(Convention c) { return c == Convention::Standard ? "standard" : "modified"; }
inline BoundaryDegreeRule default_rule(Convention c) {
  return c == Convention::Standard ? BoundaryDegreeRule::RegionDegree : BoundaryDegreeRule::Unit;
}

// Potential stored in the shifted form Q = V - lambda - 1, aligned with the
// region's interior order.
template <class S>
struct Potential {
  std::vector<S> q;

  static Potential from_v(const std::vector<S>& v, const S& lambda) {
    Potential p;
    for (const S& x : v) p.q.push_back(x - lambda - S(1));
    return p;
  }
  static Potential zero(std::size_t n) { return Potential{std::vector<S>(n, S(0))}; }
  std::vector<S> v(const S& lambda) const {
    std::vector<S> out;
    for (const S& x : q) out.push_back(x + lambda + S(1));
    return out;
  }
};

template <class S>
struct AssembledSystem {
  Mat<S> h00, h01, h10, h11;  // interior x interior, interior x boundary, ...
  Convention convention = Convention::Modified;
  BoundaryDegreeRule rule = BoundaryDegreeRule::Unit;
};

class RegularityError : public std::runtime_error {
 public:
  RegularityError(const std::string& what, double ratio) : std::runtime_error(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

template <class S>
AssembledSystem<S> assemble(const Region& r, const Potential<S>& pot, Convention conv,
                            std::optional<BoundaryDegreeRule> rule = std::nullopt) {
  const LatticeGraph& g = *r.graph;
  const int n = static_cast<int>(r.interior.size()), m = static_cast<int>(r.boundary.size());
  if (static_cast<int>(pot.q.size()) != n) throw std::invalid_argument("potential size does not match the interior");
  std::vector<int> pos(g.size(), -1);
  for (int k = 0; k < n; ++k) pos[r.interior[k]] = k;
  for (int k = 0; k < m; ++k) pos[r.boundary[k]] = k;
  AssembledSystem<S> sys;
  sys.convention = conv;
  sys.rule = rule.value_or(default_rule(conv));
  sys.h00 = Mat<S>::Zero(n, n);
  sys.h01 = Mat<S>::Zero(n, m);
  sys.h10 = Mat<S>::Zero(m, n);
  sys.h11 = conv == Convention::Modified ? Mat<S>(Mat<S>::Identity(m, m)) : Mat<S>(Mat<S>::Zero(m, m));
  for (int k = 0; k < n; ++k) {
    const int v = r.interior[k];
    sys.h00(k, k) = S(1) + pot.q[k];
    const S w = S(1) / S(g.degree(v));
    for (int u : g.adj[v]) {
      if (r.is_interior(u)) sys.h00(k, pos[u]) -= w;
      else sys.h01(k, pos[u]) -= w;
    }
  }
  for (int k = 0; k < m; ++k) {
    const int v = r.boundary[k];
    const S w = S(1) / S(r.boundary_degree(v, sys.rule));
    for (int u : g.adj[v])
      if (r.is_interior(u)) sys.h10(k, pos[u]) -= w;
  }
  return sys;
}

struct RegularityReport {
  bool regular;
  double ratio;  // smallest over largest singular value of the interior block
};

// The ratio is a conditioning diagnostic; double precision resolves it.
template <class S>
RegularityReport is_regular(const AssembledSystem<S>& sys, double threshold = 1e-10) {
  Eigen::MatrixXd h(sys.h00.rows(), sys.h00.cols());
  for (int i = 0; i < h.rows(); ++i)
    for (int j = 0; j < h.cols(); ++j) h(i, j) = to_double(sys.h00(i, j));
  if (h.size() == 0) return {true, 1.0};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const auto& s = svd.singularValues();
  const double ratio = s(s.size() - 1) / s(0);
  return {ratio > threshold, ratio};
}

// Interior values of the solution with boundary data f (boundary order).
template <class S>
Vec<S> solve_dirichlet(const AssembledSystem<S>& sys, const Vec<S>& f) {
  const RegularityReport rep = is_regular(sys);
  if (!rep.regular) throw RegularityError("Dirichlet problem is not uniquely solvable", rep.ratio);
  return Eigen::PartialPivLU<Mat<S>>(sys.h00).solve(-(sys.h01 * f));
}

template <class S>
struct DNMap {
  S lambda{};
  Convention convention = Convention::Modified;
  BoundaryDegreeRule rule = BoundaryDegreeRule::Unit;
  std::vector<VertexId> boundary;  // order of rows and columns
  Mat<S> m;

  Vec<S> apply(const Vec<S>& f) const { return m * f; }
};

template <class S>
DNMap<S> dn_map(const Region& r, const Potential<S>& pot, const S& lambda, Convention conv,
                std::optional<BoundaryDegreeRule> rule = std::nullopt) {
  const AssembledSystem<S> sys = assemble(r, pot, conv, rule);
  const RegularityReport rep = is_regular(sys);
  if (!rep.regular) throw RegularityError("D-N map undefined: interior block singular", rep.ratio);
  DNMap<S> d;
  d.lambda = lambda;
  d.convention = conv;
  d.rule = sys.rule;
  for (int v : r.boundary) d.boundary.push_back(r.graph->vertices[v]);
  const Mat<S> x = Eigen::PartialPivLU<Mat<S>>(sys.h00).solve(sys.h01);
  d.m = sys.h11 - sys.h10 * x;
  return d;
}

// Boundary operator applied to a full solution: H11 f + H10 u.
template <class S>
Vec<S> normal_data(const AssembledSystem<S>& sys, const Vec<S>& f, const Vec<S>& u) {
  return sys.h11 * f + sys.h10 * u;
}

// Max over interior vertices of |(1 + Q) u(c) - (1/deg) sum u(nbrs)|.
template <class S>
S four_point_residual(const AssembledSystem<S>& sys, const Vec<S>& f, const Vec<S>& u) {
  const Vec<S> r = sys.h00 * u + sys.h01 * f;
  S worst(0);
  for (int i = 0; i < r.size(); ++i) worst = std::max<S>(worst, scalar_abs(S(r(i))));
  return worst;
}

// Positions (within the boundary order of `r`) of a list of graph indices.
inline std::vector<int> boundary_positions(const Region& r, const std::vector<int>& verts) {
  std::vector<int> out;
  for (int v : verts) {
    auto it = std::lower_bound(r.boundary.begin(), r.boundary.end(), v);
    if (it == r.boundary.end() || *it != v) throw std::invalid_argument("vertex is not on the boundary");
    out.push_back(static_cast<int>(it - r.boundary.begin()));
  }
  return out;
}

class SingularBlockError : public std::runtime_error {
 public:
  SingularBlockError(const std::string& what, double cond) : std::runtime_error(what), cond_(cond) {}
  double condition() const { return cond_; }

 private:
  double cond_;
};

// Fills the unknown boundary values on `free_pos` so that (Lambda f) matches g
// on `neu_pos`: f_free = Lambda(neu; free)^{-1} (g - Lambda(neu; rest) f_rest).
// `f` must hold the known values everywhere outside `free_pos`.
template <class S>
Vec<S> complete_boundary_data(const Mat<S>& lam, const std::vector<int>& neu_pos, const std::vector<int>& free_pos,
                              Vec<S> f, const Vec<S>& g) {
  const int k = static_cast<int>(neu_pos.size());
  if (k != static_cast<int>(free_pos.size())) throw std::invalid_argument("Neumann and free sides differ in size");
  std::vector<char> is_free(lam.cols(), 0);
  for (int p : free_pos) is_free[p] = 1;
  Mat<S> a(k, k);
  Vec<S> rhs(k);
  for (int i = 0; i < k; ++i) {
    S acc = g(i);
    for (int c = 0; c < lam.cols(); ++c)
      if (!is_free[c]) acc -= lam(neu_pos[i], c) * f(c);
    rhs(i) = acc;
    for (int j = 0; j < k; ++j) a(i, j) = lam(neu_pos[i], free_pos[j]);
  }
  Eigen::FullPivLU<Mat<S>> lu(a);
  if (!lu.isInvertible()) throw SingularBlockError("partial-data block is singular", 1e300);
  const Vec<S> x = lu.solve(rhs);
  for (int j = 0; j < k; ++j) f(free_pos[j]) = x(j);
  return f;
}

// Singular values (double precision) of Lambda(rows; cols).
template <class S>
Eigen::VectorXd block_singular_values(const Mat<S>& lam, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXd a(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) a(i, j) = to_double(lam(rows[i], cols[j]));
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
}

// Repeatedly solves single-unknown four-point relations at usable centres.
// `coef[c]` is the centre coefficient (1 + Q(c)) when known; centres inside a
// region where u vanishes are usable with any coefficient since u(c) = 0.
template <class S>
void propagate_four_point(const LatticeGraph& g, const std::vector<int>& centres,
                          const std::vector<std::optional<S>>& coef, std::vector<S>& u, std::vector<char>& known) {
  // Breadth-first rounds: every value fixed in a round depends only on values
  // known before it, which keeps the marching depth minimal. When several
  // relations determine the same vertex, the one with the largest pivot wins.
  struct Pick {
    S value;
    S pivot;
  };
  std::unordered_map<int, Pick> next;
  for (;;) {
    next.clear();
    for (int c : centres) {
      if (!coef[c]) continue;
      const S w = S(1) / S(g.degree(c));
      int unknown = -1, count = 0;
      if (!known[c]) {
        unknown = c;
        ++count;
      }
      for (int x : g.adj[c])
        if (!known[x]) {
          unknown = x;
          ++count;
        }
      if (count != 1) continue;
      S acc(0), pivot;
      if (unknown == c) {
        pivot = *coef[c];
        if (pivot == S(0)) continue;
        for (int x : g.adj[c]) acc += w * u[x];
      } else {
        pivot = w;
        acc = *coef[c] * u[c];
        for (int x : g.adj[c])
          if (x != unknown) acc -= w * u[x];
      }
      const S value = acc / pivot;
      auto it = next.find(unknown);
      if (it == next.end())
        next.emplace(unknown, Pick{value, pivot});
      else if (scalar_abs(pivot) > scalar_abs(it->second.pivot))
        it->second = Pick{value, pivot};
    }
    if (next.empty()) return;
    for (const auto& [v, pick] : next) {
      u[v] = pick.value;
      known[v] = 1;
    }
  }
}

// Interior vertices of a hexagonal graph sorted by column (2a+b) then height (b).
inline std::vector<int> column_order(const LatticeGraph& g, const std::vector<int>& verts) {
  std::vector<int> out = verts;
  std::sort(out.begin(), out.end(), [&](int x, int y) {
    const Eis ex = hex::to_eis(g.vertices[x]), ey = hex::to_eis(g.vertices[y]);
    if (hex::level_x(ex) != hex::level_x(ey)) return hex::level_x(ex) < hex::level_x(ey);
    return ex.b < ey.b;
  });
  return out;
}

// Solution on the interior and the right side from Dirichlet data off the right
// side (boundary order, right-side entries ignored) and Neumann data g on the
// left side (in par.left order), with the potential known. Modified convention
// with unit boundary degree. Returns values indexed by graph vertex.
template <class S>
std::vector<S> solve_partial_data(const HexParallelogram& par, const Potential<S>& pot, const Vec<S>& f,
                                  const Vec<S>& g_left) {
  const LatticeGraph& g = *par.graph;
  const Region& r = par.region;
  std::vector<S> u(g.size(), S(0));
  std::vector<char> known(g.size(), 0);
  std::vector<char> on_right(g.size(), 0);
  for (int v : par.right) on_right[v] = 1;
  for (std::size_t k = 0; k < r.boundary.size(); ++k) {
    const int v = r.boundary[k];
    if (on_right[v]) continue;
    u[v] = f(k);
    known[v] = 1;
  }
  // Lambda f = f - u(w) at a boundary vertex with single interior neighbour w.
  const std::vector<int> lpos = boundary_positions(r, par.left);
  for (std::size_t i = 0; i < par.left.size(); ++i) {
    const int v = par.left[i];
    for (int w : g.adj[v])
      if (r.is_interior(w)) {
        u[w] = f(lpos[i]) - g_left(i);
        known[w] = 1;
      }
  }
  std::vector<std::optional<S>> coef(g.size());
  for (std::size_t k = 0; k < r.interior.size(); ++k) coef[r.interior[k]] = S(1) + pot.q[k];
  propagate_four_point(g, column_order(g, r.interior), coef, u, known);
  for (int v : r.interior)
    if (!known[v]) throw std::runtime_error("partial-data sweep did not reach every interior vertex");
  for (int v : par.right)
    if (!known[v]) throw std::runtime_error("partial-data sweep did not reach the right side");
  return u;
}

}  // namespace latinv
