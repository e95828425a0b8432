#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "latinv/scattering.hpp"

namespace latinv::scattering {

namespace {

constexpr double kPi = std::numbers::pi;

// 15-point Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Laurent polynomial sum c[k] zeta^(lo + k).
struct Laurent {
  int lo = 0;
  std::vector<cd> c;
};

Laurent trim(Laurent p) {
  std::size_t b = 0, e = p.c.size();
  while (b < e && p.c[b] == cd{}) ++b;
  while (e > b && p.c[e - 1] == cd{}) --e;
  if (b == e) return {0, {}};
  return {p.lo + static_cast<int>(b), std::vector<cd>(p.c.begin() + b, p.c.begin() + e)};
}

Laurent mul(const Laurent& p, const Laurent& q) {
  if (p.c.empty() || q.c.empty()) return {};
  Laurent r{p.lo + q.lo, std::vector<cd>(p.c.size() + q.c.size() - 1)};
  for (std::size_t i = 0; i < p.c.size(); ++i)
    for (std::size_t j = 0; j < q.c.size(); ++j) r.c[i + j] += p.c[i] * q.c[j];
  return r;
}

Laurent sub(const Laurent& p, const Laurent& q) {
  if (p.c.empty()) return {q.lo, [&] { auto c = q.c; for (auto& v : c) v = -v; return c; }()};
  if (q.c.empty()) return p;
  const int lo = std::min(p.lo, q.lo);
  const int hi = std::max(p.lo + int(p.c.size()), q.lo + int(q.c.size()));
  Laurent r{lo, std::vector<cd>(hi - lo)};
  for (std::size_t k = 0; k < p.c.size(); ++k) r.c[p.lo - lo + k] += p.c[k];
  for (std::size_t k = 0; k < q.c.size(); ++k) r.c[q.lo - lo + k] -= q.c[k];
  return r;
}

Laurent negate(Laurent p) {
  for (auto& v : p.c) v = -v;
  return p;
}

cd horner(const std::vector<cd>& c, cd x) {
  cd r{};
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

std::vector<cd> derivative(const std::vector<cd>& c) {
  std::vector<cd> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * double(k));
  return d;
}

std::vector<cd> poly_roots(const std::vector<cd>& c) {
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) return {-c[0] / c[1]};
  if (deg == 2) {
    const cd sq = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
    const cd s = std::real(std::conj(c[1]) * sq) >= 0 ? sq : -sq;
    const cd q = -0.5 * (c[1] + s);
    if (q == cd{}) return {cd{}, cd{}};
    return {q / c[2], c[0] / q};
  }
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (std::size_t k = 0; k < deg; ++k) comp(0, k) = -c[deg - 1 - k] / c[deg];
  for (std::size_t k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cd> r(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  const auto dc = derivative(c);
  for (cd& x : r)
    for (int it = 0; it < 3; ++it) {
      const cd d = horner(dc, x);
      if (d != cd{}) x -= horner(c, x) / d;
    }
  return r;
}

// Residue data of one x1 slice: the x2 integral of adj_ij / det * zeta^(d2-1)
// over the unit circle as a finite residue sum.
class Slice {
 public:
  Slice(const FreeLattice& L, double x1, cd z) : s_(L.sublattices) {
    entries_.assign(s_ * s_, Laurent{-1, std::vector<cd>(3)});
    for (const Hop& h : L.hops)
      entries_[h.i * s_ + h.j].c[h.k2 + 1] += -std::polar(1.0 / L.degree, h.k1 * x1);
    for (int i = 0; i < s_; ++i) entries_[i * s_ + i].c[1] -= z;
    for (auto& e : entries_) e = trim(e);

    Laurent det;
    if (s_ == 1) {
      det = entries_[0];
      adj_ = {Laurent{0, {cd{1.0}}}};
    } else if (s_ == 2) {
      det = trim(sub(mul(entries_[0], entries_[3]), mul(entries_[1], entries_[2])));
      adj_ = {entries_[3], negate(entries_[1]), negate(entries_[2]), entries_[0]};
    } else {
      throw std::logic_error("residue slices support at most two sublattices");
    }
    p_lo_ = det.lo;
    P_ = det.c;
    Prev_.assign(P_.rbegin(), P_.rend());
    dP_ = derivative(P_);
    dPrev_ = derivative(Prev_);
    for (const cd& r : poly_roots(P_)) {
      if (std::abs(r) < 1.0) inside_.push_back(r);
      else if (r != cd{}) outside_.push_back(1.0 / r);
    }
  }

  cd value(int i, int j, int d2) const {
    const Laurent& A = adj_[i * s_ + j];
    if (A.c.empty()) return {};
    const int deg_a = int(A.c.size()) - 1, deg_p = int(P_.size()) - 1;
    const int e = A.lo - p_lo_ + d2 - 1;
    cd total{};
    if (e >= 0) {
      for (const cd& r : inside_) total += horner(A.c, r) * std::pow(r, e) / horner(dP_, r);
      return total;
    }
    const int er = deg_p - deg_a - e - 2;
    if (er < 0) throw std::logic_error("no residue representation with a nonnegative power");
    std::vector<cd> Arev(A.c.rbegin(), A.c.rend());
    for (const cd& r : outside_) total += horner(Arev, r) * std::pow(r, er) / horner(dPrev_, r);
    return total;
  }

 private:
  int s_;
  std::vector<Laurent> entries_, adj_;
  int p_lo_ = 0;
  std::vector<cd> P_, Prev_, dP_, dPrev_;
  std::vector<cd> inside_, outside_;  // outside_ holds the reciprocals of roots beyond the circle
};

struct Interval {
  double a, b;
  Eigen::VectorXcd value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(const F& f, double a, double b, int n) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Eigen::VectorXcd kron = Eigen::VectorXcd::Zero(n), gauss = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd v(n);
  f(c, v);
  kron += kWgk[7] * v;
  gauss += kWg[3] * v;
  for (int k = 0; k < 7; ++k) {
    Eigen::VectorXcd lo(n), hi(n);
    f(c - h * kXgk[k], lo);
    f(c + h * kXgk[k], hi);
    kron += kWgk[k] * (lo + hi);
    if (k % 2 == 1) gauss += kWg[k / 2] * (lo + hi);
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, (kron - gauss).cwiseAbs().maxCoeff()};
}

}  // namespace

std::vector<double> GreenOptions::default_ladder() {
  std::vector<double> e;
  for (int k = 0; k < 8; ++k) e.push_back(1e-2 * std::ldexp(1.0, -k));
  return e;
}

FreeLattice free_lattice(LatticeKind kind) {
  FreeLattice L;
  L.kind = kind;
  switch (kind) {
    case LatticeKind::Square: L.periodic = spectral::Periodic::Square; L.sublattices = 1; break;
    case LatticeKind::Triangular: L.periodic = spectral::Periodic::Triangular; L.sublattices = 1; break;
    case LatticeKind::Hexagonal: L.periodic = spectral::Periodic::Hexagonal; L.sublattices = 2; break;
    default: throw std::invalid_argument("free Green's function needs a square, triangular or hexagonal lattice");
  }
  L.degree = lattice_degree(kind);
  for (int j = 1; j <= L.sublattices; ++j)
    for (const VertexId& w : lattice_neighbors(kind, VertexId{j, 0, 0}))
      L.hops.push_back({j - 1, w.j - 1, w.n1, w.n2});
  return L;
}

Eigen::MatrixXcd free_symbol(const FreeLattice& L, double x1, double x2) {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(L.sublattices, L.sublattices);
  for (const Hop& h : L.hops) S(h.i, h.j) -= std::polar(1.0 / L.degree, h.k1 * x1 + h.k2 * x2);
  return S;
}

GreenKey green_key(const VertexId& a, const VertexId& b) {
  return {a.j - 1, b.j - 1, a.n1 - b.n1, a.n2 - b.n2};
}

GreenKey canonical(const GreenKey& k) {
  const GreenKey t{k.j, k.i, -k.d1, -k.d2};
  return std::min(k, t);
}

std::vector<cd> green_at(const FreeLattice& L, cd z, const std::vector<GreenKey>& keys, double tol,
                         int max_intervals, int* intervals) {
  const int n = static_cast<int>(keys.size());
  if (n == 0) return {};
  auto f = [&](double x1, Eigen::VectorXcd& out) {
    const Slice s(L, x1, z);
    for (int k = 0; k < n; ++k)
      out[k] = s.value(keys[k].i, keys[k].j, keys[k].d2) * std::polar(1.0, keys[k].d1 * x1);
  };
  const int initial = 32;
  std::priority_queue<Interval> heap;
  double total_err = 0.0;
  for (int k = 0; k < initial; ++k) {
    Interval iv = gk15(f, 2 * kPi * k / initial, 2 * kPi * (k + 1) / initial, n);
    total_err += iv.error;
    heap.push(std::move(iv));
  }
  int count = initial;
  while (total_err > tol * 2 * kPi && count < max_intervals) {
    Interval worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    Interval l = gk15(f, worst.a, m, n), r = gk15(f, m, worst.b, n);
    total_err += l.error + r.error - worst.error;
    heap.push(std::move(l));
    heap.push(std::move(r));
    ++count;
  }
  // Sum in mesh order so the result does not depend on heap internals.
  std::vector<Interval> parts;
  parts.reserve(heap.size());
  while (!heap.empty()) {
    parts.push_back(heap.top());
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.a < b.a; });
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n);
  for (const Interval& p : parts) sum += p.value;
  if (intervals) *intervals = count;
  double final_err = 0.0;
  for (const Interval& p : parts) final_err += p.error;
  if (final_err > tol * 2 * kPi)
    throw QuadratureBudgetError("quadrature stopped at " + std::to_string(count) + " subintervals with error " +
                                std::to_string(final_err / (2 * kPi)) + " above " + std::to_string(tol));
  std::vector<cd> out(n);
  for (int k = 0; k < n; ++k) out[k] = sum[k] / (2 * kPi);
  return out;
}

cd extrapolate_to_zero(const std::vector<double>& eps, const std::vector<cd>& values) {
  std::vector<cd> p = values;
  const std::size_t m = eps.size();
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      p[i] = (eps[i + level] * p[i] - eps[i] * p[i + 1]) / (eps[i + level] - eps[i]);
  return p[0];
}

void check_admissible(const FreeLattice& L, double lambda, const GreenOptions& opt) {
  double dist = 1e300;
  double nearest = 0.0;
  for (double t : spectral::threshold_energies(L.periodic))
    if (std::abs(t - lambda) < dist) dist = std::abs(t - lambda), nearest = t;
  if (dist < opt.threshold_tol)
    throw spectral::ThresholdError("lambda = " + std::to_string(lambda) + " lies " + std::to_string(dist) +
                                       " from the threshold " + std::to_string(nearest),
                                   dist);
  if (std::abs(lambda) >= 1.0) throw std::domain_error("lambda lies outside the spectrum [-1, 1]");
}

namespace {
std::vector<GreenValue> finish(const GreenOptions& opt, const std::vector<std::vector<cd>>& ladder, std::size_t n) {
  std::vector<GreenValue> out(n);
  const std::size_t m = opt.eps_ladder.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<cd> v(m);
    for (std::size_t l = 0; l < m; ++l) v[l] = ladder[l][k];
    out[k].ladder = v;
    out[k].value = extrapolate_to_zero(opt.eps_ladder, v);
    if (m > 1) {
      std::vector<double> e(opt.eps_ladder.begin(), opt.eps_ladder.end() - 1);
      v.pop_back();
      out[k].error = std::abs(out[k].value - extrapolate_to_zero(e, v));
    }
  }
  return out;
}
}  // namespace

std::vector<GreenValue> green_batch(const FreeLattice& L, double lambda, const std::vector<GreenKey>& keys,
                                    const GreenOptions& opt) {
  if (!opt.parallel) return green_batch_serial(L, lambda, keys, opt);
  check_admissible(L, lambda, opt);
  const int m = static_cast<int>(opt.eps_ladder.size());
  std::vector<std::vector<cd>> ladder(m);
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l < m; ++l)
    ladder[l] = green_at(L, cd(lambda, opt.eps_ladder[l]), keys, opt.quad_tol, opt.max_intervals);
  return finish(opt, ladder, keys.size());
}

std::vector<GreenValue> green_batch_serial(const FreeLattice& L, double lambda, const std::vector<GreenKey>& keys,
                                           const GreenOptions& opt) {
  check_admissible(L, lambda, opt);
  std::vector<std::vector<cd>> ladder;
  for (double e : opt.eps_ladder)
    ladder.push_back(green_at(L, cd(lambda, e), keys, opt.quad_tol, opt.max_intervals));
  return finish(opt, ladder, keys.size());
}

GreenValue free_green(LatticeKind kind, double lambda, const VertexId& a, const VertexId& b, const GreenOptions& opt) {
  const FreeLattice L = free_lattice(kind);
  return green_batch(L, lambda, {canonical(green_key(a, b))}, opt).front();
}

GreenTable::GreenTable(LatticeKind kind, double lambda, GreenOptions opt)
    : lattice_(free_lattice(kind)), lambda_(lambda), opt_(std::move(opt)) {
  check_admissible(lattice_, lambda_, opt_);
}

void GreenTable::require(const std::vector<VertexId>& rows, const std::vector<VertexId>& cols) {
  std::vector<GreenKey> missing;
  for (const VertexId& a : rows)
    for (const VertexId& b : cols) {
      const GreenKey k = canonical(green_key(a, b));
      if (!values_.count(k)) missing.push_back(k);
    }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  if (missing.empty()) return;
  const auto vals = green_batch(lattice_, lambda_, missing, opt_);
  for (std::size_t k = 0; k < missing.size(); ++k) values_[missing[k]] = vals[k];
}

cd GreenTable::operator()(const VertexId& a, const VertexId& b) const {
  auto it = values_.find(canonical(green_key(a, b)));
  if (it == values_.end()) throw std::out_of_range("Green table entry not computed");
  return it->second.value;
}

Eigen::MatrixXcd GreenTable::block(const std::vector<VertexId>& rows, const std::vector<VertexId>& cols, int sign) {
  require(rows, cols);
  Eigen::MatrixXcd M(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const cd g = (*this)(rows[r], cols[c]);
      M(r, c) = sign > 0 ? g : std::conj(g);
    }
  return M;
}

double GreenTable::max_error() const {
  double e = 0.0;
  for (const auto& [k, v] : values_) e = std::max(e, v.error);
  return e;
}

nlohmann::json GreenTable::to_json() const {
  nlohmann::json j;
  j["lattice"] = latinv::to_string(lattice_.kind);
  j["lambda"] = lambda_;
  j["eps_ladder"] = opt_.eps_ladder;
  j["quad_tol"] = opt_.quad_tol;
  j["entries"] = nlohmann::json::array();
  for (const auto& [k, v] : values_)
    j["entries"].push_back({k.i, k.j, k.d1, k.d2, v.value.real(), v.value.imag(), v.error});
  return j;
}

GreenTable GreenTable::from_json(const nlohmann::json& j) {
  GreenOptions opt;
  opt.eps_ladder = j.at("eps_ladder").get<std::vector<double>>();
  opt.quad_tol = j.at("quad_tol").get<double>();
  GreenTable t(lattice_kind_from_string(j.at("lattice").get<std::string>()), j.at("lambda").get<double>(), opt);
  for (const auto& e : j.at("entries")) {
    GreenKey k{e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>()};
    GreenValue v;
    v.value = cd(e[4].get<double>(), e[5].get<double>());
    v.error = e[6].get<double>();
    t.values_[canonical(k)] = v;
  }
  return t;
}

}  // namespace latinv::scattering
