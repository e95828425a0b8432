#include "latinv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace latinv::spectral {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_diff(double d) {
  d = std::fmod(d, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return d;
}
double torus_dist(const Point& a, const Point& b) {
  return std::hypot(wrap_diff(a[0] - b[0]), wrap_diff(a[1] - b[1]));
}
}  // namespace

std::string to_string(Periodic p) {
  switch (p) {
    case Periodic::Square: return "square";
    case Periodic::Triangular: return "triangular";
    case Periodic::Hexagonal: return "hexagonal";
    case Periodic::Kagome: return "kagome";
    case Periodic::Graphite: return "graphite";
    case Periodic::Subdivision: return "subdivision";
    case Periodic::Ladder: return "ladder";
  }
  return "";
}

Periodic periodic_from_string(const std::string& s) {
  for (Periodic p : all_periodic())
    if (to_string(p) == s) return p;
  if (s == "hex") return Periodic::Hexagonal;
  if (s == "tri") return Periodic::Triangular;
  throw std::invalid_argument("unknown lattice: " + s);
}

const std::vector<Periodic>& all_periodic() {
  static const std::vector<Periodic> v{Periodic::Square,   Periodic::Triangular,  Periodic::Hexagonal,
                                       Periodic::Kagome,   Periodic::Graphite,    Periodic::Subdivision,
                                       Periodic::Ladder};
  return v;
}

double a2(const Point& x) { return std::cos(x[0]) + std::cos(x[1]); }
double b2(const Point& x) { return std::cos(x[0]) + std::cos(x[1]) + std::cos(x[0] - x[1]); }

bool uses_a2(Periodic p) {
  return p == Periodic::Square || p == Periodic::Subdivision || p == Periodic::Ladder;
}

double level_variable(Periodic p, const Point& x) { return uses_a2(p) ? a2(x) : b2(x); }

Point level_variable_gradient(Periodic p, const Point& x) {
  if (uses_a2(p)) return {-std::sin(x[0]), -std::sin(x[1])};
  const double s12 = std::sin(x[0] - x[1]);
  return {-std::sin(x[0]) - s12, -std::sin(x[1]) + s12};
}

std::vector<double> critical_levels(Periodic p) {
  if (uses_a2(p)) return {-2.0, 0.0, 2.0};
  return {-1.5, -1.0, 3.0};
}

double char_poly(Periodic p, const Point& x, double l) {
  switch (p) {
    case Periodic::Square: return -0.5 * (a2(x) + 2.0 * l);
    case Periodic::Subdivision: return (l / 4.0) * (a2(x) - 4.0 * l * l + 2.0);
    case Periodic::Ladder: {
      const double z = a2(x);
      return 0.16 * (z + (5.0 * l + 1.0) / 2.0) * (z + (5.0 * l - 1.0) / 2.0);
    }
    case Periodic::Triangular: return -(b2(x) + 3.0 * l) / 3.0;
    case Periodic::Hexagonal: return -(2.0 / 9.0) * (b2(x) - (9.0 * l * l - 3.0) / 2.0);
    case Periodic::Kagome: return 0.125 * (l - 0.5) * (b2(x) - 8.0 * l * l - 4.0 * l + 1.0);
    case Periodic::Graphite: {
      const double z = b2(x);
      return (z - (8.0 * l * l + 4.0 * l - 1.0)) * (z - (8.0 * l * l - 4.0 * l - 1.0)) / 64.0;
    }
  }
  return 0.0;
}

bool has_symbol(Periodic p) {
  return p == Periodic::Square || p == Periodic::Triangular || p == Periodic::Hexagonal;
}

Eigen::MatrixXcd symbol(Periodic p, const Point& x) {
  // Plane waves u(j,n) = exp(i x.n) psi_j; H0 = -Delta on the generated lattice.
  switch (p) {
    case Periodic::Square: {
      Eigen::MatrixXcd h(1, 1);
      h(0, 0) = -a2(x) / 2.0;
      return h;
    }
    case Periodic::Triangular: {
      Eigen::MatrixXcd h(1, 1);
      h(0, 0) = -b2(x) / 3.0;
      return h;
    }
    case Periodic::Hexagonal: {
      using C = std::complex<double>;
      const C h12 = -(1.0 + std::exp(C(0, -x[0])) + std::exp(C(0, -x[1]))) / 3.0;
      Eigen::MatrixXcd h(2, 2);
      h << 0.0, h12, std::conj(h12), 0.0;
      return h;
    }
    default: break;
  }
  throw std::invalid_argument("no symbol for " + to_string(p));
}

double char_poly_from_symbol(Periodic p, const Point& x, double lambda) {
  Eigen::MatrixXcd h = symbol(p, x);
  h -= lambda * Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  return h.determinant().real();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXcd> symbol_eigen(Periodic p, const Point& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(symbol(p, x));
  Eigen::MatrixXcd v = es.eigenvectors();
  for (int c = 0; c < v.cols(); ++c) {
    int best = 0;
    for (int r = 1; r < v.rows(); ++r)
      if (std::abs(v(r, c)) > std::abs(v(best, c)) + 1e-14) best = r;
    const std::complex<double> ph = v(best, c) / std::abs(v(best, c));
    v.col(c) /= ph;
  }
  return {es.eigenvalues(), v};
}

std::vector<Branch> branches(Periodic p) {
  switch (p) {
    case Periodic::Square:
    case Periodic::Triangular: return {{0, false, 0.0}};
    case Periodic::Hexagonal:
    case Periodic::Ladder: return {{0, false, 0.0}, {1, false, 0.0}};
    case Periodic::Kagome: return {{0, false, 0.0}, {1, false, 0.0}, {2, true, 0.5}};
    case Periodic::Graphite: return {{0, false, 0.0}, {1, false, 0.0}, {2, false, 0.0}, {3, false, 0.0}};
    case Periodic::Subdivision: return {{0, false, 0.0}, {1, true, 0.0}, {2, false, 0.0}};
  }
  return {};
}

namespace {
// Branches of the form (c0 + c1 * sqrt(3 + 2z)) / den.
struct RootForm {
  double c0, c1, den;
};
std::optional<RootForm> root_form(Periodic p, int j) {
  switch (p) {
    case Periodic::Hexagonal: return RootForm{0.0, j == 0 ? -1.0 : 1.0, 3.0};
    case Periodic::Kagome:
      if (j == 2) return std::nullopt;
      return RootForm{-1.0, j == 0 ? -1.0 : 1.0, 4.0};
    case Periodic::Graphite: {
      static const RootForm f[4] = {{-1, -1, 4}, {1, -1, 4}, {-1, 1, 4}, {1, 1, 4}};
      return f[j];
    }
    default: return std::nullopt;
  }
}
double z_min(Periodic p) { return uses_a2(p) ? -2.0 : -1.5; }
double z_max(Periodic p) { return uses_a2(p) ? 2.0 : 3.0; }
}  // namespace

double branch_value(Periodic p, int j, double z) {
  if (auto rf = root_form(p, j)) return (rf->c0 + rf->c1 * std::sqrt(std::max(0.0, 3.0 + 2.0 * z))) / rf->den;
  switch (p) {
    case Periodic::Square: return -z / 2.0;
    case Periodic::Triangular: return -z / 3.0;
    case Periodic::Kagome: return 0.5;
    case Periodic::Subdivision:
      if (j == 1) return 0.0;
      return (j == 0 ? -1.0 : 1.0) * std::sqrt(std::max(0.0, (z + 2.0) / 4.0));
    case Periodic::Ladder: return (-2.0 * z + (j == 0 ? -1.0 : 1.0)) / 5.0;
    default: break;
  }
  throw std::invalid_argument("bad branch");
}

double branch_derivative(Periodic p, int j, double z) {
  if (auto rf = root_form(p, j)) return rf->c1 / (rf->den * std::sqrt(3.0 + 2.0 * z));
  switch (p) {
    case Periodic::Square: return -0.5;
    case Periodic::Triangular: return -1.0 / 3.0;
    case Periodic::Kagome: return 0.0;
    case Periodic::Subdivision:
      if (j == 1) return 0.0;
      return (j == 0 ? -1.0 : 1.0) / (8.0 * std::sqrt((z + 2.0) / 4.0));
    case Periodic::Ladder: return -0.4;
    default: break;
  }
  throw std::invalid_argument("bad branch");
}

std::optional<double> branch_level(Periodic p, int j, double l) {
  double z;
  if (auto rf = root_form(p, j)) {
    const double r = (rf->den * l - rf->c0) / rf->c1;
    if (r < 0.0) return std::nullopt;
    z = (r * r - 3.0) / 2.0;
  } else {
    switch (p) {
      case Periodic::Square: z = -2.0 * l; break;
      case Periodic::Triangular: z = -3.0 * l; break;
      case Periodic::Kagome: return std::nullopt;
      case Periodic::Subdivision: {
        if (j == 1) return std::nullopt;
        if ((j == 0 && l > 0.0) || (j == 2 && l < 0.0)) return std::nullopt;
        z = 4.0 * l * l - 2.0;
        break;
      }
      case Periodic::Ladder: z = (-5.0 * l + (j == 0 ? -1.0 : 1.0)) / 2.0; break;
      default: return std::nullopt;
    }
  }
  if (z < z_min(p) || z > z_max(p)) return std::nullopt;
  return z;
}

std::vector<double> bands(Periodic p, const Point& x) {
  const double z = level_variable(p, x);
  std::vector<double> out;
  for (const Branch& b : branches(p)) out.push_back(b.flat ? b.flat_value : branch_value(p, b.index, z));
  std::sort(out.begin(), out.end());
  return out;
}

double band_function(Periodic p, int j, const Point& x) { return branch_value(p, j, level_variable(p, x)); }

Point band_gradient(Periodic p, int j, const Point& x) {
  const double d = branch_derivative(p, j, level_variable(p, x));
  const Point g = level_variable_gradient(p, x);
  return {d * g[0], d * g[1]};
}

double level_curvature(Periodic p, int j, const Point& x, double h) {
  auto f = [&](double dx, double dy) { return band_function(p, j, {x[0] + dx, x[1] + dy}); };
  const double f0 = f(0, 0);
  const double fx = (f(h, 0) - f(-h, 0)) / (2 * h);
  const double fy = (f(0, h) - f(0, -h)) / (2 * h);
  const double fxx = (f(h, 0) - 2 * f0 + f(-h, 0)) / (h * h);
  const double fyy = (f(0, h) - 2 * f0 + f(0, -h)) / (h * h);
  const double fxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  const double g2 = fx * fx + fy * fy;
  if (g2 < 1e-24) throw ThresholdError("curvature: vanishing gradient", std::sqrt(g2));
  return (fxx * fy * fy - 2 * fxy * fx * fy + fyy * fx * fx) / std::pow(g2, 1.5);
}

std::vector<double> curvature_at(Periodic p, int branch, const std::vector<Point>& xs, bool parallel) {
  std::vector<double> out(xs.size());
  const long n = static_cast<long>(xs.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = level_curvature(p, branch, xs[i]);
  } else {
    for (long i = 0; i < n; ++i) out[i] = level_curvature(p, branch, xs[i]);
  }
  return out;
}

namespace {

struct Tracer {
  Periodic p;
  double level;

  double F(const Point& x) const { return level_variable(p, x) - level; }
  Point grad(const Point& x) const { return level_variable_gradient(p, x); }
  Point tangent(const Point& x) const {
    const Point g = grad(x);
    const double n = std::hypot(g[0], g[1]);
    return {-g[1] / n, g[0] / n};
  }
  Point project(Point x) const {
    for (int it = 0; it < 4; ++it) {
      const Point g = grad(x);
      const double n2 = g[0] * g[0] + g[1] * g[1];
      const double f = F(x);
      x = {x[0] - f * g[0] / n2, x[1] - f * g[1] / n2};
      if (std::abs(f) < 1e-15) break;
    }
    return x;
  }
  Point rk4(const Point& x, double ds) const {
    const Point k1 = tangent(x);
    const Point k2 = tangent({x[0] + 0.5 * ds * k1[0], x[1] + 0.5 * ds * k1[1]});
    const Point k3 = tangent({x[0] + 0.5 * ds * k2[0], x[1] + 0.5 * ds * k2[1]});
    const Point k4 = tangent({x[0] + ds * k3[0], x[1] + ds * k3[1]});
    return project({x[0] + ds * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0,
                    x[1] + ds * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0});
  }
};

struct Polyline {
  std::vector<Point> pts;
  std::vector<double> cum;  // arc length at each point
  double length = 0.0;
};

Polyline trace_closed(const Tracer& tr, const Point& seed, double ds) {
  Polyline pl;
  Point x = tr.project(seed);
  const Point start = x;
  pl.pts.push_back(x);
  pl.cum.push_back(0.0);
  double s = 0.0;
  const int max_steps = 5'000'000;
  for (int step = 0; step < max_steps; ++step) {
    const double d = torus_dist(x, start);
    if (step > 8 && d < ds) {
      pl.length = s + d;
      return pl;
    }
    x = tr.rk4(x, ds);
    s += ds;
    pl.pts.push_back(x);
    pl.cum.push_back(s);
  }
  throw std::runtime_error("Fermi trace did not close");
}

double min_dist_to(const Polyline& pl, const Point& x) {
  double best = 1e300;
  for (const Point& q : pl.pts) best = std::min(best, torus_dist(q, x));
  return best;
}

Point wrap(Point x) {
  for (double& c : x) {
    c = std::fmod(c, kTwoPi);
    if (c < 0) c += kTwoPi;
  }
  return x;
}

std::vector<Point> extrema(Periodic p) {
  if (uses_a2(p)) return {{0.0, 0.0}, {kPi, kPi}};
  return {{0.0, 0.0}, {4 * kPi / 3, 2 * kPi / 3}, {2 * kPi / 3, 4 * kPi / 3}};
}

std::vector<Point> seeds(const Tracer& tr) {
  std::vector<Point> out;
  auto bisect = [&](Point a, Point b) {
    double fa = tr.F(a);
    for (int it = 0; it < 80; ++it) {
      const Point m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      const double fm = tr.F(m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return Point{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
  };
  const int n = 64;
  const double h = kTwoPi / n, off = 0.0123456789;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Point a{off + i * h, off + k * h};
      const Point bx{a[0] + h, a[1]}, by{a[0], a[1] + h};
      if ((tr.F(a) < 0) != (tr.F(bx) < 0)) out.push_back(bisect(a, bx));
      if ((tr.F(a) < 0) != (tr.F(by) < 0)) out.push_back(bisect(a, by));
    }
  // Small curves around extrema can hide inside one scan cell.
  for (const Point& c : extrema(tr.p)) {
    const Point dir{0.9578262852211514, 0.28734788556634538};
    Point prev = c;
    const int steps = 4096;
    for (int k = 1; k <= steps; ++k) {
      const double r = kPi * k / steps;
      const Point q{c[0] + r * dir[0], c[1] + r * dir[1]};
      if ((tr.F(prev) < 0) != (tr.F(q) < 0)) {
        out.push_back(bisect(prev, q));
        break;
      }
      prev = q;
    }
  }
  return out;
}

}  // namespace

FermiSample fermi_sample(Periodic p, double lambda, int branch, int count, double threshold_tol) {
  if (count < 3) throw std::invalid_argument("fermi_sample needs at least 3 points");
  const auto bl = branches(p);
  if (branch < 0 || branch >= static_cast<int>(bl.size())) throw std::invalid_argument("bad branch index");
  if (bl[branch].flat) throw ThresholdError("flat band has no Fermi curve", 0.0);
  const auto z = branch_level(p, branch, lambda);
  if (!z) throw std::domain_error("empty level set");
  for (double c : critical_levels(p)) {
    const double d = std::abs(*z - c);
    if (d < threshold_tol) throw ThresholdError("energy at a threshold (level " + std::to_string(c) + ")", d);
  }
  const Tracer tr{p, *z};
  FermiSample out{lambda, branch, {}};
  std::vector<Polyline> traced;
  for (const Point& sd : seeds(tr)) {
    bool known = false;
    for (const auto& pl : traced)
      if (min_dist_to(pl, sd) < 0.02) known = true;
    if (known) continue;
    // Coarse pass for the length, then a fine pass scaled to it.
    Polyline coarse = trace_closed(tr, sd, 2e-3);
    const double ds = std::min(2e-3, coarse.length / (16.0 * count));
    Polyline pl = ds < 2e-3 ? trace_closed(tr, sd, ds) : std::move(coarse);
    traced.push_back(pl);
  }
  if (traced.empty()) throw std::domain_error("level set found empty by scan");
  for (const Polyline& pl : traced) {
    FermiCurve c;
    c.branch = branch;
    c.length = pl.length;
    const double step = pl.length / count;
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
      const double target = k * step;
      while (seg + 1 < pl.cum.size() && pl.cum[seg + 1] <= target) ++seg;
      const Point x = target > pl.cum[seg] ? tr.rk4(pl.pts[seg], target - pl.cum[seg]) : pl.pts[seg];
      c.points.push_back(wrap(x));
    }
    for (int k = 0; k < count; ++k) {
      const Point& x = c.points[k];
      const Point g = band_gradient(p, branch, x);
      const double gn = std::hypot(g[0], g[1]);
      if (gn < 1e-12) throw ThresholdError("vanishing band gradient on the Fermi curve", gn);
      c.weight.push_back(1.0 / gn);
      c.normal.push_back({g[0] / gn, g[1] / gn});
      c.tangent.push_back({-g[1] / gn, g[0] / gn});
      c.residual = std::max(c.residual, std::abs(band_function(p, branch, x) - lambda));
      const Point& y = c.points[(k + 1) % count];
      const double chord = torus_dist(x, y);
      const double kap = level_curvature(p, branch, x);
      const double arc = chord * (1.0 + kap * kap * chord * chord / 24.0);
      c.spacing_error = std::max(c.spacing_error, std::abs(arc - step));
    }
    c.curvature = curvature_at(p, branch, c.points, false);
    out.components.push_back(std::move(c));
  }
  return out;
}

CurvatureProfile curvature_profile(Periodic p, double lambda, int count, double zero_tol) {
  CurvatureProfile prof;
  prof.lambda = lambda;
  prof.min_abs_curvature = 1e300;
  for (const Branch& b : branches(p)) {
    if (b.flat) {
      if (std::abs(lambda - b.flat_value) < 1e-12) {
        prof.degenerate = true;
        prof.strictly_convex = false;
        prof.note += "flat band at this energy; ";
      }
      continue;
    }
    if (!branch_level(p, b.index, lambda)) continue;
    try {
      const FermiSample fs = fermi_sample(p, lambda, b.index, count);
      for (const FermiCurve& c : fs.components) {
        ++prof.components;
        const auto [mn, mx] = std::minmax_element(c.curvature.begin(), c.curvature.end());
        double mabs = 1e300;
        for (double k : c.curvature) mabs = std::min(mabs, std::abs(k));
        prof.min_abs_curvature = std::min(prof.min_abs_curvature, mabs);
        if (mabs < zero_tol) {
          prof.degenerate = true;
          prof.strictly_convex = false;
          prof.note += "curvature vanishes on branch " + std::to_string(b.index) + "; ";
        } else if ((*mn < 0) != (*mx < 0)) {
          prof.strictly_convex = false;
          prof.note += "curvature changes sign on branch " + std::to_string(b.index) + "; ";
        }
      }
    } catch (const ThresholdError& e) {
      prof.degenerate = true;
      prof.strictly_convex = false;
      prof.note += std::string(e.what()) + "; ";
    }
  }
  if (prof.components == 0 && !prof.degenerate) {
    prof.strictly_convex = false;
    prof.note += "empty Fermi set; ";
  }
  if (prof.min_abs_curvature == 1e300) prof.min_abs_curvature = 0.0;
  return prof;
}

std::vector<double> threshold_energies(Periodic p) {
  std::vector<double> out;
  for (const Branch& b : branches(p)) {
    if (b.flat) {
      out.push_back(b.flat_value);
      continue;
    }
    for (double c : critical_levels(p)) out.push_back(branch_value(p, b.index, c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double certify_epsilon(Periodic p, double anchor, int side, double max_eps, double tol) {
  // A window never extends past the nearest threshold energy: there the Fermi
  // curve passes through a critical point and its curvature degenerates.
  for (double t : threshold_energies(p)) {
    const double d = std::abs(t - anchor);
    if (d < 1e-12) continue;
    const bool on_side = side == 0 || (side > 0 ? t > anchor : t < anchor);
    if (on_side) max_eps = std::min(max_eps, d);
  }
  auto ok = [&](double eps) {
    if (side >= 0 && !curvature_profile(p, anchor + eps, 64).strictly_convex) return false;
    if (side <= 0 && !curvature_profile(p, anchor - eps, 64).strictly_convex) return false;
    return true;
  };
  const int scan = 16;
  double good = 0.0, bad = max_eps;
  for (int k = 1; k < scan; ++k) {
    const double e = max_eps * k / scan;
    if (!ok(e)) {
      bad = e;
      break;
    }
    good = e;
  }
  while (bad - good > tol) {
    const double m = 0.5 * (good + bad);
    if (ok(m)) good = m; else bad = m;
  }
  return good;
}

namespace {
Window interval(double lo, double hi, std::vector<double> ex, std::string text) {
  Window w;
  w.lo = lo;
  w.hi = hi;
  w.excluded = std::move(ex);
  w.text = std::move(text);
  return w;
}
Window eps_window(double anchor, int side, double max_eps, std::vector<double> ex, std::string text) {
  Window w;
  w.epsilon_qualified = true;
  w.anchor = anchor;
  w.side = side;
  w.max_eps = max_eps;
  w.lo = side > 0 ? anchor : anchor - max_eps;
  w.hi = side < 0 ? anchor : anchor + max_eps;
  w.excluded = std::move(ex);
  w.text = std::move(text);
  return w;
}
}  // namespace

ConvexWindowTable convex_windows(Periodic p, bool certify) {
  ConvexWindowTable t{p, {}};
  const double r = std::sqrt(0.5);
  switch (p) {
    case Periodic::Square:
      t.windows = {interval(-1, 0, {}, "(-1,0)"), interval(0, 1, {}, "(0,1)")};
      break;
    case Periodic::Subdivision:
      t.windows = {interval(-1, 1, {-r, 0.0, r}, "(-1,1) minus {-sqrt(1/2), 0, sqrt(1/2)}")};
      break;
    case Periodic::Ladder: t.windows = {interval(-1, 1, {-0.2, 0.2}, "(-1,1) minus {-1/5, 1/5}")}; break;
    case Periodic::Triangular:
      t.windows = {eps_window(-1, +1, 1.5, {}, "(-1,-1+eps)"), eps_window(0.5, -1, 1.5, {}, "(1/2-eps,1/2)")};
      break;
    case Periodic::Hexagonal:
      t.windows = {eps_window(-1, +1, 1.0, {}, "(-1,-1+eps)"), eps_window(0, 0, 1.0, {0.0}, "(-eps,eps) minus {0}"),
                   eps_window(1, -1, 1.0, {}, "(1-eps,1)")};
      break;
    case Periodic::Kagome:
      t.windows = {eps_window(-1, +1, 0.75, {}, "(-1,-1+eps)"),
                   eps_window(-0.25, 0, 0.5, {-0.25}, "(-1/4-eps,-1/4+eps) minus {-1/4}"),
                   eps_window(0.5, -1, 0.75, {}, "(1/2-eps,1/2)")};
      break;
    case Periodic::Graphite:
      t.windows = {eps_window(-1, +1, 0.5, {}, "(-1,-1+eps)"),
                   eps_window(-0.5, 0, 0.25, {-0.5}, "(-1/2-eps,-1/2+eps) minus {-1/2}"),
                   eps_window(0.5, 0, 0.25, {0.5}, "(1/2-eps,1/2+eps) minus {1/2}"),
                   eps_window(-0.25, 0, 0.25, {-0.25}, "(-1/4-eps,-1/4+eps) minus {-1/4}"),
                   eps_window(0.25, 0, 0.25, {0.25}, "(1/4-eps,1/4+eps) minus {1/4}"),
                   eps_window(1, -1, 0.5, {}, "(1-eps,1)")};
      break;
  }
  if (certify)
    for (Window& w : t.windows)
      if (w.epsilon_qualified) w.certified_epsilon = certify_epsilon(p, w.anchor, w.side, w.max_eps);
  return t;
}

std::vector<double> window_energies(Periodic p, const Window& w, int count) {
  const std::vector<double> thresholds = threshold_energies(p);
  std::vector<double> out;
  if (w.epsilon_qualified) {
    const double e = w.certified_epsilon;
    for (int k = 1; k <= count; ++k) {
      const double frac = double(k) / (count + 1);
      int side = w.side;
      if (side == 0) side = (k % 2) ? 1 : -1;
      out.push_back(w.anchor + side * e * frac);
    }
    return out;
  }
  // Stay clear of excluded points and of the interval ends.
  const double margin = 0.02 * (w.hi - w.lo);
  for (int k = 1; out.size() < static_cast<std::size_t>(count) && k < 1000; ++k) {
    const double l = w.lo + (w.hi - w.lo) * (k * 0.6180339887498949 - std::floor(k * 0.6180339887498949));
    bool clear = l > w.lo + margin && l < w.hi - margin;
    for (double x : w.excluded) clear = clear && std::abs(l - x) > margin;
    for (double x : thresholds) clear = clear && std::abs(l - x) > margin;
    if (clear) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace latinv::spectral
