#include <doctest.h>

#include <random>

#include "latinv/bvp.hpp"

using namespace latinv;

namespace {
std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = U(rng);
  return v;
}
Vec<double> random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N01;
  Vec<double> v(n);
  for (int i = 0; i < n; ++i) v(i) = N01(rng);
  return v;
}
}  // namespace

TEST_CASE("assembly on a single interior vertex") {
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-2, 2, -2, 2});
  const Region r = close_region(g, std::vector<VertexId>{VertexId{1, 0, 0}});
  const auto sys = assemble(r, Potential<double>::zero(1), Convention::Modified);
  CHECK(sys.h00(0, 0) == 1.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(sys.h01(0, k) == doctest::Approx(-1.0 / 3.0));
    CHECK(sys.h10(k, 0) == -1.0);
  }
  // Lambda = I - (1/3) ones in closed form.
  const DNMap<double> dn = dn_map(r, Potential<double>::zero(1), 0.0, Convention::Modified);
  const Mat<double> expect = Mat<double>::Identity(3, 3) - Mat<double>::Constant(3, 3, 1.0 / 3.0);
  CHECK((dn.m - expect).norm() < 1e-15);
  CHECK(is_regular(sys).regular);
}

TEST_CASE("parallelogram block sizes follow the vertex counts") {
  const HexParallelogram par = build_parallelogram(1);
  const int n = par.region.interior.size(), m = par.region.boundary.size();
  const auto sys = assemble(par.region, Potential<double>::zero(n), Convention::Modified);
  CHECK(sys.h00.rows() == n);
  CHECK(sys.h01.cols() == m);
  CHECK(sys.h10.rows() == m);
  CHECK(sys.h11.rows() == m);
  CHECK(m == 4 * 1 + 6);
  CHECK_THROWS_AS(assemble(par.region, Potential<double>::zero(n + 1), Convention::Modified), std::invalid_argument);
}

TEST_CASE("standard and modified conventions differ by the identity on the boundary") {
  std::mt19937_64 rng(4);
  const HexParallelogram par = build_parallelogram(3);
  const std::size_t n = par.region.interior.size();
  const double lambda = 0.3;
  const std::vector<double> V = uniform(rng, n, -0.5, 0.5);
  const Potential<double> pot = Potential<double>::from_v(V, lambda);
  for (std::size_t k = 0; k < n; ++k) CHECK(pot.v(lambda)[k] == doctest::Approx(V[k]).epsilon(1e-15));
  const auto mod = dn_map(par.region, pot, lambda, Convention::Modified, BoundaryDegreeRule::RegionDegree);
  const auto std_ = dn_map(par.region, pot, lambda, Convention::Standard, BoundaryDegreeRule::RegionDegree);
  CHECK((mod.m - std_.m - Mat<double>::Identity(mod.m.rows(), mod.m.cols())).norm() < 1e-13);
}

TEST_CASE("regularity") {
  std::mt19937_64 rng(8);
  const HexParallelogram par = build_parallelogram(3);
  const std::size_t n = par.region.interior.size();
  // Resistor analogue: lambda = -1 leaves Q = V >= 0 and a diagonally dominant block.
  for (int t = 0; t < 20; ++t) {
    const auto pot = Potential<double>::from_v(uniform(rng, n, 0.0, 2.0), -1.0);
    CHECK(is_regular(assemble(par.region, pot, Convention::Modified)).regular);
  }
  int regular = 0;
  for (int t = 0; t < 1000; ++t)
    regular += is_regular(assemble(par.region, Potential<double>{uniform(rng, n, -1, 1)}, Convention::Modified)).regular;
  CHECK(regular == 1000);

  // A singular interior block is reported, not solved.
  const LatticeGraph g = build_lattice(LatticeKind::Hexagonal, {-2, 2, -2, 2});
  const Region one = close_region(g, std::vector<VertexId>{VertexId{1, 0, 0}});
  const auto sing = assemble(one, Potential<double>{{-1.0}}, Convention::Modified);
  CHECK_FALSE(is_regular(sing).regular);
  CHECK_THROWS_AS(solve_dirichlet(sing, Vec<double>::Ones(3).eval()), RegularityError);
  CHECK_THROWS_AS(dn_map(one, Potential<double>{{-1.0}}, 0.0, Convention::Modified), RegularityError);
}

TEST_CASE("Dirichlet solves") {
  std::mt19937_64 rng(9);
  const HexParallelogram par = build_parallelogram(3);
  const Region& r = par.region;
  const int n = r.interior.size(), m = r.boundary.size();

  // Q = 0 in the modified convention: constants solve (1 - Delta) u = 0.
  const auto zero = assemble(r, Potential<double>::zero(n), Convention::Modified);
  const Vec<double> u = solve_dirichlet(zero, Vec<double>::Constant(m, 2.5).eval());
  CHECK((u.array() - 2.5).abs().maxCoeff() < 1e-13);

  // Maximum principle for the harmonic (Q = 0) problem.
  for (int t = 0; t < 20; ++t) {
    const Vec<double> f = random_vec(rng, m);
    const Vec<double> h = solve_dirichlet(zero, f);
    CHECK(h.maxCoeff() <= f.maxCoeff() + 1e-13);
    CHECK(h.minCoeff() >= f.minCoeff() - 1e-13);
  }

  // Indicator data against elimination on the full (interior + boundary) system.
  const Potential<double> pot{uniform(rng, n, -0.9, 0.9)};
  const auto sys = assemble(r, pot, Convention::Modified);
  Mat<double> full = Mat<double>::Zero(n + m, n + m);
  full.topLeftCorner(n, n) = sys.h00;
  full.topRightCorner(n, m) = sys.h01;
  full.bottomRightCorner(m, m) = Mat<double>::Identity(m, m);
  for (int b = 0; b < m; b += 3) {
    Vec<double> f = Vec<double>::Zero(m);
    f(b) = 1.0;
    Vec<double> rhs = Vec<double>::Zero(n + m);
    rhs.tail(m) = f;
    const Vec<double> ref = full.fullPivLu().solve(rhs).head(n);
    const Vec<double> got = solve_dirichlet(sys, f);
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(four_point_residual(sys, f, got) < 1e-10);
  }
}

TEST_CASE("D-N map: Schur complement, symmetry, linearity") {
  std::mt19937_64 rng(10);
  for (int N : {2, 4, 6}) {
    const HexParallelogram par = build_parallelogram(N);
    const Region& r = par.region;
    const int n = r.interior.size(), m = r.boundary.size();
    const Potential<double> pot{uniform(rng, n, -0.9, 0.9)};
    const auto sys = assemble(r, pot, Convention::Modified);
    const DNMap<double> dn = dn_map(r, pot, 0.3, Convention::Modified);
    // Every interior vertex of the parallelogram has degree 3, so the unit
    // boundary weighting makes Lambda symmetric.
    CHECK((dn.m - dn.m.transpose()).norm() < 1e-12 * dn.m.norm());
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vec<double> f = random_vec(rng, m);
      const Vec<double> via_solve = normal_data(sys, f, solve_dirichlet(sys, f));
      worst = std::max(worst, (dn.apply(f) - via_solve).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
    const Vec<double> f = random_vec(rng, m), g = random_vec(rng, m);
    CHECK((dn.apply(2.0 * f - 3.0 * g) - 2.0 * dn.apply(f) + 3.0 * dn.apply(g)).norm() < 1e-12 * (1 + f.norm() + g.norm()));
  }
}

TEST_CASE("weighted symmetry in the standard convention") {
  // With region degrees on the boundary, Lambda is symmetric for the
  // deg_D-weighted boundary product when every interior degree is equal.
  std::mt19937_64 rng(12);
  const LatticeGraph g = build_lattice(LatticeKind::Square, {-5, 5, -5, 5});
  std::vector<VertexId> omega;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 1; ++b) omega.push_back({1, a, b});
  const Region r = close_region(g, omega);
  const Potential<double> pot{uniform(rng, r.interior.size(), -0.5, 0.5)};
  const DNMap<double> dn = dn_map(r, pot, 0.2, Convention::Standard);
  Mat<double> W = Mat<double>::Zero(r.boundary.size(), r.boundary.size());
  for (std::size_t k = 0; k < r.boundary.size(); ++k) W(k, k) = r.deg_d[r.boundary[k]];
  const Mat<double> wl = W * dn.m;
  CHECK((wl - wl.transpose()).norm() < 1e-12 * wl.norm());
}

TEST_CASE("partial-data sweep") {
  std::mt19937_64 rng(13);
  for (int N : {1, 3, 6}) {
    const HexParallelogram par = build_parallelogram(N);
    const Region& r = par.region;
    const int n = r.interior.size(), m = r.boundary.size();
    const auto lpos = boundary_positions(r, par.left), rpos = boundary_positions(r, par.right);

    // Zero data gives the zero solution.
    Potential<quad> pot;
    for (double x : uniform(rng, n, -0.9, 0.9)) pot.q.push_back(quad(x));
    const auto z = solve_partial_data(par, pot, Vec<quad>::Zero(m).eval(), Vec<quad>::Zero(par.left.size()).eval());
    for (const quad& x : z) CHECK(x == 0);

    // Restricted data of a full solve reproduces it.
    Vec<quad> f(m);
    for (int k = 0; k < m; ++k) f(k) = quad(std::uniform_real_distribution<double>(-1, 1)(rng));
    const auto sys = assemble(r, pot, Convention::Modified);
    const Vec<quad> u = solve_dirichlet(sys, f);
    const DNMap<quad> dn = dn_map(r, pot, quad(0.3), Convention::Modified);
    const Vec<quad> g = dn.apply(f);
    Vec<quad> gl(par.left.size());
    for (std::size_t i = 0; i < par.left.size(); ++i) gl(i) = g(lpos[i]);
    Vec<quad> f_off = f;
    for (int p : rpos) f_off(p) = quad(1e6);  // ignored
    const auto sw = solve_partial_data(par, pot, f_off, gl);
    double err = 0.0;
    for (int k = 0; k < n; ++k) err = std::max(err, to_double(scalar_abs(quad(sw[r.interior[k]] - u(k)))));
    for (std::size_t i = 0; i < par.right.size(); ++i)
      err = std::max(err, to_double(scalar_abs(quad(sw[par.right[i]] - f(rpos[i])))));
    CHECK(err < 1e-8);

    // The left-right block is nonsingular.
    CHECK(block_singular_values(dn.m, lpos, rpos).minCoeff() > 0.0);
  }
}

TEST_CASE("boundary-data completion") {
  std::mt19937_64 rng(14);
  const HexParallelogram par = build_parallelogram(3);
  const Region& r = par.region;
  const int n = r.interior.size(), m = r.boundary.size();
  const Potential<double> pot{uniform(rng, n, -0.9, 0.9)};
  const DNMap<double> dn = dn_map(r, pot, 0.3, Convention::Modified);
  const auto lpos = boundary_positions(r, par.left), rpos = boundary_positions(r, par.right);

  const Vec<double> f = random_vec(rng, m);
  const Vec<double> g = dn.apply(f);
  Vec<double> gl(lpos.size());
  for (std::size_t i = 0; i < lpos.size(); ++i) gl(i) = g(lpos[i]);
  Vec<double> start = f;
  for (int p : rpos) start(p) = 0.0;
  const Vec<double> done = complete_boundary_data(dn.m, lpos, rpos, start, gl);
  CHECK((done - f).cwiseAbs().maxCoeff() < 1e-10);

  const Vec<double> zero = complete_boundary_data(dn.m, lpos, rpos, Vec<double>::Zero(m).eval(),
                                                  Vec<double>::Zero(lpos.size()).eval());
  CHECK(zero.norm() == 0.0);

  // Linearity bound: |delta f_R| <= |Lambda(L;R)^-1| |delta g|.
  const Eigen::VectorXd sv = block_singular_values(dn.m, lpos, rpos);
  Vec<double> delta = random_vec(rng, lpos.size()) * 1e-3;
  const Vec<double> moved = complete_boundary_data(dn.m, lpos, rpos, start, (gl + delta).eval());
  Vec<double> df(rpos.size());
  for (std::size_t i = 0; i < rpos.size(); ++i) df(i) = moved(rpos[i]) - done(rpos[i]);
  CHECK(df.norm() <= delta.norm() / sv.minCoeff() * (1 + 1e-9));

  CHECK_THROWS_AS(complete_boundary_data(dn.m, lpos, std::vector<int>(rpos.begin(), rpos.end() - 1), start, gl),
                  std::invalid_argument);
}
