#include <doctest.h>

#include <random>
#include <set>

#include "latinv/reconstruction.hpp"

using namespace latinv;

namespace {
Potential<quad> random_q(std::mt19937_64& rng, std::size_t n, double amp = 0.9) {
  std::uniform_real_distribution<double> U(-amp, amp);
  Potential<quad> p;
  for (std::size_t k = 0; k < n; ++k) p.q.push_back(quad(U(rng)));
  return p;
}
double max_diff(const std::vector<quad>& a, const std::vector<quad>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, to_double(scalar_abs(quad(a[k] - b[k]))));
  return m;
}
}  // namespace

TEST_CASE("parallelogram sides") {
  for (int N = 1; N <= 6; ++N) {
    const HexParallelogram par = build_parallelogram(N);
    CHECK(par.top.size() == static_cast<std::size_t>(N + 1));
    CHECK(par.bottom.size() == static_cast<std::size_t>(N + 1));
    CHECK(par.left.size() == static_cast<std::size_t>(N + 2));
    CHECK(par.right.size() == static_cast<std::size_t>(N + 2));
    std::set<int> all;
    for (const auto* s : {&par.left, &par.right, &par.top, &par.bottom}) all.insert(s->begin(), s->end());
    CHECK(all.size() == par.region.boundary.size());
    CHECK(std::set<int>(par.region.boundary.begin(), par.region.boundary.end()) == all);
    CHECK(par.region.boundary.size() == static_cast<std::size_t>(4 * N + 6));
    // beta_k = -2 + k sqrt3 i, and sqrt3 i = 2w - 1.
    CHECK(par.eis(par.left[0]) == Eis{0, -2});
    for (int k = 0; k <= N; ++k) CHECK(par.eis(par.left[k + 1]) == Eis{-2 - k, 2 * k});
    // The half-turn maps the closure onto itself.
    for (int v : par.region.boundary) CHECK(par.region.is_boundary(par.rot[v]));
    for (int v : par.region.interior) CHECK(par.region.is_interior(par.rot[v]));
  }
}

TEST_CASE("probe lines and boundary data") {
  const HexParallelogram par = build_parallelogram(3);
  for (int k = 0; k <= 3; ++k) {
    const ProbeLine line = line_A(par, k);
    CHECK(hex::level_s(par.eis(par.top[k])) == line.level);
    const auto data = probe_boundary_data<double>(par, line);
    REQUIRE(data);
    const Vec<double>& f = data->first;
    const ProbeGeometry pg = probe_geometry(par, line);
    std::set<int> free(pg.free_side.begin(), pg.free_side.end());
    for (std::size_t b = 0; b < par.region.boundary.size(); ++b) {
      const int v = par.region.boundary[b];
      if (free.count(v)) continue;
      if (pg.on_line(par.eis(v))) CHECK(std::abs(f(b)) == 1.0);
      else CHECK(f(b) == 0.0);
    }
    CHECK(f(std::lower_bound(par.region.boundary.begin(), par.region.boundary.end(), data->second) -
            par.region.boundary.begin()) == 1.0);
  }
}

TEST_CASE("probe solutions vanish on the half-plane and alternate on the line") {
  std::mt19937_64 rng(21);
  const HexParallelogram par = build_parallelogram(3);
  const Region& r = par.region;
  const Potential<quad> pot = random_q(rng, r.interior.size());
  for (int frame : {0, 1})
    for (Family fam : {Family::A, Family::B})
      for (int k = 0; k <= 3; ++k) {
        ProbeLine line = fam == Family::A ? line_A(par, k) : line_B(par, k);
        line.frame = frame;
        const auto ps = probe_solution_forward<quad>(par, pot, line);
        if (!ps) continue;
        const ProbeFrame fr{&par, frame};
        const ProbeGeometry pg = probe_geometry(par, line);
        bool on_line_seen = false;
        for (int v : r.interior) {
          const Eis e = fr.at(v);
          if (pg.in_zero(e)) CHECK(to_double(scalar_abs(ps->u[v])) < 1e-10);
          if (pg.on_line(e)) {
            on_line_seen = true;
            CHECK(to_double(scalar_abs(quad(scalar_abs(ps->u[v]) - 1))) < 1e-10);
          }
        }
        CHECK(on_line_seen);
        CHECK(to_double(ps->pattern_error) < 1e-10);
      }
}

TEST_CASE("forward and inverse probe solutions agree") {
  std::mt19937_64 rng(22);
  const HexParallelogram par = build_parallelogram(4);
  const Region& r = par.region;
  const Potential<quad> pot = random_q(rng, r.interior.size());
  const DNMap<quad> dn = dn_map(r, pot, quad(0), Convention::Modified);
  std::vector<std::optional<quad>> known(par.graph->size());
  for (std::size_t k = 0; k < r.interior.size(); ++k) known[r.interior[k]] = pot.q[k];
  int compared = 0;
  double worst = 0.0;
  for (Family fam : {Family::A, Family::B})
    for (int k = 0; k <= 4; ++k) {
      const ProbeLine line = fam == Family::A ? line_A(par, k) : line_B(par, k);
      const auto fwd = probe_solution_forward<quad>(par, pot, line);
      const auto inv = probe_solution_inverse<quad>(par, dn, line, &known);
      if (!fwd) continue;
      REQUIRE(inv);
      for (int v : r.interior) {
        if (!inv->known[v]) continue;
        worst = std::max(worst, to_double(scalar_abs(quad(fwd->u[v] - inv->u[v]))));
        ++compared;
      }
    }
  CHECK(compared > 0);
  CHECK(worst < 1e-8);
}

TEST_CASE("the centre relation recovers Q on the probe line") {
  std::mt19937_64 rng(23);
  const HexParallelogram par = build_parallelogram(3);
  const Region& r = par.region;
  const LatticeGraph& g = *par.graph;
  const Potential<quad> pot = random_q(rng, r.interior.size());
  for (int k = 0; k <= 3; ++k) {
    const ProbeLine line = line_A(par, k);
    const auto ps = probe_solution_forward<quad>(par, pot, line);
    REQUIRE(ps);
    const ProbeGeometry pg = probe_geometry(par, line);
    for (std::size_t i = 0; i < r.interior.size(); ++i) {
      const int c = r.interior[i];
      if (!pg.on_line(par.eis(c))) continue;
      quad acc = 0;
      for (int w : g.adj[c]) acc += ps->u[w];
      const quad q = acc / quad(3) / ps->u[c] - 1;
      CHECK(to_double(scalar_abs(quad(q - pot.q[i]))) < 1e-20);
    }
  }
}

TEST_CASE("reconstruction examples") {
  const quad lambda(0.3);
  SUBCASE("zero potential") {
    const HexParallelogram par = build_parallelogram(3);
    const auto pot = Potential<quad>::zero(par.region.interior.size());
    const auto res = reconstruct_potential(par, dn_map(par.region, pot, lambda, Convention::Modified), lambda);
    for (const quad& q : res.q) CHECK(to_double(scalar_abs(q)) < 1e-20);
    for (const quad& v : res.v) CHECK(to_double(scalar_abs(quad(v - lambda - 1))) < 1e-20);
  }
  SUBCASE("a single bump") {
    const HexParallelogram par = build_parallelogram(3);
    const std::size_t n = par.region.interior.size();
    for (std::size_t at : {std::size_t(0), n / 2, n - 1}) {
      auto pot = Potential<quad>::zero(n);
      pot.q[at] = quad(0.5);
      const auto res = reconstruct_potential(par, dn_map(par.region, pot, lambda, Convention::Modified), lambda);
      CHECK(max_diff(res.q, pot.q) < 1e-20);
    }
  }
  SUBCASE("random potentials, N = 4") {
    std::mt19937_64 rng(24);
    const HexParallelogram par = build_parallelogram(4);
    double worst = 0.0, rot = 0.0;
    int trials = 0;
    for (int t = 0; t < 100; ++t) {
      const Potential<quad> pot = random_q(rng, par.region.interior.size());
      if (!is_regular(assemble(par.region, pot, Convention::Modified)).regular) continue;
      ReconstructionOptions opt;
      opt.verbose_log = false;
      const auto res = reconstruct_potential(par, dn_map(par.region, pot, lambda, Convention::Modified), lambda, opt);
      worst = std::max(worst, max_diff(res.q, pot.q));
      rot = std::max(rot, res.rotation_consistency);
      ++trials;
    }
    CHECK(trials > 90);
    CHECK(worst < 1e-7);
    CHECK(rot < 1e-8);
  }
}

TEST_CASE("boundary order does not matter and conventions are checked") {
  std::mt19937_64 rng(25);
  const HexParallelogram par = build_parallelogram(2);
  const Potential<quad> pot = random_q(rng, par.region.interior.size());
  DNMap<quad> dn = dn_map(par.region, pot, quad(0.3), Convention::Modified);
  // Reverse the boundary order.
  DNMap<quad> rev = dn;
  const int m = dn.m.rows();
  std::reverse(rev.boundary.begin(), rev.boundary.end());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) rev.m(i, j) = dn.m(m - 1 - i, m - 1 - j);
  const auto res = reconstruct_potential(par, rev, quad(0.3));
  CHECK(max_diff(res.q, pot.q) < 1e-20);
  CHECK_FALSE(res.log.empty());

  DNMap<quad> standard = dn;
  standard.convention = Convention::Standard;
  CHECK_THROWS_AS(reconstruct_potential(par, standard, quad(0.3)), std::invalid_argument);
}
