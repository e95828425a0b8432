#include <doctest.h>

#include <cmath>

#include "latinv/scattering.hpp"

using namespace latinv;
using namespace latinv::scattering;

namespace {
double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Potential triple_site() {
  Potential V;
  const double vals[3] = {0.4, -0.3, 0.7};
  for (const VertexId& v : hexagon_vertices(0, 0))
    if (v.j == 1) {
      V.values.push_back(vals[V.sites.size()]);
      V.sites.push_back(v);
    }
  return V;
}
}  // namespace

TEST_CASE("free kernel symmetries") {
  for (LatticeKind k : {LatticeKind::Square, LatticeKind::Triangular, LatticeKind::Hexagonal}) {
    const FreeLattice L = free_lattice(k);
    CHECK(L.hops.size() == static_cast<std::size_t>(L.degree * L.sublattices));
    const VertexId a{1, 0, 0}, b{L.sublattices, 2, -1};
    const GreenValue ab = free_green(k, 0.3, a, b), ba = free_green(k, 0.3, b, a);
    CAPTURE(static_cast<int>(k));
    CHECK(std::abs(ab.value - ba.value) < 1e-10);
    const GreenValue aa = free_green(k, 0.3, a, a);
    CHECK(aa.value.imag() > 0);
    CHECK(aa.error < 1e-6);
  }
  CHECK_THROWS_AS(free_lattice(LatticeKind::Custom), std::invalid_argument);
}

TEST_CASE("thresholds are refused") {
  GreenOptions opt;
  CHECK_THROWS_AS(check_admissible(free_lattice(LatticeKind::Square), 0.0, opt), spectral::ThresholdError);
  CHECK_THROWS_AS(check_admissible(free_lattice(LatticeKind::Hexagonal), 1.0, opt), spectral::ThresholdError);
  CHECK_NOTHROW(check_admissible(free_lattice(LatticeKind::Hexagonal), 0.6, opt));
}

TEST_CASE("kernel against the absorbing window") {
  const VertexId src{1, 0, 0};
  const std::vector<VertexId> targets{{1, 0, 0}, {1, 1, 0}, {1, 3, -2}};
  const auto w = window_green(LatticeKind::Square, 0.6, src, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const GreenValue g = free_green(LatticeKind::Square, 0.6, targets[t], src);
    CHECK(rel(g.value, w[t]) < 1e-4);
  }
}

TEST_CASE("batch evaluation is thread independent") {
  const FreeLattice L = free_lattice(LatticeKind::Hexagonal);
  std::vector<GreenKey> keys;
  for (int d1 = -2; d1 <= 2; ++d1)
    for (int d2 = -2; d2 <= 2; ++d2) keys.push_back({0, 1, d1, d2});
  GreenOptions par, ser;
  ser.parallel = false;
  const auto a = green_batch(L, 0.6, keys, par);
  const auto b = green_batch_serial(L, 0.6, keys, ser);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].value == b[k].value);
}

TEST_CASE("Neville extrapolation is exact on polynomials") {
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  std::vector<cd> v;
  for (double e : eps) v.push_back(cd(1.5 - 2 * e + e * e * e, e));
  CHECK(std::abs(extrapolate_to_zero(eps, v) - cd(1.5, 0)) < 1e-12);
}

TEST_CASE("green table caching and serialization") {
  GreenTable G(LatticeKind::Hexagonal, 0.6);
  const std::vector<VertexId> vs{{1, 0, 0}, {2, 0, 0}, {1, 1, 0}};
  CHECK_THROWS(G(vs[0], vs[1]));
  G.require(vs, vs);
  const std::size_t n = G.size();
  G.require(vs, vs);
  CHECK(G.size() == n);
  const GreenTable H = GreenTable::from_json(G.to_json());
  CHECK(H.size() == n);
  for (const auto& a : vs)
    for (const auto& b : vs) {
      CHECK(H(a, b) == G(a, b));
      CHECK(G.minus(a, b) == std::conj(G(a, b)));
    }
}

TEST_CASE("perturbed resolvent") {
  GreenTable G(LatticeKind::Square, 0.3);
  const std::vector<VertexId> vs{{1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, -1, 2}};

  SUBCASE("zero potential") {
    const Eigen::MatrixXcd R = perturbed_resolvent(G, Potential{}, vs, vs);
    CHECK((R - G.block(vs, vs)).norm() < 1e-14);
  }
  SUBCASE("one site obeys Sherman-Morrison") {
    const double v = 0.8;
    const VertexId s{1, 0, 0};
    const Potential V{{s}, {v}};
    const Eigen::MatrixXcd R = perturbed_resolvent(G, V, vs, vs);
    G.require(vs, {s});
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = 0; j < vs.size(); ++j) {
        const cd expect = G(vs[i], vs[j]) - G(vs[i], s) * v * G(s, vs[j]) / (1.0 + v * G(s, s));
        CHECK(std::abs(R(i, j) - expect) < 1e-12);
      }
  }
  SUBCASE("resolvent equation") {
    const Potential V{{{1, 0, 0}, {1, 1, 0}}, {0.5, -0.4}};
    CHECK(resolvent_equation_residual(G, V, {{1, 0, 0}, {1, 2, 1}}, vs) < 1e-8);
  }
}

TEST_CASE("exterior Dirichlet problem") {
  GreenTable G(LatticeKind::Hexagonal, 0.6);
  const Interface I = make_interface(LatticeKind::Hexagonal, hexagon_vertices(0, 0));
  CHECK(I.sigma.size() == 6);
  const Eigen::Index m = static_cast<Eigen::Index>(I.sigma.size());

  const ExteriorSolution zero = exterior_dirichlet(G, I.sigma, Eigen::VectorXcd::Zero(m), I.outer);
  CHECK(zero.u.norm() == 0.0);

  Eigen::VectorXcd f(m);
  for (Eigen::Index k = 0; k < m; ++k) f(k) = cd(std::cos(k + 0.5), 0.1 * k);
  const ExteriorSolution sol = exterior_dirichlet(G, I.sigma, f, I.sigma);
  CHECK((sol.u - f).norm() < 1e-10 * f.norm());
}

TEST_CASE("single-layer operators") {
  const Interface I = make_interface(LatticeKind::Hexagonal, hexagon_vertices(0, 0));
  for (double lambda : {0.3, 0.6}) {
    GreenTable G(LatticeKind::Hexagonal, lambda);
    const LayerOperators L = layer_operators(G, I, triple_site());
    CAPTURE(lambda);
    CHECK(L.layer_identity < 1e-6);
    CHECK(L.layer_identity_minus < 1e-6);
    CHECK(L.adjoint < 1e-8);
    CHECK(L.routes < 1e-6);
  }
}

TEST_CASE("scattering amplitude") {
  GreenTable G(LatticeKind::Hexagonal, 0.6);
  SUBCASE("zero potential scatters nothing") {
    const Amplitude A = scattering_amplitude(G, Potential{}, 32);
    CHECK(A.A.norm() == 0.0);
    CHECK((A.S - Eigen::MatrixXcd::Identity(A.S.rows(), A.S.cols())).norm() < 1e-12);
  }
  SUBCASE("unitarity and reciprocity") {
    const Amplitude A = scattering_amplitude(G, triple_site(), 64);
    CHECK(A.unitarity < 1e-3);
    CHECK(reciprocity_defect(G, triple_site(), A.grid) < 1e-8);
  }
  SUBCASE("spectral density") {
    const FermiGrid F = fermi_grid(G.lattice(), 0.6, 128);
    CHECK(spectral_density_check(G, F, hexagon_vertices(0, 0)) < 1e-3);
  }
}

TEST_CASE("amplitude and D-N map identities") {
  GreenTable G(LatticeKind::Hexagonal, 0.6);
  const Interface I = make_interface(LatticeKind::Hexagonal, hexagon_vertices(0, 0));
  const AmplitudeIdentityReport r = verify_amplitude_identity(G, I, triple_site(), 128);
  CHECK(r.stage.empty());
  CHECK(r.residual < 1e-3);
  CHECK(to_json(r).contains("residual"));

  const Potential V1{{hexagon_vertices(0, 0)[0]}, {0.4}};
  const DifferenceIdentityReport d = verify_difference_identity(G, I, V1, triple_site(), 128);
  CHECK(d.residual < 1e-3);
}

TEST_CASE("potential JSON") {
  const Potential V = triple_site();
  const Potential W = potential_from_json(to_json(V));
  CHECK(W.sites == V.sites);
  CHECK(W.values == V.values);
  CHECK(V.at(V.sites[1]) == -0.3);
  CHECK(V.at({1, 9, 9}) == 0.0);
}
