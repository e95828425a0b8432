#include <doctest.h>

#include <cmath>
#include <random>

#include "latinv/spectral.hpp"

using namespace latinv::spectral;

namespace {
const double PI = std::acos(-1.0);
}

TEST_CASE("closed-form characteristic polynomials") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-PI, PI), L(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const Point x{U(rng), U(rng)};
    const double l = L(rng);
    CHECK(char_poly(Periodic::Square, x, l) == doctest::Approx(-0.5 * (a2(x) + 2 * l)).epsilon(1e-14));
    CHECK(char_poly(Periodic::Hexagonal, x, l) ==
          doctest::Approx(-2.0 / 9.0 * (b2(x) - (9 * l * l - 3) / 2)).epsilon(1e-12));
    CHECK(char_poly(Periodic::Triangular, x, l) == doctest::Approx(-(b2(x) + 3 * l) / 3).epsilon(1e-14));
  }
  // Hexagonal at the origin: b2 = 3, so the roots are lambda = +-1.
  CHECK(b2({0, 0}) == 3.0);
  CHECK(std::abs(char_poly(Periodic::Hexagonal, {0, 0}, 1.0)) < 1e-15);
  CHECK(std::abs(char_poly(Periodic::Hexagonal, {0, 0}, -1.0)) < 1e-15);
  CHECK(std::abs(char_poly(Periodic::Hexagonal, {0, 0}, 0.5)) > 0.1);
}

TEST_CASE("ranges of a2 and b2") {
  CHECK(b2({4 * PI / 3, 2 * PI / 3}) == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(a2({PI, PI}) == -2.0);
  CHECK(a2({0, 0}) == 2.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-PI, PI);
  for (int t = 0; t < 10000; ++t) {
    const Point x{U(rng), U(rng)};
    CHECK((b2(x) >= -1.5 - 1e-12 && b2(x) <= 3.0 + 1e-12));
    CHECK((a2(x) >= -2.0 && a2(x) <= 2.0));
  }
}

TEST_CASE("determinant consistency, Hermiticity and spectrum bounds") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-PI, PI), L(-1, 1);
  for (Periodic p : all_periodic()) {
    double worst_det = 0.0, worst_herm = 0.0, worst_bound = 0.0;
    for (int t = 0; t < 10000; ++t) {
      const Point x{U(rng), U(rng)};
      const double l = L(rng);
      if (has_symbol(p)) {
        const Eigen::MatrixXcd h = symbol(p, x);
        worst_herm = std::max(worst_herm, (h - h.adjoint()).norm());
        worst_det = std::max(worst_det, std::abs(char_poly_from_symbol(p, x, l) - char_poly(p, x, l)));
      }
      for (double b : bands(p, x)) worst_bound = std::max(worst_bound, std::abs(b) - 1.0);
    }
    CAPTURE(to_string(p));
    CHECK(worst_det < 1e-10);
    CHECK(worst_herm < 1e-14);
    CHECK(worst_bound < 1e-12);
  }
}

TEST_CASE("band ordering along a path") {
  for (Periodic p : all_periodic()) {
    std::vector<double> prev;
    for (int k = 0; k <= 400; ++k) {
      const double s = -PI + 2 * PI * k / 400.0;
      const std::vector<double> b = bands(p, {s, 0.37 * s + 0.2});
      CHECK(std::is_sorted(b.begin(), b.end()));
      if (!prev.empty())
        for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(b[j] - prev[j]) < 0.1);
      prev = b;
    }
  }
}

TEST_CASE("Fermi samples") {
  const FermiSample h = fermi_sample(Periodic::Hexagonal, 0.95, 1, 256);
  REQUIRE(h.components.size() == 1);
  const FermiCurve& c = h.components[0];
  CHECK(c.points.size() == 256);
  CHECK(c.residual < 1e-10);
  CHECK(c.spacing_error < 1e-6);
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    CHECK(c.weight[k] > 0);
    CHECK(std::isfinite(c.weight[k]));
    // Near the top of the band the curve hugs x = 0.
    const double y1 = std::remainder(c.points[k][0], 2 * PI), y2 = std::remainder(c.points[k][1], 2 * PI);
    CHECK(std::hypot(y1, y2) < 1.0);
  }

  // lambda = 1 is the band maximum: the level set collapses to a point.
  CHECK_THROWS_AS(fermi_sample(Periodic::Hexagonal, 1.0, 1, 64), ThresholdError);
  // The square lambda = 0 level set passes through the saddle points.
  CHECK_THROWS_AS(fermi_sample(Periodic::Square, 0.0, 0, 64), ThresholdError);
}

TEST_CASE("square lambda = 0 is the straight-segment square") {
  for (int k = 0; k < 50; ++k) {
    const double s = -PI + 2 * PI * k / 50.0;
    const Point x{s, PI - s};
    CHECK(std::abs(a2(x)) < 1e-14);
  }
  const CurvatureProfile p = curvature_profile(Periodic::Square, 0.0, 256);
  CHECK(p.degenerate);
  CHECK_FALSE(p.strictly_convex);
}

TEST_CASE("curvature signs") {
  const FermiSample h = fermi_sample(Periodic::Hexagonal, 0.98, 1, 256);
  int pos = 0, neg = 0;
  for (double k : h.components[0].curvature) (k > 0 ? pos : neg)++;
  CHECK((pos == 0 || neg == 0));
  CHECK(curvature_profile(Periodic::Hexagonal, 0.05, 256).strictly_convex);
  CHECK(curvature_profile(Periodic::Hexagonal, -0.05, 256).strictly_convex);
}

TEST_CASE("window table transcription") {
  const ConvexWindowTable sq = convex_windows(Periodic::Square, false);
  REQUIRE(sq.windows.size() == 2);
  CHECK(sq.windows[0].lo == -1.0);
  CHECK(sq.windows[0].hi == 0.0);
  CHECK(sq.windows[1].lo == 0.0);
  CHECK(sq.windows[1].hi == 1.0);

  const ConvexWindowTable la = convex_windows(Periodic::Ladder, false);
  REQUIRE(la.windows.size() == 1);
  CHECK(la.windows[0].excluded == std::vector<double>{-0.2, 0.2});

  const ConvexWindowTable tr = convex_windows(Periodic::Triangular, true);
  bool found = false;
  for (const Window& w : tr.windows)
    if (w.epsilon_qualified && w.anchor == 0.5) {
      found = true;
      CHECK(w.certified_epsilon > 0.01);
    }
  CHECK(found);
}

TEST_CASE("parallel and serial curvature agree bitwise") {
  const FermiSample h = fermi_sample(Periodic::Kagome, -0.9, 0, 512);
  std::vector<Point> xs;
  for (const FermiCurve& c : h.components) xs.insert(xs.end(), c.points.begin(), c.points.end());
  CHECK(curvature_at(Periodic::Kagome, h.branch, xs, true) == curvature_at(Periodic::Kagome, h.branch, xs, false));
}
