#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "hydrolab/error.hpp"

using namespace hydrolab;
using testing::box;
using testing::warped;

constexpr double kPi = std::numbers::pi;

TEST_CASE("small box: node count, spacing and weights") {
  const auto m = box(1.0, 4);
  CHECK(m.node_count() == 64);
  CHECK(m.h == doctest::Approx(2.0 / 3.0));
  const double h3 = m.h * m.h * m.h;
  int interior = 0;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    CHECK(m.volume_weights[i] > 0.0);
    if (!m.boundary_mask[i]) {
      ++interior;
      CHECK(m.volume_weights[i] == doctest::Approx(h3).epsilon(1e-14));
    }
  }
  CHECK(interior == 8);
  // boundary nodes carry trapezoid fractions so the weights integrate the box
  CHECK(m.total_volume() == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("invalid specs name the invariant") {
  MetricSpec s;
  s.grid_points_per_axis = 2;
  CHECK_THROWS_AS(build_manifold(s), SpecError);
  s = {};
  s.box_half_width = -1.0;
  CHECK_THROWS_WITH_AS(build_manifold(s), doctest::Contains("half_width"), SpecError);
  s = {};
  s.kind = ManifoldKind::WarpedRadial;
  s.radial_points = 2;
  CHECK_THROWS_AS(build_manifold(s), SpecError);
  s = {};
  s.kind = ManifoldKind::WarpedRadial;
  s.warp_profile = WarpProfile::Tabulated;
  s.radial_points = 5;
  s.r_max = 1.0;
  s.tabulated_warp = {0.1, 0.25, 0.5, 0.75, 1.0};  // f(0) != 0
  CHECK_THROWS_AS(build_manifold(s), SpecError);
}

TEST_CASE("scalar curvature of the space forms") {
  const auto hyp = warped(WarpProfile::Hyperbolic, 5.0, 60, 2);
  for (double s : hyp.scalar_curvature) CHECK(s == doctest::Approx(-6.0).epsilon(1e-9));
  const auto eu = warped(WarpProfile::Euclidean, 5.0, 60, 2);
  for (double s : eu.scalar_curvature) CHECK(std::abs(s) < 1e-9);
  const auto bx = box(1.0, 6);
  for (double s : bx.scalar_curvature) CHECK(s == 0.0);
}

TEST_CASE("tabulated warp reproduces the analytic hyperbolic curvature") {
  MetricSpec s;
  s.kind = ManifoldKind::WarpedRadial;
  s.warp_profile = WarpProfile::Tabulated;
  s.r_max = 4.0;
  s.radial_points = 401;
  for (int i = 0; i < s.radial_points; ++i) s.tabulated_warp.push_back(std::sinh(i * s.r_max / (s.radial_points - 1)));
  const auto m = build_manifold(s);
  // finite differences of f lose accuracy near the pole where f^2 -> 0
  for (int i = 50; i < s.radial_points - 5; ++i) CHECK(m.scalar_curvature[i] == doctest::Approx(-6.0).epsilon(1e-3));
}

TEST_CASE("edge adjacency is symmetric with positive conductances") {
  for (const auto& m : {box(1.0, 5), warped(WarpProfile::Hyperbolic, 3.0, 20, 1)}) {
    for (const auto& e : m.edges) {
      CHECK(e.a != e.b);
      CHECK(e.conductance > 0.0);
    }
  }
}

TEST_CASE("geodesic distances") {
  const auto m = box(2.0, 5);  // h = 1, nodes at -2..2
  const int o = m.box_index(2, 2, 2), p = m.box_index(3, 3, 3);
  CHECK(geodesic_distance(m, o, p) == doctest::Approx(std::sqrt(3.0)));
  CHECK(geodesic_distance(m, p, p) == 0.0);
  const auto w = warped(WarpProfile::Hyperbolic, 10.0, 21);  // r_i = 0.5 i
  CHECK(geodesic_distance(w, 1, 3) == doctest::Approx(1.0));
  CHECK(geodesic_distance(w, 3, 3) == 0.0);
}

TEST_CASE("center node: origin on odd grids, lowest index among ties on even grids") {
  const auto odd = box(1.0, 5);
  CHECK(odd.center_node() == odd.box_index(2, 2, 2));
  const auto even = box(1.0, 4);
  CHECK(even.center_node() == even.box_index(1, 1, 1));
  const auto w = warped(WarpProfile::Euclidean, 2.0, 10, 2);
  CHECK(w.radius(w.center_node()) == 0.0);
  CHECK(w.mode_l(w.center_node()) == 0);
}

TEST_CASE("volume growth on a fine box at r = 0.5") {
  const auto m = box(1.0, 65);
  const auto rep = volume_growth_ratio(m, m.center_node(), {0.5});
  CHECK(rep.samples[0].ratio == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.05));
  CHECK_FALSE(rep.samples[0].truncated);
}

// Hyperbolic ball volume by trapezoid quadrature of 4 pi sinh^2 on a fine grid.
double hyperbolic_ball_volume(double r) {
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = r * i / n, f = 4.0 * kPi * std::sinh(x) * std::sinh(x);
    s += (i == 0 || i == n) ? 0.5 * f : f;
  }
  return s * r / n;
}

TEST_CASE("hyperbolic volume growth against the quadrature oracle") {
  const auto m = warped(WarpProfile::Hyperbolic, 4.0, 801);
  const std::vector<double> radii{0.5, 1.0, 2.0};
  const auto rep = volume_growth_ratio(m, m.center_node(), radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    CHECK(rep.samples[i].ratio >= 4.0 * kPi / 3.0);
    CHECK(rep.samples[i].ratio == doctest::Approx(hyperbolic_ball_volume(r) / (r * r * r)).epsilon(0.02));
    CHECK(hyperbolic_ball_volume(r) == doctest::Approx(kPi * (std::sinh(2 * r) - 2 * r)).epsilon(1e-6));
  }
}

TEST_CASE("small balls approach the Euclidean ratio on both backends") {
  const auto w = warped(WarpProfile::Hyperbolic, 1.0, 2001);
  const auto rw = volume_growth_ratio(w, w.center_node(), {0.05});
  CHECK(rw.samples[0].ratio == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.03));
  const auto b = box(0.5, 81);
  const auto rb = volume_growth_ratio(b, b.center_node(), {0.1});
  CHECK(rb.samples[0].ratio == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.1));
}

TEST_CASE("manifold round trip through text") {
  const auto m = box(1.0, 5);
  std::stringstream s;
  write_manifold(m, s);
  const auto r = read_manifold(s);
  REQUIRE(r.node_count() == m.node_count());
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    CHECK(r.volume_weights[i] == doctest::Approx(m.volume_weights[i]));
    CHECK(r.boundary_mask[i] == m.boundary_mask[i]);
  }
  CHECK(r.edges.size() == m.edges.size());
}
