#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "hydrolab/bundles.hpp"
#include "hydrolab/error.hpp"
#include "hydrolab/heat_green.hpp"

using namespace hydrolab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

double euclid_heat(double t, double d) { return std::pow(4 * kPi * t, -1.5) * std::exp(-d * d / (4 * t)); }

// h = 1/16 with the origin on the grid.
struct Fine {
  DiscreteManifold m = testing::box(2.0, 65);
  SparseHermitianOperator l = assemble_laplace_beltrami(m, BoundaryClosure::Exterior);
  int y = m.center_node();
};

const Fine& fine() {
  static Fine f;
  return f;
}

}  // namespace

TEST_CASE("discrete delta pairs to point values") {
  const auto m = testing::box(1.0, 7);
  const auto l = assemble_laplace_beltrami(m);
  const int y = m.center_node();
  const auto d = discrete_delta(l, y);
  FieldVector f(l.dimension(), 1);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = double(i) + 0.5;
  const int site = l.node_to_site(m.node_count())[y];
  CHECK(std::abs(l.inner(d.values, f.values) - f.values[site]) < 1e-12);
}

TEST_CASE("heat kernel at t = 0.1 against the Euclidean kernel") {
  const auto& f = fine();
  const auto col = heat_column(f.m, f.l, f.y, 0.1);
  CHECK(col.values[f.y] == doctest::Approx(0.7097).epsilon(0.05));
  CHECK(col.values[f.y] == doctest::Approx(euclid_heat(0.1, 0.0)).epsilon(0.05));
  const int x = f.m.box_index(32 + 8, 32, 32);  // d = 0.5
  REQUIRE(geodesic_distance(f.m, x, f.y) == doctest::Approx(0.5));
  CHECK(col.values[x] == doctest::Approx(0.3797).epsilon(0.05));
  CHECK(heat_mass(f.m, col) <= 1.0 + 1e-8);
  CHECK(heat_mass(f.m, col) > 0.99);  // little mass reaches the faces by t = 0.1
  for (int node : f.l.site_nodes()) CHECK(col.values[node] >= -1e-8 * col.values[f.y]);
}

TEST_CASE("Dirichlet heat kernel grows with the domain") {
  const auto small = testing::box(1.0, 17), large = testing::box(2.0, 33);  // both h = 1/8
  const auto ls = assemble_laplace_beltrami(small), ll = assemble_laplace_beltrami(large);
  const auto cs = heat_column(small, ls, small.center_node(), 0.2);
  const auto cl = heat_column(large, ll, large.center_node(), 0.2);
  for (int node : ls.site_nodes()) {
    const auto [i, j, k] = small.box_ijk(node);
    CHECK(cl.values[large.box_index(i + 8, j + 8, k + 8)] >= cs.values[node] - 1e-9);
  }
  CHECK(heat_mass(small, cs) < heat_mass(large, cl));
}

TEST_CASE("Gaussian fit on synthetic Euclidean samples") {
  std::vector<HeatSample> s;
  for (double t : {0.05, 0.1, 0.2, 0.5, 1.0})
    for (double d : {0.0, 0.25, 0.5, 1.0}) s.push_back({t, d, euclid_heat(t, d)});
  const auto fit = fit_gaussian_bound(s);
  CHECK(fit.C1 == doctest::Approx(std::pow(4 * kPi, -1.5)).epsilon(0.10));
  CHECK(std::abs(fit.C2 - 4.0) <= 0.5);
  CHECK(fit.sample_count == s.size());

  auto doubled = s;
  for (auto& x : doubled) x.p *= 2;
  const auto f2 = fit_gaussian_bound(doubled);
  CHECK(f2.C1 == doctest::Approx(2 * fit.C1).epsilon(1e-12));
  CHECK(f2.C2 == fit.C2);
}

TEST_CASE("envelope through a single sample") {
  const auto fit = fit_gaussian_bound({{1.0, 0.0, 0.01}});
  CHECK(fit.C1 == doctest::Approx(0.01));
  CHECK(fit.C2 == default_c2_grid().front());
  CHECK(fit.residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate samples are rejected") {
  CHECK_THROWS_AS(fit_gaussian_bound({}), SpecError);
  CHECK_THROWS_AS(fit_gaussian_bound({{1.0, 0.0, 0.0}}), SpecError);
  CHECK_THROWS_AS(fit_gaussian_bound({{0.0, 0.0, 1.0}}), SpecError);
}

TEST_CASE("Green's function against 1/(4 pi d)") {
  const auto& f = fine();
  const auto gs = green_via_solve(f.m, f.l, f.y);
  const int x5 = f.m.box_index(32, 32 + 8, 32), x25 = f.m.box_index(32, 32, 32 + 4);
  CHECK(gs.values[x5] == doctest::Approx(0.1591549).epsilon(0.05));
  CHECK(gs.values[x25] == doctest::Approx(0.3183099).epsilon(0.05));
  for (int node : f.l.site_nodes()) CHECK(gs.values[node] > 0.0);
}

TEST_CASE("heat quadrature agrees with the direct solve") {
  // h = 1/8; the quadrature cost grows like h^-2 per unit time
  const auto m = testing::box(2.0, 33);
  const auto l = assemble_laplace_beltrami(m, BoundaryClosure::Exterior);
  const int y = m.center_node();
  const auto gs = green_via_solve(m, l, y);
  const auto gh = green_via_heat(m, l, y, spectral_gap(l));
  const int x5 = m.box_index(16, 16 + 4, 16);
  CHECK(gh.values[x5] == doctest::Approx(0.1591549).epsilon(0.05));
  CHECK(gh.error_estimate >= 0.0);
  for (int node : l.site_nodes()) {
    if (geodesic_distance(m, node, y) < 2 * m.h * (1 - 1e-12)) continue;
    CHECK(gh.values[node] == doctest::Approx(gs.values[node]).epsilon(0.02));
  }
}

TEST_CASE("Green's function is symmetric") {
  const auto m = testing::box(1.0, 13);
  const auto l = assemble_laplace_beltrami(m);
  const int a = m.box_index(3, 5, 6), b = m.box_index(8, 4, 7);
  const auto ga = green_via_solve(m, l, a), gb = green_via_solve(m, l, b);
  CHECK(ga.values[b] == doctest::Approx(gb.values[a]).epsilon(1e-8));
}

TEST_CASE("heat quadrature needs the spectral gap") {
  const auto m = testing::box(1.0, 7);
  const auto l = assemble_laplace_beltrami(m);
  CHECK_THROWS_WITH(green_via_heat(m, l, m.center_node(), std::nullopt), doctest::Contains("smallest_eigenpairs"));
}

TEST_CASE("hyperbolic Green's function against the closed form") {
  // -G'' - 2 coth(r) G' = delta, G(R) = 0  =>  G = (coth r - coth R) / (4 pi)
  const double R = 8.0;
  const auto m = testing::warped(WarpProfile::Hyperbolic, R, 1601);
  const auto l = assemble_laplace_beltrami(m);
  const auto g = green_via_solve(m, l, m.center_node());
  for (int i = 100; i < 800; i += 50) {
    const double r = m.radius(i);
    const double exact = (1.0 / std::tanh(r) - 1.0 / std::tanh(R)) * kInv4Pi;
    CHECK(g.values[i] == doctest::Approx(exact).epsilon(0.02));
    CHECK(g.values[i] < kInv4Pi / r);
  }
}

TEST_CASE("predicted decay constant from the Euclidean kernel constants") {
  GaussianBoundFit fit;
  fit.C1 = std::pow(4 * kPi, -1.5);
  fit.C2 = 4.0;
  const auto m = testing::box(1.0, 9);
  const auto l = assemble_laplace_beltrami(m);
  const auto dec = green_decay_constant(m, green_via_solve(m, l, m.center_node()), fit);
  CHECK(dec.C3_predicted == doctest::Approx(kInv4Pi).epsilon(1e-12));
  fit.C1 *= 2;
  CHECK(green_decay_constant(m, green_via_solve(m, l, m.center_node()), fit).C3_predicted ==
        doctest::Approx(2 * kInv4Pi).epsilon(1e-12));
}

TEST_CASE("measured decay constant saturates 1/(4 pi)") {
  const auto& f = fine();
  GaussianBoundFit fit;
  fit.C1 = std::pow(4 * kPi, -1.5);
  fit.C2 = 4.0;
  const auto dec = green_decay_constant(f.m, green_via_solve(f.m, f.l, f.y), fit);
  CHECK(dec.C3_measured == doctest::Approx(kInv4Pi).epsilon(0.05));
  CHECK(geodesic_distance(f.m, dec.attaining_node, f.y) >= 2 * f.m.h * (1 - 1e-12));
}

TEST_CASE("Kato constant and its decay in r") {
  const auto m = testing::box(4.0, 41);
  const auto l = assemble_laplace_beltrami(m, BoundaryClosure::Exterior);
  const int y = m.center_node();
  const auto g = green_via_solve(m, l, y);
  const auto table = kato_class_constant(m, l, g, {1, 4, 16, 64}, spectral_gap(l));
  REQUIRE(table.size() == 4);
  CHECK(table[0].C == doctest::Approx(kInv4Pi).epsilon(0.10));
  CHECK(table[1].C == doctest::Approx(kInv4Pi / 2).epsilon(0.10));
  CHECK(table[0].attaining_node == y);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& k : table) {
    const double x = std::log(k.r), v = std::log(k.C);
    sx += x, sy += v, sxx += x * x, sxy += x * v;
    CHECK(k.C_sqrt_r == doctest::Approx(k.C * std::sqrt(k.r)));
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("Chapman-Kolmogorov residual") {
  const auto m = testing::box(1.0, 11);
  const auto l = assemble_laplace_beltrami(m);
  SemigroupOptions o;
  const int y = m.center_node();
  CHECK(chapman_kolmogorov_residual(l, y, 0.05, 0.05, o) <= 2 * o.tol);
  CHECK(chapman_kolmogorov_residual(l, y, 0.0, 0.1, o) <= o.tol);
  const auto w = testing::warped(WarpProfile::Hyperbolic, 4.0, 60, 1);
  CHECK(chapman_kolmogorov_residual(assemble_laplace_beltrami(w), w.center_node(), 0.3, 0.7, o) <= 2 * o.tol);
}

TEST_CASE("spectral gap of the unit cube") {
  const auto m = testing::box(0.5, 17);
  const double h = m.h;
  CHECK(spectral_gap(assemble_laplace_beltrami(m)) ==
        doctest::Approx(3 * (2 / (h * h)) * (1 - std::cos(kPi * h))).epsilon(1e-7));
}
