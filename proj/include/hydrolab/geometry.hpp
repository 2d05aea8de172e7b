#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hydrolab {

enum class ManifoldKind { FlatBox, WarpedRadial };
enum class WarpProfile { Euclidean, Hyperbolic, Tabulated };

std::string to_string(ManifoldKind kind);
std::string to_string(WarpProfile profile);
ManifoldKind manifold_kind_from_string(const std::string& s);
WarpProfile warp_profile_from_string(const std::string& s);

struct MetricSpec {
  ManifoldKind kind = ManifoldKind::FlatBox;

  // FlatBox: [-half_width, half_width]^3 sampled with n points per axis.
  double box_half_width = 4.0;
  int grid_points_per_axis = 48;
  // Periodic torus variant of the box (no boundary). Used for symbol checks.
  bool periodic = false;

  // WarpedRadial: metric dr^2 + f(r)^2 dOmega^2 on a ball of radius r_max.
  WarpProfile warp_profile = WarpProfile::Euclidean;
  double r_max = 8.0;
  int radial_points = 200;
  int angular_mode_cutoff = 0;
  // Samples of f at the radial nodes r_i = i * r_max / (radial_points - 1).
  std::vector<double> tabulated_warp;

  // Throws SpecError naming the first violated invariant.
  void validate() const;
};

struct Edge {
  std::int32_t a;
  std::int32_t b;
  // FlatBox: axis 0..2 of the step a -> b (b = a + e_axis). Warped: -1.
  std::int32_t axis;
  // Symmetric conductance a_ab; the Laplacian row is (1/w_a) sum_b a_ab (u_a - u_b).
  double conductance;
};

// Discrete Riemannian 3-manifold. Immutable after build_manifold().
//
// FlatBox nodes are lattice points x = -half_width + (i, j, k) * h, flattened
// as (i * n + j) * n + k. The outer shell is Dirichlet boundary. Interior
// weights are h^3; boundary weights carry the trapezoid fraction so the total
// equals the box volume.
//
// WarpedRadial nodes are (radial sample r_i, spherical-harmonic mode (l, m)),
// flattened as mode * radial_points + i with mode = l^2 + l + m. A node value
// is the coefficient of sqrt(4 pi) Y_lm, so l = 0 values are plain function
// values of radial functions and every node carries the shell volume
// 4 pi int f^2 dr as its weight.
struct DiscreteManifold {
  MetricSpec spec;
  std::vector<std::array<double, 3>> coords;  // FlatBox: x; warped: (r, l, m)
  std::vector<double> volume_weights;
  std::vector<std::uint8_t> boundary_mask;
  std::vector<double> scalar_curvature;
  std::vector<Edge> edges;
  // Diagonal term l(l+1)/f^2 on warped nodes; zero on the box.
  std::vector<double> angular_potential;

  double h = 0.0;  // box spacing or radial spacing
  int n = 0;       // points per axis (box) or radial points (warped)

  std::size_t node_count() const { return coords.size(); }
  bool is_box() const { return spec.kind == ManifoldKind::FlatBox; }

  int box_index(int i, int j, int k) const { return (i * n + j) * n + k; }
  std::array<int, 3> box_ijk(int node) const;
  int radial_index(int node) const { return node % n; }
  int mode_index(int node) const { return node / n; }
  int mode_l(int node) const { return static_cast<int>(coords[node][1]); }
  double radius(int node) const;  // distance from the origin / pole

  // Node closest to the coordinate origin (ties: lowest index). On warped
  // grids this is the l = 0 pole node.
  int center_node() const;
  std::vector<int> interior_nodes() const;
  // FlatBox: (2 half_width)^3 up to rounding; warped: sum of l = 0 weights.
  double total_volume() const;
};

DiscreteManifold build_manifold(const MetricSpec& spec);

// Warp function and derivatives for the analytic profiles.
double warp_value(WarpProfile profile, double r);

double geodesic_distance(const DiscreteManifold& m, int x, int y);

struct VolumeGrowthSample {
  double r;
  double volume;
  double ratio;     // vol(K_r) / r^3
  bool truncated;   // the ball leaves the discretized domain
};

struct VolumeGrowthReport {
  std::vector<VolumeGrowthSample> samples;
  double min_ratio;
};

VolumeGrowthReport volume_growth_ratio(const DiscreteManifold& m, int center,
                                       const std::vector<double>& radii);

// JSON header line followed by "node x1 x2 x3 weight boundary scal" rows.
void write_manifold(const DiscreteManifold& m, std::ostream& out);
DiscreteManifold read_manifold(std::istream& in);

}  // namespace hydrolab
