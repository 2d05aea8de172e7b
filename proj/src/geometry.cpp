#include "hydrolab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hydrolab/error.hpp"

namespace hydrolab {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double radial_spacing(const MetricSpec& s) { return s.r_max / (s.radial_points - 1); }

// 4 pi int_a^b f(r)^2 dr for the analytic profiles.
double shell_volume(WarpProfile profile, double a, double b) {
  switch (profile) {
    case WarpProfile::Euclidean:
      return kFourPi / 3.0 * (b * b * b - a * a * a);
    case WarpProfile::Hyperbolic: {
      auto prim = [](double r) { return std::sinh(2.0 * r) / 4.0 - r / 2.0; };
      return kFourPi * (prim(b) - prim(a));
    }
    case WarpProfile::Tabulated:
      break;
  }
  throw SpecError("shell_volume: tabulated profile has no closed form");
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  return kind == ManifoldKind::FlatBox ? "FlatBox" : "WarpedRadial";
}

std::string to_string(WarpProfile profile) {
  switch (profile) {
    case WarpProfile::Euclidean:
      return "Euclidean";
    case WarpProfile::Hyperbolic:
      return "Hyperbolic";
    case WarpProfile::Tabulated:
      return "Tabulated";
  }
  return "?";
}

ManifoldKind manifold_kind_from_string(const std::string& s) {
  if (s == "FlatBox") return ManifoldKind::FlatBox;
  if (s == "WarpedRadial") return ManifoldKind::WarpedRadial;
  throw SpecError("unknown manifold kind '" + s + "'");
}

WarpProfile warp_profile_from_string(const std::string& s) {
  if (s == "Euclidean") return WarpProfile::Euclidean;
  if (s == "Hyperbolic") return WarpProfile::Hyperbolic;
  if (s == "Tabulated") return WarpProfile::Tabulated;
  throw SpecError("unknown warp profile '" + s + "'");
}

double warp_value(WarpProfile profile, double r) {
  switch (profile) {
    case WarpProfile::Euclidean:
      return r;
    case WarpProfile::Hyperbolic:
      return std::sinh(r);
    case WarpProfile::Tabulated:
      break;
  }
  throw SpecError("warp_value: tabulated profile needs samples");
}

void MetricSpec::validate() const {
  if (kind == ManifoldKind::FlatBox) {
    if (grid_points_per_axis < 3) throw SpecError("invariant violated: grid_points_per_axis >= 3");
    if (!(box_half_width > 0.0)) throw SpecError("invariant violated: box_half_width > 0");
    return;
  }
  if (!(r_max > 0.0)) throw SpecError("invariant violated: r_max > 0");
  if (radial_points < 3) throw SpecError("invariant violated: radial_points >= 3");
  if (angular_mode_cutoff < 0) throw SpecError("invariant violated: angular_mode_cutoff >= 0");
  if (warp_profile != WarpProfile::Tabulated) return;
  if (static_cast<int>(tabulated_warp.size()) != radial_points)
    throw SpecError("invariant violated: tabulated warp sampled on the radial grid");
  for (double v : tabulated_warp)
    if (!std::isfinite(v)) throw SpecError("invariant violated: tabulated warp finite");
  if (tabulated_warp.front() != 0.0) throw SpecError("invariant violated: tabulated warp f(0) = 0");
  for (std::size_t i = 1; i < tabulated_warp.size(); ++i)
    if (!(tabulated_warp[i] > 0.0))
      throw SpecError("invariant violated: tabulated warp f > 0 on (0, r_max]");
  const double dr = radial_spacing(*this);
  for (std::size_t i = 1; i + 1 < tabulated_warp.size(); ++i) {
    const double d1 = (tabulated_warp[i + 1] - tabulated_warp[i - 1]) / (2 * dr);
    const double d2 =
        (tabulated_warp[i + 1] - 2 * tabulated_warp[i] + tabulated_warp[i - 1]) / (dr * dr);
    if (!std::isfinite(d1) || !std::isfinite(d2))
      throw SpecError("invariant violated: tabulated warp has finite differences");
  }
}

std::array<int, 3> DiscreteManifold::box_ijk(int node) const {
  return {node / (n * n), (node / n) % n, node % n};
}

double DiscreteManifold::radius(int node) const {
  if (!is_box()) return coords[node][0];
  const auto& x = coords[node];
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

int DiscreteManifold::center_node() const {
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < node_count(); ++i) {
    if (!is_box() && mode_l(static_cast<int>(i)) != 0) continue;
    const double r = radius(static_cast<int>(i));
    // rounding in the coordinates must not break exact ties
    if (r < best_r - 1e-12 * std::max(1.0, r)) {
      best_r = r;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<int> DiscreteManifold::interior_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < node_count(); ++i)
    if (!boundary_mask[i]) out.push_back(static_cast<int>(i));
  return out;
}

double DiscreteManifold::total_volume() const {
  double total = 0.0;
  for (std::size_t i = 0; i < node_count(); ++i) {
    if (!is_box() && mode_l(static_cast<int>(i)) != 0) continue;
    total += volume_weights[i];
  }
  return total;
}

namespace {

void build_box(DiscreteManifold& m) {
  const auto& s = m.spec;
  const int n = s.grid_points_per_axis;
  const double hw = s.box_half_width;
  m.n = n;
  m.h = s.periodic ? 2.0 * hw / n : 2.0 * hw / (n - 1);
  const std::size_t count = static_cast<std::size_t>(n) * n * n;
  m.coords.resize(count);
  m.volume_weights.resize(count);
  m.boundary_mask.assign(count, 0);
  m.scalar_curvature.assign(count, 0.0);
  m.angular_potential.assign(count, 0.0);
  const double h3 = m.h * m.h * m.h;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int id = m.box_index(i, j, k);
        m.coords[id] = {-hw + i * m.h, -hw + j * m.h, -hw + k * m.h};
        double w = h3;
        bool on_boundary = false;
        if (!s.periodic) {
          for (int c : {i, j, k}) {
            if (c == 0 || c == n - 1) {
              w *= 0.5;
              on_boundary = true;
            }
          }
        }
        m.volume_weights[id] = w;
        m.boundary_mask[id] = on_boundary ? 1 : 0;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int id = m.box_index(i, j, k);
        const std::array<int, 3> ijk{i, j, k};
        for (int axis = 0; axis < 3; ++axis) {
          auto nb = ijk;
          nb[axis] += 1;
          if (nb[axis] == n) {
            if (!s.periodic) continue;
            nb[axis] = 0;
          }
          m.edges.push_back({id, m.box_index(nb[0], nb[1], nb[2]), axis, m.h});
        }
      }
}

void build_warped(DiscreteManifold& m) {
  const auto& s = m.spec;
  const int nr = s.radial_points;
  const int lmax = s.angular_mode_cutoff;
  const double dr = radial_spacing(s);
  m.n = nr;
  m.h = dr;
  const bool tab = s.warp_profile == WarpProfile::Tabulated;

  std::vector<double> f(nr), face(nr - 1), cell(nr), scal(nr);
  for (int i = 0; i < nr; ++i) f[i] = tab ? s.tabulated_warp[i] : warp_value(s.warp_profile, i * dr);
  for (int i = 0; i + 1 < nr; ++i)
    face[i] = tab ? 0.5 * (f[i] + f[i + 1]) : warp_value(s.warp_profile, (i + 0.5) * dr);
  for (int i = 0; i < nr; ++i) {
    const double a = std::max(0.0, (i - 0.5) * dr);
    const double b = std::min(s.r_max, (i + 0.5) * dr);
    if (!tab) {
      cell[i] = shell_volume(s.warp_profile, a, b);
      continue;
    }
    // Trapezoid on [a, r_i] and [r_i, b] using face samples.
    const double fa = i > 0 ? face[i - 1] : f[0];
    const double fb = i + 1 < nr ? face[i] : f[i];
    const double ri = i * dr;
    cell[i] = kFourPi * (0.5 * (fa * fa + f[i] * f[i]) * (ri - a) +
                         0.5 * (f[i] * f[i] + fb * fb) * (b - ri));
  }
  for (int i = 0; i < nr; ++i) {
    switch (s.warp_profile) {
      case WarpProfile::Euclidean:
        scal[i] = 0.0;
        break;
      case WarpProfile::Hyperbolic:
        scal[i] = -6.0;
        break;
      case WarpProfile::Tabulated: {
        if (i == 0) break;
        const int lo = std::max(0, i - 1), hi = std::min(nr - 1, i + 1);
        const double d1 = (f[hi] - f[lo]) / ((hi - lo) * dr);
        const int c = std::clamp(i, 1, nr - 2);
        const double d2 = (f[c + 1] - 2 * f[c] + f[c - 1]) / (dr * dr);
        scal[i] = 2.0 * (1.0 - d1 * d1) / (f[i] * f[i]) - 4.0 * d2 / f[i];
        break;
      }
    }
  }
  if (tab) scal[0] = scal[1];

  const int modes = (lmax + 1) * (lmax + 1);
  const std::size_t count = static_cast<std::size_t>(modes) * nr;
  m.coords.resize(count);
  m.volume_weights.resize(count);
  m.boundary_mask.assign(count, 0);
  m.scalar_curvature.resize(count);
  m.angular_potential.assign(count, 0.0);
  for (int l = 0; l <= lmax; ++l)
    for (int mm = -l; mm <= l; ++mm) {
      const int mode = l * l + l + mm;
      for (int i = 0; i < nr; ++i) {
        const int id = mode * nr + i;
        m.coords[id] = {i * dr, static_cast<double>(l), static_cast<double>(mm)};
        m.volume_weights[id] = cell[i];
        m.scalar_curvature[id] = scal[i];
        const bool pole_regularity = (i == 0 && l > 0);
        m.boundary_mask[id] = (i == nr - 1 || pole_regularity) ? 1 : 0;
        if (i > 0) m.angular_potential[id] = l * (l + 1) / (f[i] * f[i]);
        if (i + 1 < nr) m.edges.push_back({id, id + 1, -1, kFourPi * face[i] * face[i] / dr});
      }
    }
}

}  // namespace

DiscreteManifold build_manifold(const MetricSpec& spec) {
  spec.validate();
  DiscreteManifold m;
  m.spec = spec;
  if (spec.kind == ManifoldKind::FlatBox)
    build_box(m);
  else
    build_warped(m);
  return m;
}

double geodesic_distance(const DiscreteManifold& m, int x, int y) {
  const auto count = static_cast<int>(m.node_count());
  if (x < 0 || y < 0 || x >= count || y >= count)
    throw SpecError("geodesic_distance: node index out of range");
  if (!m.is_box()) return std::abs(m.coords[x][0] - m.coords[y][0]);
  double d2 = 0.0;
  const double period = 2.0 * m.spec.box_half_width;
  for (int a = 0; a < 3; ++a) {
    double d = m.coords[x][a] - m.coords[y][a];
    if (m.spec.periodic) d -= period * std::round(d / period);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

VolumeGrowthReport volume_growth_ratio(const DiscreteManifold& m, int center,
                                       const std::vector<double>& radii) {
  double reach = 0.0;
  if (m.is_box()) {
    reach = m.spec.box_half_width;
    if (!m.spec.periodic)
      for (int a = 0; a < 3; ++a)
        reach = std::min(reach, m.spec.box_half_width - std::abs(m.coords[center][a]));
  } else {
    reach = m.spec.r_max - m.coords[center][0];
  }
  std::vector<double> dist(m.node_count());
  for (std::size_t i = 0; i < m.node_count(); ++i)
    dist[i] = geodesic_distance(m, center, static_cast<int>(i));

  VolumeGrowthReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    if (!(r > 0.0)) throw SpecError("volume_growth_ratio: radii must be positive");
    double vol = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      if (!m.is_box() && m.mode_l(static_cast<int>(i)) != 0) continue;
      if (dist[i] < r) vol += m.volume_weights[i];
    }
    const double ratio = vol / (r * r * r);
    rep.samples.push_back({r, vol, ratio, r > reach});
    rep.min_ratio = std::min(rep.min_ratio, ratio);
  }
  return rep;
}

namespace {

nlohmann::json spec_json(const MetricSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["box_half_width"] = s.box_half_width;
  j["grid_points_per_axis"] = s.grid_points_per_axis;
  j["periodic"] = s.periodic;
  j["warp_profile"] = to_string(s.warp_profile);
  j["r_max"] = s.r_max;
  j["radial_points"] = s.radial_points;
  j["angular_mode_cutoff"] = s.angular_mode_cutoff;
  if (!s.tabulated_warp.empty()) j["tabulated_warp"] = s.tabulated_warp;
  return j;
}

MetricSpec spec_from_json(const nlohmann::json& j) {
  MetricSpec s;
  s.kind = manifold_kind_from_string(j.at("kind").get<std::string>());
  s.box_half_width = j.value("box_half_width", s.box_half_width);
  s.grid_points_per_axis = j.value("grid_points_per_axis", s.grid_points_per_axis);
  s.periodic = j.value("periodic", s.periodic);
  s.warp_profile = warp_profile_from_string(j.value("warp_profile", std::string("Euclidean")));
  s.r_max = j.value("r_max", s.r_max);
  s.radial_points = j.value("radial_points", s.radial_points);
  s.angular_mode_cutoff = j.value("angular_mode_cutoff", s.angular_mode_cutoff);
  if (j.contains("tabulated_warp")) s.tabulated_warp = j["tabulated_warp"].get<std::vector<double>>();
  return s;
}

}  // namespace

void write_manifold(const DiscreteManifold& m, std::ostream& out) {
  nlohmann::json header;
  header["spec"] = spec_json(m.spec);
  header["node_count"] = m.node_count();
  header["edge_count"] = m.edges.size();
  header["spacing"] = m.h;
  out << header.dump() << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto& x = m.coords[i];
    out << i << ' ' << x[0] << ' ' << x[1] << ' ' << x[2] << ' ' << m.volume_weights[i] << ' '
        << int(m.boundary_mask[i]) << ' ' << m.scalar_curvature[i] << '\n';
  }
}

DiscreteManifold read_manifold(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SpecError("read_manifold: missing header");
  const auto header = nlohmann::json::parse(line);
  DiscreteManifold m = build_manifold(spec_from_json(header.at("spec")));
  const auto count = header.at("node_count").get<std::size_t>();
  if (count != m.node_count()) throw SpecError("read_manifold: node count does not match spec");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t id;
    int flag;
    auto& x = m.coords[i];
    if (!(in >> id >> x[0] >> x[1] >> x[2] >> m.volume_weights[i] >> flag >> m.scalar_curvature[i]))
      throw SpecError("read_manifold: truncated node table");
    if (id != i) throw SpecError("read_manifold: node table out of order");
    m.boundary_mask[i] = static_cast<std::uint8_t>(flag);
  }
  return m;
}

}  // namespace hydrolab
