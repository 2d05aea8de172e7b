#include "hydrolab/heat_green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "hydrolab/error.hpp"

namespace hydrolab {

namespace {

int site_of(const SparseHermitianOperator& l, int node) {
  const auto& nodes = l.site_nodes();
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
  if (it == nodes.end() || *it != node) throw SpecError("base point is not an active node");
  return static_cast<int>(it - nodes.begin());
}

std::vector<double> real_node_field(const SparseHermitianOperator& l, const FieldVector& f, std::size_t nodes) {
  std::vector<double> out(nodes, 0.0);
  for (std::size_t s = 0; s < l.dimension(); ++s) out[l.site_nodes()[s]] = f.values[s].real();
  return out;
}

// t_min rho^k, k = 0..K with K even and t_K >= t_max.
std::vector<double> geometric_grid(double t_min, double ratio, double t_max) {
  if (!(t_min > 0.0) || !(ratio > 1.0)) throw SpecError("time grid: t_min > 0 and ratio > 1 required");
  int k = static_cast<int>(std::ceil(std::log(std::max(t_max, t_min) / t_min) / std::log(ratio)));
  k = std::max(k, 2);
  if (k % 2) ++k;
  std::vector<double> t(k + 1);
  for (int i = 0; i <= k; ++i) t[i] = t_min * std::pow(ratio, i);
  return t;
}

double resolve_t_min(const DiscreteManifold& m, const TimeGridSpec& grid) {
  return grid.t_min > 0.0 ? grid.t_min : 0.25 * m.h * m.h;
}

}  // namespace

FieldVector discrete_delta(const SparseHermitianOperator& l, int node) {
  if (l.block_size() != 1) throw SpecError("discrete_delta: scalar operator required");
  FieldVector d(l.dimension(), 1);
  const int s = site_of(l, node);
  d.values[s] = 1.0 / l.site_weights()[s];
  return d;
}

HeatColumn heat_column(const DiscreteManifold& m, const SparseHermitianOperator& l, int y, double t,
                       const SemigroupOptions& opts) {
  if (!(t > 0.0)) throw SpecError("heat_column: t > 0 required");
  const auto u = apply_semigroup(l, t, discrete_delta(l, y), opts);
  return {y, t, real_node_field(l, u, m.node_count())};
}

double heat_mass(const DiscreteManifold& m, const HeatColumn& col) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.node_count(); ++i) s += m.volume_weights[i] * col.values[i];
  return s;
}

std::vector<HeatSample> collect_heat_samples(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                                             const std::vector<double>& times, double max_distance,
                                             const SemigroupOptions& opts) {
  auto sorted = times;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || !(sorted.front() > 0.0)) throw SpecError("collect_heat_samples: positive times required");
  std::vector<double> dist(l.dimension());
  for (std::size_t s = 0; s < l.dimension(); ++s) dist[s] = geodesic_distance(m, y, l.site_nodes()[s]);
  std::vector<HeatSample> out;
  FieldVector u = discrete_delta(l, y);
  double now = 0.0;
  for (double t : sorted) {
    u = apply_semigroup(l, t - now, u, opts);
    now = t;
    for (std::size_t s = 0; s < l.dimension(); ++s)
      if (dist[s] <= max_distance && u.values[s].real() > 0.0) out.push_back({t, dist[s], u.values[s].real()});
  }
  return out;
}

std::vector<double> default_c2_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 12; ++i) g.push_back(2.0 + 0.5 * i);
  return g;
}

GaussianBoundFit fit_gaussian_bound(const std::vector<HeatSample>& samples, const std::vector<double>& c2_grid) {
  if (samples.empty()) throw SpecError("fit_gaussian_bound: no samples");
  if (c2_grid.empty()) throw SpecError("fit_gaussian_bound: empty C2 grid");
  for (const auto& s : samples)
    if (!(s.t > 0.0) || !(s.p > 0.0) || !(s.d >= 0.0) || !std::isfinite(s.p))
      throw SpecError("fit_gaussian_bound: samples need t > 0, p > 0, d >= 0");
  GaussianBoundFit fit;
  fit.C1 = std::numeric_limits<double>::infinity();
  for (double c2 : c2_grid) {
    double c1 = 0.0;
    for (const auto& s : samples)
      c1 = std::max(c1, s.p * std::pow(s.t, 1.5) * std::exp(s.d * s.d / (c2 * s.t)));
    if (c1 < fit.C1 * (1.0 - 1e-12)) {
      fit.C1 = c1;
      fit.C2 = c2;
    }
  }
  double gap = 0.0;
  fit.t_min = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double env = fit.C1 * std::pow(s.t, -1.5) * std::exp(-s.d * s.d / (fit.C2 * s.t));
    gap += std::log(env / s.p);
    fit.t_min = std::min(fit.t_min, s.t);
    fit.t_max = std::max(fit.t_max, s.t);
    fit.max_distance = std::max(fit.max_distance, s.d);
  }
  fit.residual = gap / samples.size();
  fit.sample_count = samples.size();
  return fit;
}

GreensField green_via_heat(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                           std::optional<double> lambda1, const TimeGridSpec& grid, const SemigroupOptions& opts) {
  if (!lambda1 || !(*lambda1 > 0.0))
    throw SpecError("green_via_heat: spectral gap lambda1 unavailable; run smallest_eigenpairs first");
  const double lam = *lambda1;
  const double t_min = resolve_t_min(m, grid);
  const auto times = geometric_grid(t_min, grid.ratio, -std::log(grid.tail_tolerance) / lam);
  const std::size_t n = l.rows();
  const int last = static_cast<int>(times.size()) - 1;
  const double du = std::log(grid.ratio);

  const FieldVector delta = discrete_delta(l, y);
  std::vector<double> fine(n, 0.0), coarse(n, 0.0);
  FieldVector u = delta;
  double now = 0.0;
  for (int k = 0; k <= last; ++k) {
    u = apply_semigroup(l, times[k] - now, u, opts);
    now = times[k];
    const bool end = (k == 0 || k == last);
    const double wf = du * (end ? 0.5 : 1.0) * times[k];
    const double wc = (k % 2 == 0) ? 2.0 * du * (end ? 0.5 : 1.0) * times[k] : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u.values[i].real();
      fine[i] += wf * v;
      coarse[i] += wc * v;
    }
    if (k == 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double head = 0.5 * t_min * (delta.values[i].real() + u.values[i].real());
        fine[i] += head;
        coarse[i] += head;
      }
    }
  }
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tail = u.values[i].real() / lam;
    fine[i] += tail;
    coarse[i] += tail;
    err = std::max(err, std::abs(fine[i] - coarse[i]) / 3.0);
  }
  GreensField g;
  g.base_point = y;
  g.method = GreenMethod::HeatQuadrature;
  g.values.assign(m.node_count(), 0.0);
  for (std::size_t s = 0; s < n; ++s) g.values[l.site_nodes()[s]] = fine[s];
  g.error_estimate = err;
  return g;
}

GreensField green_via_solve(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                            const SolveOptions& opts) {
  const auto x = solve_spd(l, discrete_delta(l, y), 0.0, opts);
  GreensField g;
  g.base_point = y;
  g.method = GreenMethod::DirectSolve;
  g.values = real_node_field(l, x, m.node_count());
  double top = 0.0, low = 0.0;
  for (const auto& v : x.values) {
    top = std::max(top, v.real());
    low = std::min(low, v.real());
  }
  if (low < -1e3 * opts.tol * top)
    throw InvariantViolation("green_via_solve: negative interior Green's value " + std::to_string(low));
  return g;
}

GreenDecay green_decay_constant(const DiscreteManifold& m, const GreensField& g, const GaussianBoundFit& fit,
                                double tol) {
  GreenDecay out{0.0, 4.0 * fit.C1 * std::sqrt(std::numbers::pi) / std::sqrt(fit.C2), -1, false};
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.boundary_mask[i]) continue;
    const double d = geodesic_distance(m, g.base_point, static_cast<int>(i));
    if (d < 2.0 * m.h * (1.0 - 1e-12)) continue;
    const double v = g.values[i] * d;
    if (v > out.C3_measured) {
      out.C3_measured = v;
      out.attaining_node = static_cast<int>(i);
    }
  }
  out.holds = out.C3_measured <= out.C3_predicted * (1.0 + tol);
  return out;
}

std::vector<KatoSample> kato_class_constant(const DiscreteManifold& m, const SparseHermitianOperator& l,
                                            const GreensField& g, const std::vector<double>& r_grid, double lambda1,
                                            const TimeGridSpec& grid, const SemigroupOptions& opts) {
  if (r_grid.empty()) throw SpecError("kato_class_constant: empty r grid");
  for (double r : r_grid)
    if (!(r > 0.0)) throw SpecError("kato_class_constant: r > 0 required");
  if (!(lambda1 > 0.0)) throw SpecError("kato_class_constant: lambda1 > 0 required");
  const double r_min = *std::min_element(r_grid.begin(), r_grid.end());
  const double s_min = resolve_t_min(m, grid);
  const auto times = geometric_grid(s_min, grid.ratio, -std::log(grid.tail_tolerance) / (lambda1 + r_min));
  const int last = static_cast<int>(times.size()) - 1;
  const double du = std::log(grid.ratio);
  const std::size_t n = l.rows();

  FieldVector g0(l.dimension(), 1);
  for (std::size_t s = 0; s < n; ++s) g0.values[s] = g.values[l.site_nodes()[s]];
  std::vector<std::vector<double>> acc(r_grid.size(), std::vector<double>(n, 0.0));
  FieldVector u = g0;
  double now = 0.0;
  for (int k = 0; k <= last; ++k) {
    u = apply_semigroup(l, times[k] - now, u, opts);
    now = times[k];
    const bool end = (k == 0 || k == last);
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      const double decay = std::exp(-r_grid[j] * times[k]);
      const double w = du * (end ? 0.5 : 1.0) * times[k] * decay;
      auto& a = acc[j];
      for (std::size_t i = 0; i < n; ++i) a[i] += w * u.values[i].real();
      if (k == 0)
        for (std::size_t i = 0; i < n; ++i) a[i] += 0.5 * s_min * (g0.values[i].real() + decay * u.values[i].real());
      if (k == last) {
        const double tw = decay / (lambda1 + r_grid[j]);
        for (std::size_t i = 0; i < n; ++i) a[i] += tw * u.values[i].real();
      }
    }
  }
  std::vector<KatoSample> out;
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    const auto it = std::max_element(acc[j].begin(), acc[j].end());
    const double c = *it;
    out.push_back({r_grid[j], c, c * std::sqrt(r_grid[j]), l.site_nodes()[it - acc[j].begin()]});
  }
  return out;
}

double chapman_kolmogorov_residual(const SparseHermitianOperator& l, int y, double s, double t,
                                   const SemigroupOptions& opts) {
  if (s < 0.0 || !(t > 0.0)) throw SpecError("chapman_kolmogorov_residual: s >= 0, t > 0 required");
  const auto delta = discrete_delta(l, y);
  const auto a = apply_semigroup(l, t, delta, opts);
  const auto b = apply_semigroup(l, s, a, opts);
  const auto c = apply_semigroup(l, s + t, delta, opts);
  std::vector<cplx> diff = b.values;
  kernels::axpy(-1.0, c.values, diff);
  return l.norm(diff) / l.norm(delta.values);
}

double spectral_gap(const SparseHermitianOperator& l, const SpectralOptions& opts) {
  return smallest_eigenpairs(l, 1, opts).front().value;
}

void write_heat_csv(const DiscreteManifold& m, const HeatColumn& col, std::ostream& out) {
  out.precision(12);
  out << "node,x1,x2,x3,dist,p\n";
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.boundary_mask[i]) continue;
    const auto& x = m.coords[i];
    out << i << ',' << x[0] << ',' << x[1] << ',' << x[2] << ','
        << geodesic_distance(m, col.base_point, static_cast<int>(i)) << ',' << col.values[i] << '\n';
  }
}

void write_green_csv(const DiscreteManifold& m, const GreensField& heat, const GreensField& solve,
                     std::ostream& out) {
  out.precision(12);
  out << "node,dist,G_heat,G_solve\n";
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.boundary_mask[i]) continue;
    out << i << ',' << geodesic_distance(m, solve.base_point, static_cast<int>(i)) << ',' << heat.values[i] << ','
        << solve.values[i] << '\n';
  }
}

void write_kato_csv(const std::vector<KatoSample>& table, std::ostream& out) {
  out.precision(12);
  out << "r,C_r,C_r_times_sqrt_r\n";
  for (const auto& k : table) out << k.r << ',' << k.C << ',' << k.C_sqrt_r << '\n';
}

}  // namespace hydrolab
