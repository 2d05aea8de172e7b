#include "hydrolab/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hydrolab/error.hpp"

namespace hydrolab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Mode {
  std::array<double, 3> k;
  double phase;
};

// Wave vectors are integer multiples of pi / L with |k_a| <= 2 pi / L, L the
// domain half size.
std::vector<Mode> draw_modes(std::mt19937_64& rng, double half_size, int count, int max_mode = 2) {
  std::uniform_int_distribution<int> comp(-max_mode, max_mode);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  std::vector<Mode> out;
  while (static_cast<int>(out.size()) < count) {
    std::array<int, 3> q{comp(rng), comp(rng), comp(rng)};
    if (q[0] == 0 && q[1] == 0 && q[2] == 0) continue;
    Mode md;
    for (int a = 0; a < 3; ++a) md.k[a] = q[a] * kPi / half_size;
    md.phase = ph(rng);
    out.push_back(md);
  }
  return out;
}

std::array<double, 3> position(const DiscreteManifold& m, int node) {
  if (m.is_box()) return m.coords[node];
  return {m.coords[node][0], 0.0, 0.0};
}

double domain_half_size(const DiscreteManifold& m) {
  return m.is_box() ? m.spec.box_half_width : m.spec.r_max;
}

}  // namespace

std::vector<OneForm> random_fourier_potential(const DiscreteManifold& m, std::uint64_t seed,
                                              double amplitude, int modes) {
  if (!(amplitude >= 0.0) || modes < 1) throw SpecError("random_fourier_potential: bad amplitude or modes");
  std::mt19937_64 rng(seed);
  const auto waves = draw_modes(rng, domain_half_size(m), modes);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 3>> amp(modes);
  for (int a = 0; a < 3; ++a) {
    double total = 0.0;
    for (int q = 0; q < modes; ++q) {
      amp[q][a] = u(rng);
      total += std::abs(amp[q][a]);
    }
    for (int q = 0; q < modes; ++q) amp[q][a] *= amplitude / total;
  }
  std::vector<OneForm> beta(m.node_count(), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto x = position(m, static_cast<int>(i));
    for (int q = 0; q < modes; ++q) {
      const double s = std::sin(waves[q].k[0] * x[0] + waves[q].k[1] * x[1] + waves[q].k[2] * x[2] +
                                waves[q].phase);
      for (int a = 0; a < 3; ++a) beta[i][a] += amp[q][a] * s;
    }
  }
  return beta;
}

std::vector<double> random_gauge_function(const DiscreteManifold& m, std::uint64_t seed, double amplitude,
                                          int modes) {
  std::mt19937_64 rng(seed);
  const auto waves = draw_modes(rng, domain_half_size(m), modes);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> amp(modes);
  for (auto& a : amp) a = amplitude * u(rng) / modes;
  std::vector<double> chi(m.node_count(), 0.0);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto x = position(m, static_cast<int>(i));
    for (int q = 0; q < modes; ++q)
      chi[i] += amp[q] * std::cos(waves[q].k[0] * x[0] + waves[q].k[1] * x[1] + waves[q].k[2] * x[2] +
                                  waves[q].phase);
  }
  return chi;
}

FieldVector smooth_random_field(const SparseHermitianOperator& op, const DiscreteManifold& m,
                                std::uint64_t seed, double support_fraction, int max_mode) {
  std::mt19937_64 rng(seed);
  const double radius = support_fraction * domain_half_size(m);
  const int block = op.block_size();
  const int modes = 3;
  std::vector<std::vector<Mode>> waves;
  std::vector<std::vector<cplx>> amps;
  std::normal_distribution<double> g;
  for (int c = 0; c < block; ++c) {
    waves.push_back(draw_modes(rng, radius, modes, max_mode));
    std::vector<cplx> a(modes + 1);
    for (auto& v : a) v = {g(rng), g(rng)};
    amps.push_back(a);
  }
  FieldVector f(op.dimension(), block);
  for (std::size_t s = 0; s < op.dimension(); ++s) {
    const int node = op.site_nodes()[s];
    const auto x = position(m, node);
    double bump = 1.0;
    if (m.is_box()) {
      for (int a = 0; a < 3; ++a) {
        if (std::abs(x[a]) >= radius) bump = 0.0;
        else bump *= std::pow(std::cos(0.5 * kPi * x[a] / radius), 2);
      }
    } else {
      bump = x[0] < radius ? std::pow(std::cos(0.5 * kPi * x[0] / radius), 2) : 0.0;
      // higher modes vanish at the pole like the regular harmonics do
      const int l = m.mode_l(node);
      if (l != 0) bump *= std::sin(kPi * x[0] / radius) * 0.5 / (1 + l);
    }
    if (bump == 0.0) continue;
    for (int c = 0; c < block; ++c) {
      cplx v = amps[c][modes];
      for (int q = 0; q < modes; ++q) {
        const auto& w = waves[c][q];
        const double arg = w.k[0] * x[0] + w.k[1] * x[1] + w.k[2] * x[2] + w.phase;
        v += amps[c][q] * std::polar(1.0, arg);
      }
      f.values[s * block + c] = bump * v;
    }
  }
  const double nf = op.norm(f.values);
  if (nf == 0.0) throw SpecError("smooth_random_field: support contains no active site");
  kernels::scale(1.0 / nf, f.values);
  return f;
}

FieldVector gaussian_random_field(const SparseHermitianOperator& op, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  FieldVector f(op.dimension(), op.block_size());
  for (auto& v : f.values) v = {g(rng), g(rng)};
  kernels::scale(1.0 / op.norm(f.values), f.values);
  return f;
}

}  // namespace hydrolab
