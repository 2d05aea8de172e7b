#pragma once

#include <cstdint>
#include <vector>

#include "hydrolab/bundles.hpp"

namespace hydrolab {

// Smooth random fields are sums of a few low Fourier modes evaluated at the
// node coordinates, so a seed names the same continuum field on every grid.

// beta_a(x) = sum_q A_qa sin(k_q . x + phi_q) with sum_q |A_qa| <= amplitude.
std::vector<OneForm> random_fourier_potential(const DiscreteManifold& m, std::uint64_t seed,
                                              double amplitude, int modes = 4);

std::vector<double> random_gauge_function(const DiscreteManifold& m, std::uint64_t seed,
                                          double amplitude, int modes = 4);

// Complex field with block size of `op`, a cos^2 bump of radius
// R = support_fraction * half_width times random plane waves with wave-vector
// components in {-max_mode .. max_mode} * pi / R; unit weighted norm.
FieldVector smooth_random_field(const SparseHermitianOperator& op, const DiscreteManifold& m,
                                std::uint64_t seed, double support_fraction = 0.6, int max_mode = 2);

// Independent standard complex normals per entry; unit weighted norm.
FieldVector gaussian_random_field(const SparseHermitianOperator& op, std::uint64_t seed);

}  // namespace hydrolab
