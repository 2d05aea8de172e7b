#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hydrolab/geometry.hpp"
#include "hydrolab/operator.hpp"
#include "hydrolab/spectral.hpp"

namespace hydrolab {

// 1 / w_y at the site of node y, zero elsewhere, so <delta_y, f> = f(y).
FieldVector discrete_delta(const SparseHermitianOperator& l, int node);

struct HeatColumn {
  int base_point = -1;
  double t = 0.0;
  std::vector<double> values;  // per manifold node; eliminated nodes hold 0
};

HeatColumn heat_column(const DiscreteManifold& m, const SparseHermitianOperator& l, int y, double t,
                       const SemigroupOptions& opts = {});
// sum_x w_x p_t(x, y)
double heat_mass(const DiscreteManifold& m, const HeatColumn& col);

struct HeatSample {
  double t;
  double d;
  double p;
};

// p_t(x, y) at every active node with d(x, y) <= max_distance, for each t.
std::vector<HeatSample> collect_heat_samples(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                                             const std::vector<double>& times, double max_distance,
                                             const SemigroupOptions& opts = {});

struct GaussianBoundFit {
  double C1 = 0.0;
  double C2 = 0.0;
  // mean of log(envelope / p) over the samples; 0 when all sit on the envelope
  double residual = 0.0;
  double t_min = 0.0, t_max = 0.0, max_distance = 0.0;
  std::size_t sample_count = 0;
};

// {2.0, 2.5, ..., 8.0}
std::vector<double> default_c2_grid();

// Minimal-C1 envelope p <= C1 t^{-3/2} exp(-d^2 / (C2 t)) over the C2 grid.
// Ties in C1 (1e-12 relative) go to the smallest C2.
GaussianBoundFit fit_gaussian_bound(const std::vector<HeatSample>& samples,
                                    const std::vector<double>& c2_grid = default_c2_grid());

enum class GreenMethod { HeatQuadrature, DirectSolve };

struct GreensField {
  int base_point = -1;
  GreenMethod method = GreenMethod::DirectSolve;
  std::vector<double> values;  // per manifold node
  double error_estimate = 0.0;  // sup-norm estimate, heat quadrature only
};

struct TimeGridSpec {
  double t_min = 0.0;  // 0 selects h^2 / 4
  double ratio = 1.25;
  double tail_tolerance = 1e-8;  // T with exp(-lambda1 T) below this
};

// int_0^inf p_t dt by log-time trapezoid on a geometric grid, the piece
// [0, t_min] by the trapezoid rule and the tail by p_T / lambda1. The error
// estimate compares against the same rule on every other grid point.
GreensField green_via_heat(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                           std::optional<double> lambda1, const TimeGridSpec& grid = {},
                           const SemigroupOptions& opts = {});

// L G = delta_y by preconditioned CG. Throws InvariantViolation on negative
// interior values beyond the solver tolerance.
GreensField green_via_solve(const DiscreteManifold& m, const SparseHermitianOperator& l, int y,
                            const SolveOptions& opts = {});

struct GreenDecay {
  double C3_measured;
  double C3_predicted;
  int attaining_node;
  bool holds;
};

// max G(x, y) d(x, y) over active nodes with d >= 2h against 4 C1 sqrt(pi) / sqrt(C2).
GreenDecay green_decay_constant(const DiscreteManifold& m, const GreensField& g, const GaussianBoundFit& fit,
                                double tol = 0.05);

struct KatoSample {
  double r;
  double C;
  double C_sqrt_r;
  int attaining_node;
};

// C(r, y) = sup_x int_0^inf e^{-rs} (e^{-sL} G)(x) ds for every r at once, from
// one pass of semigroup steps over a geometric s grid; tail via lambda1 + r.
std::vector<KatoSample> kato_class_constant(const DiscreteManifold& m, const SparseHermitianOperator& l,
                                            const GreensField& g, const std::vector<double>& r_grid,
                                            double lambda1, const TimeGridSpec& grid = {},
                                            const SemigroupOptions& opts = {});

// ||e^{-sL} e^{-tL} delta_y - e^{-(s+t)L} delta_y|| / ||delta_y||, the scale the
// semigroup tolerance refers to.
double chapman_kolmogorov_residual(const SparseHermitianOperator& l, int y, double s, double t,
                                   const SemigroupOptions& opts = {});

// Lowest eigenvalue of L.
double spectral_gap(const SparseHermitianOperator& l, const SpectralOptions& opts = {});

void write_heat_csv(const DiscreteManifold& m, const HeatColumn& col, std::ostream& out);
void write_green_csv(const DiscreteManifold& m, const GreensField& heat, const GreensField& solve,
                     std::ostream& out);
void write_kato_csv(const std::vector<KatoSample>& table, std::ostream& out);

}  // namespace hydrolab
