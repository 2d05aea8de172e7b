#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrolab/bundles.hpp"
#include "hydrolab/heat_green.hpp"

namespace hydrolab {

struct HamiltonianSpec {
  double kappa = 0.0;
  int base_point = -1;  // -1: take the Green's field base point
  std::optional<double> lambda;
  void validate() const;
};

// H = P - kappa G(., y), G broadcast over the block components.
SparseHermitianOperator assemble_hamiltonian(const SparseHermitianOperator& p, const GreensField& g,
                                             const HamiltonianSpec& spec);

// <f, B f> + sum_x w_x <f_x, V(x) f_x> - kappa sum_x w_x G(x) |f_x|^2.
// potential may be null (V = 0).
double quadratic_form(const SparseHermitianOperator& bochner, const PotentialField* potential,
                      const GreensField& g, const HamiltonianSpec& spec, const FieldVector& f);

struct GroundState {
  double E0;
  FieldVector f0;
  double residual;
};
GroundState ground_state_energy(const SparseHermitianOperator& h, const SpectralOptions& opts = {});

struct SobolevSample {
  std::string family;  // "aubin_talenti" or "eigenfunction"
  double parameter;    // scale s, or eigenfunction index
  double ratio;        // ||h||_6^2 / q_d(h)
};

struct SobolevOptions {
  // Aubin-Talenti scales as fractions of the domain half size.
  std::vector<double> scale_fractions{1.0 / 32, 1.0 / 16, 1.0 / 12, 1.0 / 8, 1.0 / 6, 1.0 / 5,
                                      1.0 / 4,  1.0 / 3,  1.0 / 2,  3.0 / 4, 1.0};
  int eigenfunctions = 5;
  double safety = 1.5;
  SpectralOptions spectral{1e-6};
};

struct SobolevReport {
  double family_max = 0.0;
  double C4 = 0.0;  // family_max * safety
  SobolevSample best;
  std::vector<SobolevSample> samples;
};

// Test-family lower estimate of the Sobolev constant; h centred at `center`.
SobolevReport sobolev_constant(const DiscreteManifold& m, const SparseHermitianOperator& l, int center,
                               const SobolevOptions& opts = {});

// Bohr radius 8 pi / kappa in [min_spacings * h, half size / containment].
struct TrustWindow {
  double min_spacings = 4.0;
  double containment = 3.5;
  bool contains(const DiscreteManifold& m, double kappa) const;
  std::pair<double, double> kappa_range(const DiscreteManifold& m) const;
};

struct EnergyRow {
  int field = -1;  // index into the tested connections / assemblies, -1 for scalar
  double kappa;
  double E0;
  double residual;
  double reference_E0;  // E0 at beta = 0 (magnetic), NaN elsewhere
  double self_energy;   // S (spin), 0 elsewhere
  double bound;
  double margin;        // lhs - bound, lhs = E0 (+ Lambda S)
  bool trusted;         // inside the trust window
  bool in_regime;       // kappa <= kappa0 (spin); true elsewhere
  bool pass;
  std::string flag() const;
};

struct StabilityCertificate {
  std::string kind;  // scalar | magnetic | spin
  int base_point = -1;
  std::uint64_t seed = 0;
  double C1 = 0, C2 = 0, C3_measured = 0, C3_predicted = 0;
  bool C3_holds = false;
  double C4 = 0;
  double C_kato = 0;
  int kato_attaining_node = -1;
  double C6 = 0;
  double C_final = 0;
  double lambda = 0;
  double kappa0_per_lambda2 = 0;
  double kappa0 = 0;
  std::vector<KatoSample> kato_table;
  std::vector<std::string> field_labels;
  std::vector<EnergyRow> energy_table;
  double fit_exponent = 0;  // NaN when fewer than two trusted rows
  bool monotone = true;
  bool concave = true;
  bool all_pass = false;
  TrustWindow window;
  std::string grid;  // human-readable manifold description
};

struct CertifyOptions {
  TrustWindow window;
  SpectralOptions spectral;
  SemigroupOptions semigroup;
  TimeGridSpec time_grid;
  std::optional<double> lambda1;  // of the heat operator; computed when absent
  std::uint64_t seed = 0;
  // Tolerance for monotonicity, concavity and the diamagnetic comparison.
  double energy_tol = 1e-6;
};

// C_kato = max_r C(r, y) sqrt(r) from the heat operator, C6 = sqrt(2) C_kato^2,
// and for each kappa the verdict E0(-Delta - kappa G) >= -C6 kappa^2.
StabilityCertificate certify_scalar(const DiscreteManifold& m, const SparseHermitianOperator& heat_operator,
                                    const SparseHermitianOperator& scalar, const GreensField& g,
                                    const GaussianBoundFit& fit, const std::vector<double>& r_grid,
                                    const std::vector<double>& kappa_grid, const CertifyOptions& opts = {});

// E0(beta, kappa) >= E0(0, kappa) >= -C6 kappa^2 for every connection.
StabilityCertificate certify_magnetic(const DiscreteManifold& m, const std::vector<ConnectionData>& connections,
                                      const std::vector<std::string>& labels, const GreensField& g,
                                      const std::vector<double>& kappa_grid, double C6,
                                      const CertifyOptions& opts = {});

// kappa0 = Lambda^2 / (8 sqrt(C6) C4); for kappa <= kappa0 requires
// E0(P - kappa G) + Lambda S >= -2 C6 kappa^2. Rows past kappa0 are computed
// and marked outside the guaranteed regime.
StabilityCertificate certify_spin(const DiscreteManifold& m, const std::vector<PauliAssembly>& assemblies,
                                  const std::vector<std::string>& labels, const GreensField& g, double lambda,
                                  const std::vector<double>& kappa_grid, double C6, double C4,
                                  const CertifyOptions& opts = {});

struct SmoothingRow {
  double t;
  double sup_norm;   // ||e^{-tA} f||_inf for the supplied f
  double l2_norm;    // ||e^{-tA} f||_2
  double norm_2_inf; // max over probes of ||e^{-tA} delta_x||_2, the L2 -> Linf norm on the probes
};

struct SmoothingReport {
  double E0;
  std::vector<SmoothingRow> rows;
  bool finite;
  bool nonincreasing;  // norm_2_inf, exactly monotone for A >= 0
  bool sup_nonincreasing;  // informational: sup norm of the supplied f
};

// A = H - E0. probes are node indices; f is normalised before use.
SmoothingReport smoothing_check(const SparseHermitianOperator& h, double E0, const std::vector<double>& t_grid,
                                const FieldVector& f, const std::vector<int>& probes,
                                const SemigroupOptions& opts = {});

nlohmann::json to_json(const StabilityCertificate& c);
nlohmann::json to_json(const SobolevReport& r);
nlohmann::json to_json(const SmoothingReport& r);
// "kappa,E0,bound,margin,flag" for the rows of one field.
void write_energy_csv(const StabilityCertificate& c, int field, std::ostream& out);

}  // namespace hydrolab
