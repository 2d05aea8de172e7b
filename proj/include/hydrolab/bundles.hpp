#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hydrolab/geometry.hpp"
#include "hydrolab/operator.hpp"

namespace hydrolab {

using Mat2 = Eigen::Matrix2cd;
using OneForm = std::array<double, 3>;

// How the box Laplacian treats edges that leave the active sites.
//  Dirichlet: u = 0 on the outer shell.
//  Exterior:  u_b = (|x_a - o| / |x_b - o|) u_a across the shell (o the box
//             centre), i.e. the shell continues a harmonic 1/r tail. This keeps
//             G close to the whole-space value up to the box face instead of
//             forcing it to zero there. Warped grids always use Dirichlet.
enum class BoundaryClosure { Dirichlet, Exterior };

// -Delta >= 0, rows (1/w_a) sum_b a_ab (u_a - u_b) plus l(l+1)/f^2 on warped
// nodes.
SparseHermitianOperator assemble_laplace_beltrami(const DiscreteManifold& m,
                                                  BoundaryClosure closure = BoundaryClosure::Dirichlet);

struct CliffordStructure {
  std::array<Mat2, 3> gamma;  // i * sigma_j

  static CliffordStructure standard();
  // max over j of ||gamma_j^* + gamma_j|| and ||gamma_j^* gamma_j - I||
  double skew_residual() const;
  // max over i, j of ||gamma_i gamma_j + gamma_j gamma_i + 2 delta_ij I||
  double anticommutator_residual() const;
};

// Per-edge links in the direction edge.a -> edge.b. The link on the reversed
// edge is the adjoint. Rank 1 keeps the phase in entry (0, 0).
struct ConnectionData {
  int rank = 1;
  std::vector<Mat2> links;
  std::vector<OneForm> potential_form;  // empty when not built from a potential

  Mat2 forward(std::size_t edge) const { return links[edge]; }
  Mat2 backward(std::size_t edge) const { return links[edge].adjoint(); }
  bool has_potential() const { return !potential_form.empty(); }
  // max ||U^* U - I|| over links (rank 1: ||u|^2 - 1|)
  double unitarity_residual() const;
};

ConnectionData identity_connection(const DiscreteManifold& m, int rank);
ConnectionData connection_from_potential(const DiscreteManifold& m, const std::vector<OneForm>& beta,
                                         int rank);
// U_xy -> e^{i chi(x)} U_xy e^{-i chi(y)}; the potential form is carried over.
ConnectionData gauge_transform(const ConnectionData& conn, const DiscreteManifold& m,
                               const std::vector<double>& chi);
// beta = (-b x2 / 2, b x1 / 2, 0), curvature b dx1 ^ dx2.
std::vector<OneForm> constant_field_potential(const DiscreteManifold& m, double b);

// Edge index of the +axis step from node on a box, -1 where none exists.
std::vector<int> box_edge_table(const DiscreteManifold& m);
// Product of links around the face spanned by axes (i, j) at node; throws if
// the face leaves the grid.
Mat2 plaquette_holonomy(const DiscreteManifold& m, const ConnectionData& conn,
                        const std::vector<int>& edge_table, int node, int i, int j);

// Covariant 7-point stencil (magnetic Laplacian for rank 1), Dirichlet.
SparseHermitianOperator assemble_bochner(const DiscreteManifold& m, const ConnectionData& conn);
// -sum_j (nabla_j^c)^2 with central covariant differences: the Bochner term
// matching the Dirac square, spaced 2h.
SparseHermitianOperator assemble_bochner_central(const DiscreteManifold& m, const ConnectionData& conn);

SparseHermitianOperator assemble_dirac(const DiscreteManifold& m, const ConnectionData& conn,
                                       const CliffordStructure& cliff);

// Hermitian block per node (all nodes, boundary included).
struct PotentialField {
  int block_size = 2;
  std::vector<Mat2> values;
  double hermiticity_residual() const;
};

struct PauliAssembly {
  SparseHermitianOperator pauli;    // D D
  SparseHermitianOperator bochner;  // central Bochner term
  PotentialField potential;         // scal / 4 + sigma . B
};

PauliAssembly assemble_pauli(const DiscreteManifold& m, const ConnectionData& conn,
                             const CliffordStructure& cliff);

// Block-diagonal multiplication operator restricted to the sites of `like`.
SparseHermitianOperator potential_operator(const SparseHermitianOperator& like, const PotentialField& v);

// max over trials of ||P f - (bochner f + V f)|| / ||f|| for smooth random
// spinors supported in the inner part of the box (plane-wave components up to
// max_mode, see smooth_random_field).
double lichnerowicz_residual(const DiscreteManifold& m, const PauliAssembly& pa, int trials,
                             std::uint64_t seed, int max_mode = 1);

// sum_x w_x ||V(x)||_HS^2
double self_energy(const DiscreteManifold& m, const PotentialField& v);

struct KatoCheck {
  double q_d_of_abs;
  double q_conn;
  bool holds;
};
KatoCheck kato_inequality_check(const DiscreteManifold& m, const ConnectionData& conn, const FieldVector& f);

// "nodeA nodeB" followed by the real and imaginary parts of the rank x rank link.
void write_connection(const DiscreteManifold& m, const ConnectionData& conn, std::ostream& out);
// "node" followed by the real and imaginary parts of the block.
void write_potential(const PotentialField& v, std::ostream& out);

}  // namespace hydrolab
