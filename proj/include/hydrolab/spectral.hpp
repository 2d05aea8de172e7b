#pragma once

#include <cstdint>
#include <vector>

#include "hydrolab/operator.hpp"

namespace hydrolab {

struct SpectralOptions {
  double tol = 1e-8;
  // Budget in operator applications.
  int max_iterations = 5000;
  // Krylov basis size before a thick restart; 0 picks a size from k.
  int basis_size = 0;
  std::uint64_t seed = 0x5eed;
};

struct Eigenpair {
  double value;
  FieldVector vector;  // weighted-orthonormal
  double residual;     // ||A v - lambda v||_w
};

// k lowest eigenpairs in ascending order. Thick-restart Lanczos with full
// reorthogonalization in the weighted inner product; a deflated re-solve
// checks that no eigenvalue hidden by degeneracy was skipped. Throws
// NumericalError carrying the best residual if the budget runs out.
std::vector<Eigenpair> smallest_eigenpairs(const SparseHermitianOperator& a, int k,
                                           const SpectralOptions& opts = {});

struct SemigroupOptions {
  double tol = 1e-8;
  int max_basis = 40;
  int max_substeps = 100000;
};

struct SemigroupStats {
  int substeps = 0;
  int applications = 0;
};

// exp(-t A) f by Krylov approximation, error <= tol ||f|| for A >= 0.
// t = 0 returns f unchanged.
FieldVector apply_semigroup(const SparseHermitianOperator& a, double t, const FieldVector& f,
                            const SemigroupOptions& opts = {}, SemigroupStats* stats = nullptr);

struct SolveOptions {
  double tol = 1e-10;
  int max_iterations = 20000;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// (A + shift) x = b by diagonally preconditioned conjugate gradients.
// Throws NumericalError on a non-positive curvature direction or when the
// iteration budget runs out.
FieldVector solve_spd(const SparseHermitianOperator& a, const FieldVector& b, double shift,
                      const SolveOptions& opts = {}, SolveStats* stats = nullptr);

}  // namespace hydrolab
