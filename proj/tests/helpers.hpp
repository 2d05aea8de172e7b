#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "hydrolab/geometry.hpp"
#include "hydrolab/operator.hpp"

namespace testing {

inline hydrolab::DiscreteManifold box(double hw, int n, bool periodic = false) {
  hydrolab::MetricSpec s;
  s.box_half_width = hw;
  s.grid_points_per_axis = n;
  s.periodic = periodic;
  return hydrolab::build_manifold(s);
}

inline hydrolab::DiscreteManifold warped(hydrolab::WarpProfile p, double r_max, int points, int lmax = 0) {
  hydrolab::MetricSpec s;
  s.kind = hydrolab::ManifoldKind::WarpedRadial;
  s.warp_profile = p;
  s.r_max = r_max;
  s.radial_points = points;
  s.angular_mode_cutoff = lmax;
  return hydrolab::build_manifold(s);
}

// Dense copy of the operator matrix.
inline Eigen::MatrixXcd dense(const hydrolab::SparseHermitianOperator& op) {
  const auto& a = op.matrix();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(a.rows, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) d(r, a.col[k]) += a.val[k];
  return d;
}

// W^{1/2} A W^{-1/2}, Hermitian in the plain inner product.
inline Eigen::MatrixXcd symmetrized(const hydrolab::SparseHermitianOperator& op) {
  Eigen::MatrixXcd d = dense(op);
  const auto w = op.dof_weights();
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) *= std::sqrt(w[i] / w[j]);
  return d;
}

inline Eigen::VectorXd dense_eigenvalues(const hydrolab::SparseHermitianOperator& op) {
  Eigen::MatrixXcd s = symmetrized(op);
  s = 0.5 * (s + s.adjoint()).eval();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(s, Eigen::EigenvaluesOnly).eigenvalues();
}

// Small operator with random weights and a random weighted-Hermitian matrix.
inline hydrolab::SparseHermitianOperator random_operator(int n, std::uint64_t seed, double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::normal_distribution<double> g;
  std::vector<double> w(n);
  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) w[i] = u(rng), nodes[i] = i;
  // B Hermitian, A = W^{-1} B is self-adjoint in the weighted product.
  Eigen::MatrixXcd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = {g(rng), g(rng)};
  b = (b + b.adjoint()).eval();
  b += (shift + 2.0 * n) * Eigen::MatrixXcd::Identity(n, n);
  hydrolab::OperatorBuilder ob(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ob.add(i, j, b(i, j) / w[i]);
  return hydrolab::SparseHermitianOperator(nodes, w, 1, ob.build());
}

}  // namespace testing
