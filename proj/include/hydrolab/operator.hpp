#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hydrolab/kernels.hpp"

namespace hydrolab {

struct DiscreteManifold;

// Section of a rank-block_size bundle over the active sites of an operator.
// Component c of site s lives at index s * block_size + c.
struct FieldVector {
  std::vector<cplx> values;
  int block_size = 1;

  FieldVector() = default;
  FieldVector(std::size_t sites, int block) : values(sites * block), block_size(block) {}
  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

// Finite-dimensional operator acting on the active (non-boundary) sites of a
// manifold, self-adjoint in <f, g> = sum_i w_i conj(f_i) g_i. Boundary nodes
// are eliminated, so no row or column refers to them.
class SparseHermitianOperator {
 public:
  SparseHermitianOperator() = default;
  SparseHermitianOperator(std::vector<int> site_nodes, std::vector<double> site_weights,
                          int block_size, CsrMatrix matrix);

  std::size_t dimension() const { return site_nodes_.size(); }
  std::size_t rows() const { return matrix_.rows; }
  int block_size() const { return block_size_; }
  const CsrMatrix& matrix() const { return matrix_; }
  const std::vector<int>& site_nodes() const { return site_nodes_; }
  const std::vector<double>& site_weights() const { return site_weights_; }
  // Site weights repeated over the block components.
  std::span<const double> dof_weights() const { return dof_weights_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  FieldVector apply(const FieldVector& x) const;
  cplx entry(std::size_t row, std::size_t col) const;
  std::vector<cplx> diagonal() const;

  // max |w_i A_ij - conj(w_j A_ji)| / max |w_i A_ij|
  double hermiticity_residual() const;

  // A + diag(d) with d given per row.
  SparseHermitianOperator plus_diagonal(std::span<const double> d) const;
  SparseHermitianOperator shifted(double c) const;
  // Site index of each node, -1 for eliminated nodes.
  std::vector<int> node_to_site(std::size_t node_count) const;

  cplx inner(std::span<const cplx> x, std::span<const cplx> y) const;
  double norm(std::span<const cplx> x) const;
  // <x, A x>
  double quadratic_form(std::span<const cplx> x) const;

 private:
  std::vector<int> site_nodes_;
  std::vector<double> site_weights_;
  std::vector<double> dof_weights_;
  int block_size_ = 1;
  CsrMatrix matrix_;
};

// Accumulates (row, col, value) triplets; duplicates are summed.
class OperatorBuilder {
 public:
  explicit OperatorBuilder(std::size_t rows) : rows_(rows), entries_(rows) {}
  void add(std::size_t row, std::size_t col, cplx v) { entries_[row].push_back({col, v}); }
  CsrMatrix build();

 private:
  struct Item {
    std::size_t col;
    cplx value;
  };
  std::size_t rows_;
  std::vector<std::vector<Item>> entries_;
};

// Matrix product A B; both must share sites and block size.
SparseHermitianOperator compose(const SparseHermitianOperator& a, const SparseHermitianOperator& b);

// Active sites of a manifold: the interior nodes in increasing order.
struct SiteMap {
  std::vector<int> site_nodes;
  std::vector<int> node_to_site;
  std::vector<double> weights;
};
SiteMap active_sites(const DiscreteManifold& m);

// Node field (one value per manifold node) to site field and back.
// Boundary nodes read as zero.
FieldVector restrict_to_sites(const SparseHermitianOperator& op, std::span<const double> node_field);
std::vector<cplx> extend_to_nodes(const SparseHermitianOperator& op, const FieldVector& f,
                                  std::size_t node_count, int component = 0);

// "dim block_size" header then "row col real imag" per stored entry.
void write_operator(const SparseHermitianOperator& op, std::ostream& out);
// Reads the coordinate dump; weights and site nodes are not stored in the dump
// and are supplied by the caller.
SparseHermitianOperator read_operator(std::istream& in, std::vector<int> site_nodes,
                                      std::vector<double> site_weights);
void write_vector(const FieldVector& f, std::ostream& out);
FieldVector read_vector(std::istream& in, int block_size);

}  // namespace hydrolab
