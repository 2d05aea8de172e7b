#include "hydrolab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "hydrolab/error.hpp"
#include "hydrolab/geometry.hpp"

namespace hydrolab {

bool FieldVector::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

SparseHermitianOperator::SparseHermitianOperator(std::vector<int> site_nodes,
                                                 std::vector<double> site_weights, int block_size,
                                                 CsrMatrix matrix)
    : site_nodes_(std::move(site_nodes)),
      site_weights_(std::move(site_weights)),
      block_size_(block_size),
      matrix_(std::move(matrix)) {
  if (block_size_ != 1 && block_size_ != 2) throw SpecError("block_size must be 1 or 2");
  if (site_nodes_.size() != site_weights_.size())
    throw SpecError("operator: site nodes and weights differ in length");
  if (matrix_.rows != site_nodes_.size() * block_size_)
    throw SpecError("operator: matrix rows do not match sites x block_size");
  dof_weights_.resize(matrix_.rows);
  for (std::size_t s = 0; s < site_weights_.size(); ++s) {
    if (!(site_weights_[s] > 0.0)) throw SpecError("operator: site weights must be positive");
    for (int c = 0; c < block_size_; ++c) dof_weights_[s * block_size_ + c] = site_weights_[s];
  }
}

void SparseHermitianOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  kernels::spmv(matrix_, x, y);
}

FieldVector SparseHermitianOperator::apply(const FieldVector& x) const {
  FieldVector y(dimension(), block_size_);
  apply(x.values, y.values);
  return y;
}

cplx SparseHermitianOperator::entry(std::size_t row, std::size_t col) const {
  const auto begin = matrix_.col.begin() + matrix_.row_ptr[row];
  const auto end = matrix_.col.begin() + matrix_.row_ptr[row + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
  if (it == end || *it != static_cast<std::int32_t>(col)) return 0.0;
  return matrix_.val[it - matrix_.col.begin()];
}

std::vector<cplx> SparseHermitianOperator::diagonal() const {
  std::vector<cplx> d(rows());
  for (std::size_t r = 0; r < rows(); ++r) d[r] = entry(r, r);
  return d;
}

double SparseHermitianOperator::hermiticity_residual() const {
  double worst = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) {
    for (auto p = matrix_.row_ptr[r]; p < matrix_.row_ptr[r + 1]; ++p) {
      const std::size_t c = matrix_.col[p];
      const cplx lhs = dof_weights_[r] * matrix_.val[p];
      const cplx rhs = std::conj(dof_weights_[c] * entry(c, r));
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

SparseHermitianOperator SparseHermitianOperator::plus_diagonal(std::span<const double> d) const {
  if (d.size() != rows()) throw SpecError("plus_diagonal: length mismatch");
  OperatorBuilder b(rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (auto p = matrix_.row_ptr[r]; p < matrix_.row_ptr[r + 1]; ++p)
      b.add(r, matrix_.col[p], matrix_.val[p]);
    b.add(r, r, d[r]);
  }
  return {site_nodes_, site_weights_, block_size_, b.build()};
}

SparseHermitianOperator SparseHermitianOperator::shifted(double c) const {
  std::vector<double> d(rows(), c);
  return plus_diagonal(d);
}

std::vector<int> SparseHermitianOperator::node_to_site(std::size_t node_count) const {
  std::vector<int> map(node_count, -1);
  for (std::size_t s = 0; s < site_nodes_.size(); ++s) map[site_nodes_[s]] = static_cast<int>(s);
  return map;
}

cplx SparseHermitianOperator::inner(std::span<const cplx> x, std::span<const cplx> y) const {
  return kernels::wdot(dof_weights_, x, y);
}

double SparseHermitianOperator::norm(std::span<const cplx> x) const {
  return std::sqrt(kernels::wnorm2(dof_weights_, x));
}

double SparseHermitianOperator::quadratic_form(std::span<const cplx> x) const {
  std::vector<cplx> ax(rows());
  apply(x, ax);
  return inner(x, ax).real();
}

CsrMatrix OperatorBuilder::build() {
  CsrMatrix m;
  m.rows = rows_;
  m.row_ptr.assign(rows_ + 1, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto& items = entries_[r];
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.col < b.col; });
    std::size_t i = 0;
    while (i < items.size()) {
      const std::size_t c = items[i].col;
      cplx v = 0.0;
      for (; i < items.size() && items[i].col == c; ++i) v += items[i].value;
      m.col.push_back(static_cast<std::int32_t>(c));
      m.val.push_back(v);
    }
    m.row_ptr[r + 1] = static_cast<std::int64_t>(m.col.size());
    items.clear();
    items.shrink_to_fit();
  }
  return m;
}

SparseHermitianOperator compose(const SparseHermitianOperator& a, const SparseHermitianOperator& b) {
  if (a.rows() != b.rows() || a.block_size() != b.block_size() || a.site_nodes() != b.site_nodes())
    throw SpecError("compose: operators act on different spaces");
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  OperatorBuilder out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (auto p = ma.row_ptr[r]; p < ma.row_ptr[r + 1]; ++p) {
      const std::size_t k = ma.col[p];
      for (auto q = mb.row_ptr[k]; q < mb.row_ptr[k + 1]; ++q)
        out.add(r, mb.col[q], ma.val[p] * mb.val[q]);
    }
  return {a.site_nodes(), a.site_weights(), a.block_size(), out.build()};
}

SiteMap active_sites(const DiscreteManifold& m) {
  SiteMap s;
  s.node_to_site.assign(m.node_count(), -1);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.boundary_mask[i]) continue;
    s.node_to_site[i] = static_cast<int>(s.site_nodes.size());
    s.site_nodes.push_back(static_cast<int>(i));
    s.weights.push_back(m.volume_weights[i]);
  }
  return s;
}

FieldVector restrict_to_sites(const SparseHermitianOperator& op, std::span<const double> node_field) {
  FieldVector f(op.dimension(), op.block_size());
  for (std::size_t s = 0; s < op.dimension(); ++s)
    for (int c = 0; c < op.block_size(); ++c)
      f.values[s * op.block_size() + c] = node_field[op.site_nodes()[s]];
  return f;
}

std::vector<cplx> extend_to_nodes(const SparseHermitianOperator& op, const FieldVector& f,
                                  std::size_t node_count, int component) {
  std::vector<cplx> out(node_count, 0.0);
  for (std::size_t s = 0; s < op.dimension(); ++s)
    out[op.site_nodes()[s]] = f.values[s * op.block_size() + component];
  return out;
}

void write_operator(const SparseHermitianOperator& op, std::ostream& out) {
  out << op.dimension() << ' ' << op.block_size() << '\n';
  out.precision(17);
  const auto& m = op.matrix();
  for (std::size_t r = 0; r < m.rows; ++r)
    for (auto p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p)
      out << r << ' ' << m.col[p] << ' ' << m.val[p].real() << ' ' << m.val[p].imag() << '\n';
}

SparseHermitianOperator read_operator(std::istream& in, std::vector<int> site_nodes,
                                      std::vector<double> site_weights) {
  std::size_t dim;
  int block;
  if (!(in >> dim >> block)) throw SpecError("read_operator: missing header");
  if (dim != site_nodes.size()) throw SpecError("read_operator: dimension does not match sites");
  OperatorBuilder b(dim * block);
  std::size_t r, c;
  double re, im;
  while (in >> r >> c >> re >> im) {
    if (r >= dim * block || c >= dim * block) throw SpecError("read_operator: index out of range");
    b.add(r, c, {re, im});
  }
  return {std::move(site_nodes), std::move(site_weights), block, b.build()};
}

void write_vector(const FieldVector& f, std::ostream& out) {
  out.precision(17);
  for (const auto& v : f.values) out << v.real() << ' ' << v.imag() << '\n';
}

FieldVector read_vector(std::istream& in, int block_size) {
  FieldVector f;
  f.block_size = block_size;
  double re, im;
  while (in >> re >> im) f.values.emplace_back(re, im);
  if (f.values.size() % block_size != 0) throw SpecError("read_vector: length not a multiple of block");
  return f;
}

}  // namespace hydrolab
