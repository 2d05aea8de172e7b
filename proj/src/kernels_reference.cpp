#include "hydrolab/kernels.hpp"

namespace hydrolab::kernels::reference {

void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    cplx acc = 0.0;
    for (auto p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) acc += a.val[p] * x[a.col[p]];
    y[r] = acc;
  }
}

cplx wdot(std::span<const double> w, std::span<const cplx> x, std::span<const cplx> y) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::conj(x[i]) * y[i];
  return acc;
}

double wnorm2(std::span<const double> w, std::span<const cplx> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::norm(x[i]);
  return acc;
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void project_out(std::span<const double> w, const std::vector<std::vector<cplx>>& basis,
                 std::size_t count, std::span<cplx> x, std::span<cplx> coeffs) {
  for (std::size_t j = 0; j < count; ++j) coeffs[j] = wdot(w, basis[j], x);
  for (std::size_t j = 0; j < count; ++j) axpy(-coeffs[j], basis[j], x);
}

}  // namespace hydrolab::kernels::reference
