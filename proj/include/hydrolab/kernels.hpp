#pragma once

// Data-parallel inner loops. The OpenMP versions reduce in fixed-size chunks
// summed in chunk order, so results do not depend on the thread count. The
// reference namespace holds plain serial loops used as test oracles and as the
// baseline of the benchmark.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace hydrolab {

using cplx = std::complex<double>;

struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<cplx> val;
};

namespace kernels {

inline constexpr std::size_t kReductionChunk = 4096;

void set_threads(int threads);
int threads();

// y = A x
void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);
// sum_i w_i conj(x_i) y_i
cplx wdot(std::span<const double> w, std::span<const cplx> x, std::span<const cplx> y);
double wnorm2(std::span<const double> w, std::span<const cplx> x);
// y += a x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
void scale(cplx a, std::span<cplx> x);
// Orthogonalize x against the columns of basis (classical Gram-Schmidt pass):
// coeffs_j = <basis_j, x>_w, x -= sum_j coeffs_j basis_j.
void project_out(std::span<const double> w, const std::vector<std::vector<cplx>>& basis,
                 std::size_t count, std::span<cplx> x, std::span<cplx> coeffs);
// out = sum_j coeffs_j basis_j over the first coeffs.size() basis vectors.
void combine(const std::vector<std::vector<cplx>>& basis, std::span<const cplx> coeffs,
             std::span<cplx> out);

namespace reference {
void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);
cplx wdot(std::span<const double> w, std::span<const cplx> x, std::span<const cplx> y);
double wnorm2(std::span<const double> w, std::span<const cplx> x);
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
void project_out(std::span<const double> w, const std::vector<std::vector<cplx>>& basis,
                 std::size_t count, std::span<cplx> x, std::span<cplx> coeffs);
}  // namespace reference

}  // namespace kernels
}  // namespace hydrolab
