#include "hydrolab/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace hydrolab::kernels {

namespace {
int g_threads = 0;

std::size_t chunk_count(std::size_t n) { return (n + kReductionChunk - 1) / kReductionChunk; }
}  // namespace

void set_threads(int threads) {
  g_threads = threads;
  if (threads > 0) omp_set_num_threads(threads);
}

int threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
  const auto rows = static_cast<std::int64_t>(a.rows);
  const auto* rp = a.row_ptr.data();
  const auto* ci = a.col.data();
  const auto* va = a.val.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    cplx acc = 0.0;
    for (std::int64_t p = rp[r]; p < rp[r + 1]; ++p) acc += va[p] * x[ci[p]];
    y[r] = acc;
  }
}

cplx wdot(std::span<const double> w, std::span<const cplx> x, std::span<const cplx> y) {
  const std::size_t n = x.size();
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  std::vector<cplx> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk, hi = std::min(n, lo + kReductionChunk);
    double re = 0.0, im = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      // conj(x) * y
      re += w[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
      im += w[i] * (x[i].real() * y[i].imag() - x[i].imag() * y[i].real());
    }
    partial[c] = {re, im};
  }
  cplx total = 0.0;
  for (const auto& p : partial) total += p;
  return total;
}

double wnorm2(std::span<const double> w, std::span<const cplx> x) {
  const std::size_t n = x.size();
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk, hi = std::min(n, lo + kReductionChunk);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += w[i] * std::norm(x[i]);
    partial[c] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(cplx a, std::span<cplx> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) x[i] *= a;
}

void project_out(std::span<const double> w, const std::vector<std::vector<cplx>>& basis,
                 std::size_t count, std::span<cplx> x, std::span<cplx> coeffs) {
  const std::size_t n = x.size();
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  // partial[c * count + j] = chunk c's share of <basis_j, x>
  std::vector<cplx> partial(chunks * count);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk, hi = std::min(n, lo + kReductionChunk);
    for (std::size_t j = 0; j < count; ++j) {
      const cplx* b = basis[j].data();
      cplx acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += w[i] * std::conj(b[i]) * x[i];
      partial[c * count + j] = acc;
    }
  }
  for (std::size_t j = 0; j < count; ++j) {
    cplx s = 0.0;
    for (std::int64_t c = 0; c < chunks; ++c) s += partial[c * count + j];
    coeffs[j] = s;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk, hi = std::min(n, lo + kReductionChunk);
    for (std::size_t j = 0; j < count; ++j) {
      const cplx cj = coeffs[j];
      const cplx* b = basis[j].data();
      for (std::size_t i = lo; i < hi; ++i) x[i] -= cj * b[i];
    }
  }
}

void combine(const std::vector<std::vector<cplx>>& basis, std::span<const cplx> coeffs,
             std::span<cplx> out) {
  const std::size_t n = out.size();
  const std::size_t count = coeffs.size();
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk, hi = std::min(n, lo + kReductionChunk);
    for (std::size_t i = lo; i < hi; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const cplx cj = coeffs[j];
      const cplx* b = basis[j].data();
      for (std::size_t i = lo; i < hi; ++i) out[i] += cj * b[i];
    }
  }
}

}  // namespace hydrolab::kernels
