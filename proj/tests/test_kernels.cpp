#include <doctest.h>

#include "helpers.hpp"
#include "hydrolab/bundles.hpp"
#include "hydrolab/kernels.hpp"
#include "hydrolab/random_fields.hpp"

using namespace hydrolab;

namespace {

struct Data {
  SparseHermitianOperator op;
  FieldVector x, y;
  std::vector<std::vector<cplx>> basis;
  Data() {
    const auto m = testing::box(1.0, 30);
    op = assemble_bochner(m, connection_from_potential(m, random_fourier_potential(m, 3, 1.0), 1));
    x = gaussian_random_field(op, 1);
    y = gaussian_random_field(op, 2);
    for (int j = 0; j < 7; ++j) basis.push_back(gaussian_random_field(op, 20 + j).values);
  }
};

const Data& data() {
  static Data d;
  return d;
}

double maxdiff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
  const auto& d = data();
  const auto w = d.op.dof_weights();
  std::vector<cplx> y1(d.x.size()), y2(d.x.size());
  kernels::spmv(d.op.matrix(), d.x.values, y1);
  kernels::reference::spmv(d.op.matrix(), d.x.values, y2);
  CHECK(maxdiff(y1, y2) == 0.0);

  CHECK(std::abs(kernels::wdot(w, d.x.values, d.y.values) - kernels::reference::wdot(w, d.x.values, d.y.values)) <
        1e-12);
  CHECK(kernels::wnorm2(w, d.x.values) == doctest::Approx(kernels::reference::wnorm2(w, d.x.values)).epsilon(1e-13));

  auto a1 = d.y.values, a2 = d.y.values;
  kernels::axpy({0.3, -0.7}, d.x.values, a1);
  kernels::reference::axpy({0.3, -0.7}, d.x.values, a2);
  CHECK(maxdiff(a1, a2) == 0.0);

  auto p1 = d.x.values, p2 = d.x.values;
  std::vector<cplx> c1(d.basis.size()), c2(d.basis.size());
  kernels::project_out(w, d.basis, d.basis.size(), p1, c1);
  kernels::reference::project_out(w, d.basis, d.basis.size(), p2, c2);
  CHECK(maxdiff(p1, p2) < 1e-12);
  CHECK(maxdiff(c1, c2) < 1e-12);
}

TEST_CASE("reductions do not depend on the thread count") {
  const auto& d = data();
  const auto w = d.op.dof_weights();
  const int saved = kernels::threads();
  kernels::set_threads(1);
  const cplx one = kernels::wdot(w, d.x.values, d.y.values);
  const double n1 = kernels::wnorm2(w, d.x.values);
  kernels::set_threads(4);
  const cplx four = kernels::wdot(w, d.x.values, d.y.values);
  const double n4 = kernels::wnorm2(w, d.x.values);
  kernels::set_threads(saved);
  CHECK(one == four);
  CHECK(n1 == n4);
}

TEST_CASE("combine forms the linear combination") {
  const auto& d = data();
  std::vector<cplx> coeffs{{1, 0}, {0, 2}, {-1, 1}};
  std::vector<cplx> out(d.x.size());
  kernels::combine(d.basis, coeffs, out);
  std::vector<cplx> ref(d.x.size(), 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) kernels::reference::axpy(coeffs[j], d.basis[j], ref);
  CHECK(maxdiff(out, ref) < 1e-13);
}
