#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "hydrolab/bundles.hpp"
#include "hydrolab/error.hpp"

using namespace hydrolab;

TEST_CASE("box Laplacian is weighted-Hermitian and eliminates the boundary") {
  const auto m = testing::box(1.0, 7);
  for (auto closure : {BoundaryClosure::Dirichlet, BoundaryClosure::Exterior}) {
    const auto l = assemble_laplace_beltrami(m, closure);
    CHECK(l.dimension() == 125);
    CHECK(l.hermiticity_residual() < 1e-12);
    for (int node : l.site_nodes()) CHECK_FALSE(m.boundary_mask[node]);
  }
}

TEST_CASE("Dirichlet stencil has the 6 / h^2 diagonal") {
  const auto m = testing::box(1.0, 9);
  const auto l = assemble_laplace_beltrami(m);
  for (auto d : l.diagonal()) CHECK(d.real() == doctest::Approx(6.0 / (m.h * m.h)));
}

TEST_CASE("plus_diagonal, shifted and compose") {
  const auto a = testing::random_operator(6, 3);
  std::vector<double> d{1, 2, 3, 4, 5, 6};
  const Eigen::MatrixXcd ad = testing::dense(a.plus_diagonal(d)) - testing::dense(a);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(std::abs(ad(i, j) - (i == j ? d[i] : 0.0)) < 1e-12);
  const Eigen::MatrixXcd as = testing::dense(a.shifted(-2.5)) - testing::dense(a);
  CHECK((as + 2.5 * Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-12);
  const auto b = testing::random_operator(6, 4);
  const Eigen::MatrixXcd ab = testing::dense(compose(a, b));
  CHECK((ab - testing::dense(a) * testing::dense(b)).norm() < 1e-10 * ab.norm());
}

TEST_CASE("inner product, norm and quadratic form use the weights") {
  const auto a = testing::random_operator(5, 9);
  std::vector<cplx> x{{1, 0}, {0, 1}, {2, -1}, {0.5, 0}, {-1, 3}};
  const auto w = a.dof_weights();
  cplx ref = 0;
  for (int i = 0; i < 5; ++i) ref += w[i] * std::norm(x[i]);
  CHECK(a.norm(x) == doctest::Approx(std::sqrt(ref.real())));
  const Eigen::VectorXcd xv = Eigen::Map<Eigen::VectorXcd>(x.data(), 5);
  const Eigen::VectorXcd ax = testing::dense(a) * xv;
  cplx q = 0;
  for (int i = 0; i < 5; ++i) q += w[i] * std::conj(x[i]) * ax[i];
  CHECK(a.quadratic_form(x) == doctest::Approx(q.real()));
  CHECK(std::abs(q.imag()) < 1e-10 * std::abs(q.real()));
}

TEST_CASE("restrict and extend round trip") {
  const auto m = testing::box(1.0, 6);
  const auto l = assemble_laplace_beltrami(m);
  std::vector<double> f(m.node_count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * double(i) + 1.0;
  const auto s = restrict_to_sites(l, f);
  CHECK(s.size() == l.dimension());
  const auto back = extend_to_nodes(l, s, m.node_count());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i].real() == (m.boundary_mask[i] ? 0.0 : f[i]));
  const auto map = l.node_to_site(m.node_count());
  for (std::size_t k = 0; k < l.dimension(); ++k) CHECK(map[l.site_nodes()[k]] == int(k));
}

TEST_CASE("operator and vector text round trip") {
  const auto a = testing::random_operator(7, 11);
  std::stringstream s;
  write_operator(a, s);
  const auto r = read_operator(s, a.site_nodes(), {a.site_weights().begin(), a.site_weights().end()});
  CHECK((testing::dense(r) - testing::dense(a)).norm() == 0.0);

  FieldVector f(3, 2);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = {0.1 * double(i), -1.0 / (1.0 + i)};
  std::stringstream v;
  write_vector(f, v);
  const auto g = read_vector(v, 2);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g.values[i] == f.values[i]);
}

TEST_CASE("field vectors detect non-finite entries") {
  FieldVector f(4, 1);
  CHECK(f.all_finite());
  f.values[2] = {std::nan(""), 0.0};
  CHECK_FALSE(f.all_finite());
}
