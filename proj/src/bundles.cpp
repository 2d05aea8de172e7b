#include "hydrolab/bundles.hpp"

#include <cmath>
#include <ostream>

#include "hydrolab/error.hpp"
#include "hydrolab/random_fields.hpp"

namespace hydrolab {

namespace {

const Mat2& sigma(int j) {
  static const std::array<Mat2, 3> s = [] {
    std::array<Mat2, 3> out;
    out[0] << 0, 1, 1, 0;
    out[1] << 0, cplx(0, -1), cplx(0, 1), 0;
    out[2] << 1, 0, 0, -1;
    return out;
  }();
  return s[j];
}

void add_block(OperatorBuilder& b, int rank, int row_site, int col_site, const Mat2& blk) {
  for (int r = 0; r < rank; ++r)
    for (int c = 0; c < rank; ++c)
      if (blk(r, c) != cplx(0.0)) b.add(row_site * rank + r, col_site * rank + c, blk(r, c));
}

Mat2 eye(int rank) {
  Mat2 m = Mat2::Zero();
  for (int r = 0; r < rank; ++r) m(r, r) = 1.0;
  return m;
}

void require_box(const DiscreteManifold& m, const char* what) {
  if (!m.is_box()) throw UnsupportedError(std::string(what) + ": bundle-valued operators need a FlatBox backend");
}

void require_matching(const DiscreteManifold& m, const ConnectionData& conn, const char* what) {
  if (conn.links.size() != m.edges.size())
    throw SpecError(std::string(what) + ": connection does not match the manifold edges");
}

// Central covariant difference along one axis:
// (N f)(x) = (U_{x,x+e} f(x+e) - U_{x-e,x}^* f(x-e)) / 2h, zero outside the sites.
SparseHermitianOperator central_difference(const DiscreteManifold& m, const ConnectionData& conn,
                                           const SiteMap& sites, const std::vector<int>& table, int axis) {
  const int rank = conn.rank;
  OperatorBuilder b(sites.site_nodes.size() * rank);
  const double inv = 1.0 / (2.0 * m.h);
  for (std::size_t s = 0; s < sites.site_nodes.size(); ++s) {
    const int x = sites.site_nodes[s];
    const int fwd = table[x * 3 + axis];
    if (fwd >= 0) {
      const int ts = sites.node_to_site[m.edges[fwd].b];
      if (ts >= 0) add_block(b, rank, s, ts, inv * conn.forward(fwd));
    }
  }
  // x - e has x as its forward neighbour.
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (m.edges[e].axis != axis) continue;
    const int sa = sites.node_to_site[m.edges[e].a];
    const int sb = sites.node_to_site[m.edges[e].b];
    if (sa >= 0 && sb >= 0) add_block(b, rank, sb, sa, -inv * conn.backward(e));
  }
  return {sites.site_nodes, sites.weights, rank, b.build()};
}

}  // namespace

SparseHermitianOperator assemble_laplace_beltrami(const DiscreteManifold& m, BoundaryClosure closure) {
  const auto sites = active_sites(m);
  const auto& map = sites.node_to_site;
  OperatorBuilder b(sites.site_nodes.size());
  const bool exterior = closure == BoundaryClosure::Exterior && m.is_box() && !m.spec.periodic;
  auto tail_factor = [&](int inside, int outside) {
    if (!exterior) return 0.0;
    const double ri = m.radius(inside), ro = m.radius(outside);
    return ro > 0.0 ? ri / ro : 0.0;
  };
  for (const auto& e : m.edges) {
    const int sa = map[e.a], sb = map[e.b];
    const double c = e.conductance;
    const double wa = m.volume_weights[e.a], wb = m.volume_weights[e.b];
    if (sa >= 0 && sb >= 0) {
      b.add(sa, sa, c / wa);
      b.add(sb, sb, c / wb);
      b.add(sa, sb, -c / wa);
      b.add(sb, sa, -c / wb);
    } else if (sa >= 0) {
      b.add(sa, sa, c / wa * (1.0 - tail_factor(e.a, e.b)));
    } else if (sb >= 0) {
      b.add(sb, sb, c / wb * (1.0 - tail_factor(e.b, e.a)));
    }
  }
  for (std::size_t s = 0; s < sites.site_nodes.size(); ++s) {
    const double pot = m.angular_potential[sites.site_nodes[s]];
    if (pot != 0.0) b.add(s, s, pot);
  }
  return {sites.site_nodes, sites.weights, 1, b.build()};
}

CliffordStructure CliffordStructure::standard() {
  CliffordStructure c;
  for (int j = 0; j < 3; ++j) c.gamma[j] = cplx(0, 1) * sigma(j);
  return c;
}

double CliffordStructure::skew_residual() const {
  double worst = 0.0;
  for (const auto& g : gamma) {
    worst = std::max(worst, (g.adjoint() + g).norm());
    worst = std::max(worst, (g.adjoint() * g - Mat2::Identity()).norm());
  }
  return worst;
}

double CliffordStructure::anticommutator_residual() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Mat2 ac = gamma[i] * gamma[j] + gamma[j] * gamma[i] + (i == j ? 2.0 : 0.0) * Mat2::Identity();
      worst = std::max(worst, ac.norm());
    }
  return worst;
}

double ConnectionData::unitarity_residual() const {
  double worst = 0.0;
  for (const auto& u : links) {
    if (rank == 1)
      worst = std::max(worst, std::abs(std::norm(u(0, 0)) - 1.0));
    else
      worst = std::max(worst, (u.adjoint() * u - Mat2::Identity()).norm());
  }
  return worst;
}

ConnectionData identity_connection(const DiscreteManifold& m, int rank) {
  if (rank != 1 && rank != 2) throw SpecError("connection rank must be 1 or 2");
  require_box(m, "identity_connection");
  ConnectionData c;
  c.rank = rank;
  c.links.assign(m.edges.size(), eye(rank));
  return c;
}

ConnectionData connection_from_potential(const DiscreteManifold& m, const std::vector<OneForm>& beta,
                                         int rank) {
  if (rank != 1 && rank != 2) throw SpecError("connection rank must be 1 or 2");
  require_box(m, "connection_from_potential");
  if (beta.size() != m.node_count()) throw SpecError("connection_from_potential: one 1-form per node required");
  for (const auto& b : beta)
    for (double v : b)
      if (!std::isfinite(v)) throw SpecError("connection_from_potential: beta must be finite");
  ConnectionData c;
  c.rank = rank;
  c.potential_form = beta;
  c.links.resize(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const auto& ed = m.edges[e];
    const double mid = 0.5 * (beta[ed.a][ed.axis] + beta[ed.b][ed.axis]);
    c.links[e] = std::polar(1.0, mid * m.h) * eye(rank);
  }
  return c;
}

ConnectionData gauge_transform(const ConnectionData& conn, const DiscreteManifold& m,
                               const std::vector<double>& chi) {
  require_matching(m, conn, "gauge_transform");
  if (chi.size() != m.node_count()) throw SpecError("gauge_transform: one value per node required");
  ConnectionData out = conn;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const auto& ed = m.edges[e];
    out.links[e] = std::polar(1.0, chi[ed.a] - chi[ed.b]) * conn.links[e];
  }
  return out;
}

std::vector<OneForm> constant_field_potential(const DiscreteManifold& m, double b) {
  std::vector<OneForm> beta(m.node_count());
  for (std::size_t i = 0; i < m.node_count(); ++i)
    beta[i] = {-0.5 * b * m.coords[i][1], 0.5 * b * m.coords[i][0], 0.0};
  return beta;
}

std::vector<int> box_edge_table(const DiscreteManifold& m) {
  require_box(m, "box_edge_table");
  std::vector<int> table(m.node_count() * 3, -1);
  for (std::size_t e = 0; e < m.edges.size(); ++e) table[m.edges[e].a * 3 + m.edges[e].axis] = static_cast<int>(e);
  return table;
}

Mat2 plaquette_holonomy(const DiscreteManifold& m, const ConnectionData& conn, const std::vector<int>& table,
                        int node, int i, int j) {
  const int e1 = table[node * 3 + i];
  const int e4 = table[node * 3 + j];
  if (e1 < 0 || e4 < 0) throw SpecError("plaquette_holonomy: face leaves the grid");
  const int xi = m.edges[e1].b, xj = m.edges[e4].b;
  const int e2 = table[xi * 3 + j];
  const int e3 = table[xj * 3 + i];
  if (e2 < 0 || e3 < 0) throw SpecError("plaquette_holonomy: face leaves the grid");
  return conn.forward(e1) * conn.forward(e2) * conn.backward(e3) * conn.backward(e4);
}

SparseHermitianOperator assemble_bochner(const DiscreteManifold& m, const ConnectionData& conn) {
  require_matching(m, conn, "assemble_bochner");
  const int rank = conn.rank;
  const auto sites = active_sites(m);
  const auto& map = sites.node_to_site;
  OperatorBuilder b(sites.site_nodes.size() * rank);
  const Mat2 id = eye(rank);
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const auto& ed = m.edges[e];
    const int sa = map[ed.a], sb = map[ed.b];
    const double c = ed.conductance;
    const double wa = m.volume_weights[ed.a], wb = m.volume_weights[ed.b];
    if (sa >= 0) add_block(b, rank, sa, sa, (c / wa) * id);
    if (sb >= 0) add_block(b, rank, sb, sb, (c / wb) * id);
    if (sa >= 0 && sb >= 0) {
      add_block(b, rank, sa, sb, (-c / wa) * conn.forward(e));
      add_block(b, rank, sb, sa, (-c / wb) * conn.backward(e));
    }
  }
  for (std::size_t s = 0; s < sites.site_nodes.size(); ++s) {
    const double pot = m.angular_potential[sites.site_nodes[s]];
    if (pot != 0.0) add_block(b, rank, s, s, pot * id);
  }
  return {sites.site_nodes, sites.weights, rank, b.build()};
}

SparseHermitianOperator assemble_bochner_central(const DiscreteManifold& m, const ConnectionData& conn) {
  require_box(m, "assemble_bochner_central");
  require_matching(m, conn, "assemble_bochner_central");
  const auto sites = active_sites(m);
  const auto table = box_edge_table(m);
  OperatorBuilder b(sites.site_nodes.size() * conn.rank);
  for (int axis = 0; axis < 3; ++axis) {
    const auto nj = central_difference(m, conn, sites, table, axis);
    const auto sq = compose(nj, nj);
    const auto& mat = sq.matrix();
    for (std::size_t r = 0; r < mat.rows; ++r)
      for (auto p = mat.row_ptr[r]; p < mat.row_ptr[r + 1]; ++p) b.add(r, mat.col[p], -mat.val[p]);
  }
  return {sites.site_nodes, sites.weights, conn.rank, b.build()};
}

SparseHermitianOperator assemble_dirac(const DiscreteManifold& m, const ConnectionData& conn,
                                       const CliffordStructure& cliff) {
  require_box(m, "assemble_dirac");
  require_matching(m, conn, "assemble_dirac");
  if (conn.rank != 2) throw SpecError("assemble_dirac: rank-2 connection required");
  const auto sites = active_sites(m);
  const auto table = box_edge_table(m);
  OperatorBuilder b(sites.site_nodes.size() * 2);
  for (int axis = 0; axis < 3; ++axis) {
    const auto nj = central_difference(m, conn, sites, table, axis);
    const auto& mat = nj.matrix();
    // N_j has 2x2 blocks; multiply each block row by gamma_j.
    for (std::size_t r = 0; r < mat.rows; ++r) {
      const std::size_t site = r / 2, comp = r % 2;
      for (auto p = mat.row_ptr[r]; p < mat.row_ptr[r + 1]; ++p)
        for (int out = 0; out < 2; ++out) {
          const cplx g = cliff.gamma[axis](out, comp);
          if (g != cplx(0.0)) b.add(site * 2 + out, mat.col[p], g * mat.val[p]);
        }
    }
  }
  return {sites.site_nodes, sites.weights, 2, b.build()};
}

double PotentialField::hermiticity_residual() const {
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, (v - v.adjoint()).norm());
  return worst;
}

PauliAssembly assemble_pauli(const DiscreteManifold& m, const ConnectionData& conn,
                             const CliffordStructure& cliff) {
  if (!conn.has_potential())
    throw SpecError("assemble_pauli: connection lacks a potential form, cannot form V");
  PauliAssembly pa;
  const auto d = assemble_dirac(m, conn, cliff);
  pa.pauli = compose(d, d);
  pa.bochner = assemble_bochner_central(m, conn);

  const auto& beta = conn.potential_form;
  const int n = m.n;
  const bool periodic = m.spec.periodic;
  // d beta_a / d x_axis at node, central inside, one-sided on the shell.
  auto deriv = [&](int node, int axis, int a) {
    auto ijk = m.box_ijk(node);
    auto at = [&](int shift) {
      auto q = ijk;
      q[axis] = periodic ? (q[axis] + shift + n) % n : q[axis] + shift;
      return beta[m.box_index(q[0], q[1], q[2])][a];
    };
    if (periodic || (ijk[axis] > 0 && ijk[axis] < n - 1)) return (at(1) - at(-1)) / (2.0 * m.h);
    if (ijk[axis] == 0) return (at(1) - at(0)) / m.h;
    return (at(0) - at(-1)) / m.h;
  };
  pa.potential.block_size = 2;
  pa.potential.values.resize(m.node_count());
  for (std::size_t x = 0; x < m.node_count(); ++x) {
    const int node = static_cast<int>(x);
    auto f = [&](int i, int j) { return deriv(node, i, j) - deriv(node, j, i); };
    const std::array<double, 3> bfield{f(1, 2), f(2, 0), f(0, 1)};
    Mat2 v = 0.25 * m.scalar_curvature[x] * Mat2::Identity();
    for (int k = 0; k < 3; ++k) v += bfield[k] * sigma(k);
    pa.potential.values[x] = v;
  }
  return pa;
}

SparseHermitianOperator potential_operator(const SparseHermitianOperator& like, const PotentialField& v) {
  const int rank = like.block_size();
  OperatorBuilder b(like.rows());
  for (std::size_t s = 0; s < like.dimension(); ++s) add_block(b, rank, s, s, v.values[like.site_nodes()[s]]);
  return {like.site_nodes(), like.site_weights(), rank, b.build()};
}

double lichnerowicz_residual(const DiscreteManifold& m, const PauliAssembly& pa, int trials, std::uint64_t seed,
                             int max_mode) {
  const auto vop = potential_operator(pa.bochner, pa.potential);
  const std::size_t n = pa.pauli.rows();
  double worst = 0.0;
  std::vector<cplx> lhs(n), rhs(n), tmp(n);
  for (int t = 0; t < trials; ++t) {
    const auto f = smooth_random_field(pa.pauli, m, seed + t, 0.6, max_mode);
    pa.pauli.apply(f.values, lhs);
    pa.bochner.apply(f.values, rhs);
    vop.apply(f.values, tmp);
    kernels::axpy(1.0, tmp, rhs);
    kernels::axpy(-1.0, rhs, lhs);
    worst = std::max(worst, pa.pauli.norm(lhs) / pa.pauli.norm(f.values));
  }
  return worst;
}

double self_energy(const DiscreteManifold& m, const PotentialField& v) {
  if (v.values.size() != m.node_count()) throw SpecError("self_energy: one block per node required");
  double s = 0.0;
  for (std::size_t x = 0; x < m.node_count(); ++x) s += m.volume_weights[x] * v.values[x].squaredNorm();
  return s;
}

KatoCheck kato_inequality_check(const DiscreteManifold& m, const ConnectionData& conn, const FieldVector& f) {
  const auto scalar = assemble_laplace_beltrami(m);
  const auto bochner = assemble_bochner(m, conn);
  if (f.block_size != conn.rank || f.size() != bochner.rows())
    throw SpecError("kato_inequality_check: field does not match the connection");
  FieldVector mod(scalar.dimension(), 1);
  for (std::size_t s = 0; s < scalar.dimension(); ++s) {
    double acc = 0.0;
    for (int c = 0; c < conn.rank; ++c) acc += std::norm(f.values[s * conn.rank + c]);
    mod.values[s] = std::sqrt(acc);
  }
  KatoCheck k;
  k.q_d_of_abs = scalar.quadratic_form(mod.values);
  k.q_conn = bochner.quadratic_form(f.values);
  k.holds = k.q_d_of_abs <= k.q_conn + 1e-12 * std::abs(k.q_conn);
  return k;
}

void write_connection(const DiscreteManifold& m, const ConnectionData& conn, std::ostream& out) {
  require_matching(m, conn, "write_connection");
  out.precision(17);
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    out << m.edges[e].a << ' ' << m.edges[e].b;
    for (int r = 0; r < conn.rank; ++r)
      for (int c = 0; c < conn.rank; ++c) out << ' ' << conn.links[e](r, c).real() << ' ' << conn.links[e](r, c).imag();
    out << '\n';
  }
}

void write_potential(const PotentialField& v, std::ostream& out) {
  out.precision(17);
  for (std::size_t x = 0; x < v.values.size(); ++x) {
    out << x;
    for (int r = 0; r < v.block_size; ++r)
      for (int c = 0; c < v.block_size; ++c) out << ' ' << v.values[x](r, c).real() << ' ' << v.values[x](r, c).imag();
    out << '\n';
  }
}

}  // namespace hydrolab
