#include "hydrolab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "hydrolab/error.hpp"

namespace hydrolab {

namespace {

using Basis = std::vector<std::vector<cplx>>;

std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

// Two classical Gram-Schmidt passes; coeff receives the accumulated projections.
void orthogonalize(std::span<const double> w, const Basis& q, std::size_t count,
                   std::span<cplx> x, std::vector<cplx>& coeff) {
  coeff.assign(count, 0.0);
  std::vector<cplx> pass(count);
  for (int rep = 0; rep < 2; ++rep) {
    kernels::project_out(w, q, count, x, pass);
    for (std::size_t i = 0; i < count; ++i) coeff[i] += pass[i];
  }
}

struct CoreResult {
  std::vector<Eigenpair> pairs;
  bool converged = false;
  double best_residual = std::numeric_limits<double>::infinity();
};

// Thick-restart Lanczos for the k lowest eigenpairs of A restricted to the
// weighted-orthogonal complement of `locked`.
CoreResult lanczos_core(const SparseHermitianOperator& a, int k, const SpectralOptions& o,
                        const Basis& locked, std::mt19937_64& rng, int& budget) {
  const std::size_t n = a.rows();
  const std::size_t nl = locked.size();
  const auto w = a.dof_weights();
  const std::size_t avail = n - nl;
  k = static_cast<int>(std::min<std::size_t>(k, avail));
  std::size_t m = o.basis_size > 0 ? static_cast<std::size_t>(o.basis_size)
                                   : std::max<std::size_t>(2 * k + 20, 24);
  m = std::max<std::size_t>(std::min(m, avail), static_cast<std::size_t>(k));

  Basis q = locked;
  q.reserve(nl + m + 1);
  std::vector<cplx> coeff;

  auto fresh_direction = [&](std::size_t count) {
    auto v = random_vector(n, rng);
    orthogonalize(w, q, count, v, coeff);
    const double nv = std::sqrt(kernels::wnorm2(w, v));
    kernels::scale(1.0 / nv, v);
    return v;
  };

  q.push_back(fresh_direction(nl));
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, m);
  std::size_t j = 0;
  double scale = 0.0;
  CoreResult result;

  while (true) {
    double beta_last = 0.0;
    bool exhausted_space = false;
    while (j < m) {
      std::vector<cplx> av(n);
      a.apply(q[nl + j], av);
      --budget;
      orthogonalize(w, q, nl + j + 1, av, coeff);
      for (std::size_t i = 0; i <= j; ++i) t(i, j) = coeff[nl + i];
      scale = std::max(scale, std::abs(coeff[nl + j]));
      const double beta = std::sqrt(kernels::wnorm2(w, av));
      const bool breakdown = beta <= 1e-12 * std::max(scale, 1.0);
      if (j + 1 == m) {
        beta_last = breakdown ? 0.0 : beta;
        if (!breakdown) {
          kernels::scale(1.0 / beta, av);
          q.push_back(std::move(av));
        }
        ++j;
        break;
      }
      if (breakdown) {
        if (nl + j + 1 >= n) {
          exhausted_space = true;
          ++j;
          break;
        }
        q.push_back(fresh_direction(nl + j + 1));
      } else {
        kernels::scale(1.0 / beta, av);
        q.push_back(std::move(av));
      }
      ++j;
    }

    Eigen::MatrixXcd tm = t.topLeftCorner(j, j);
    for (std::size_t c = 0; c < j; ++c) {
      tm(c, c) = tm(c, c).real();
      for (std::size_t r = c + 1; r < j; ++r) tm(r, c) = std::conj(tm(c, r));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(tm);
    const auto& theta = es.eigenvalues();
    const auto& s = es.eigenvectors();
    const int want = std::min<int>(k, static_cast<int>(j));
    double worst = 0.0;
    for (int i = 0; i < want; ++i) {
      const double res = exhausted_space ? 0.0 : beta_last * std::abs(s(j - 1, i));
      worst = std::max(worst, res);
    }
    result.best_residual = std::min(result.best_residual, worst);
    const bool converged = worst <= o.tol && want == k;

    if (converged || budget <= 0 || exhausted_space) {
      result.converged = converged || (exhausted_space && want == k);
      for (int i = 0; i < want; ++i) {
        FieldVector y(a.dimension(), a.block_size());
        std::vector<cplx> c(j);
        for (std::size_t l = 0; l < j; ++l) c[l] = s(l, i);
        Basis view(q.begin() + nl, q.begin() + nl + j);
        kernels::combine(view, c, y.values);
        std::vector<cplx> ay(n);
        a.apply(y.values, ay);
        kernels::axpy(-theta(i), y.values, ay);
        const double res = std::sqrt(kernels::wnorm2(w, ay));
        result.pairs.push_back({theta(i), std::move(y), res});
      }
      return result;
    }

    // Thick restart: keep the p lowest Ritz vectors plus the residual direction.
    const std::size_t p = std::min<std::size_t>(j - 1, std::max<std::size_t>(k + (j - k) / 2, k + 1));
    Basis kept(p, std::vector<cplx>(n));
    {
      Basis view(q.begin() + nl, q.begin() + nl + j);
      std::vector<cplx> c(j);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t l = 0; l < j; ++l) c[l] = s(l, i);
        kernels::combine(view, c, kept[i]);
      }
    }
    std::vector<cplx> residual_dir = std::move(q[nl + j]);
    q.resize(nl);
    for (auto& v : kept) q.push_back(std::move(v));
    q.push_back(std::move(residual_dir));
    t.setZero();
    for (std::size_t i = 0; i < p; ++i) t(i, i) = theta(i);
    j = p;
  }
}

}  // namespace

std::vector<Eigenpair> smallest_eigenpairs(const SparseHermitianOperator& a, int k,
                                           const SpectralOptions& opts) {
  if (k < 1) throw SpecError("smallest_eigenpairs: k >= 1 required");
  if (!(opts.tol > 0.0)) throw SpecError("smallest_eigenpairs: tol > 0 required");
  if (static_cast<std::size_t>(k) > a.rows()) throw SpecError("smallest_eigenpairs: k exceeds dimension");
  std::mt19937_64 rng(opts.seed);
  int budget = opts.max_iterations;
  Basis none;
  auto core = lanczos_core(a, k, opts, none, rng, budget);
  if (!core.converged)
    throw NumericalError("smallest_eigenpairs: no convergence within the iteration budget",
                         core.best_residual);
  auto pairs = std::move(core.pairs);

  // A single Krylov sequence sees one copy of each degenerate eigenspace;
  // re-solve on the complement of the found vectors to catch skipped copies.
  if (k > 1) {
    for (int round = 0; round < k && static_cast<std::size_t>(k) < a.rows(); ++round) {
      Basis found;
      for (const auto& p : pairs) found.push_back(p.vector.values);
      auto extra = lanczos_core(a, 1, opts, found, rng, budget);
      if (!extra.converged)
        throw NumericalError("smallest_eigenpairs: deflated check did not converge",
                             extra.best_residual);
      const double top = pairs.back().value;
      if (!(extra.pairs[0].value < top - 10.0 * opts.tol)) break;
      pairs.back() = std::move(extra.pairs[0]);
      std::sort(pairs.begin(), pairs.end(),
                [](const Eigenpair& x, const Eigenpair& y) { return x.value < y.value; });
    }
  }
  return pairs;
}

FieldVector apply_semigroup(const SparseHermitianOperator& a, double t, const FieldVector& f,
                            const SemigroupOptions& opts, SemigroupStats* stats) {
  if (t < 0.0 || !std::isfinite(t)) throw SpecError("apply_semigroup: t >= 0 required");
  if (t == 0.0) return f;
  const std::size_t n = a.rows();
  const auto w = a.dof_weights();
  const double norm_f = a.norm(f.values);
  FieldVector u = f;
  if (norm_f == 0.0) return u;

  const int mmax = static_cast<int>(std::min<std::size_t>(opts.max_basis, n));
  double remaining = t;
  int substeps = 0;
  Basis v;
  std::vector<cplx> coeff;
  while (remaining > 0.0) {
    if (++substeps > opts.max_substeps)
      throw NumericalError("apply_semigroup: substep budget exhausted");
    const double nu = a.norm(u.values);
    if (nu == 0.0) break;
    v.clear();
    v.push_back(u.values);
    kernels::scale(1.0 / nu, v[0]);
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(mmax, mmax);
    double beta = 0.0;
    int dim = 0;
    double tau = remaining;
    Eigen::VectorXd expv;

    // Ritz spread of the current basis; the error estimate below only means
    // something once the degree reaches about sqrt(spread * step).
    double spread = 0.0;
    auto exp_first_column = [&](int d, double step) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri.topLeftCorner(d, d));
      const auto& ev = es.eigenvalues();
      spread = ev(d - 1) - ev(0);
      // shift by the lowest Ritz value so large steps do not underflow
      const Eigen::VectorXd e = (-step * (ev.array() - ev(0))).exp() * std::exp(-step * ev(0));
      return Eigen::VectorXd(es.eigenvectors() * e.asDiagonal() * es.eigenvectors().row(0).transpose());
    };
    auto resolved = [&](int d, double step) { return d * d >= spread * step; };
    auto step_tol = [&](double step) { return 0.5 * opts.tol * norm_f * step / t; };

    bool accepted = false;
    for (int jj = 0; jj < mmax; ++jj) {
      std::vector<cplx> av(n);
      a.apply(v[jj], av);
      if (stats) ++stats->applications;
      orthogonalize(w, v, jj + 1, av, coeff);
      tri(jj, jj) = coeff[jj].real();
      if (jj > 0) {
        tri(jj - 1, jj) = coeff[jj - 1].real();
        tri(jj, jj - 1) = tri(jj - 1, jj);
      }
      beta = std::sqrt(kernels::wnorm2(w, av));
      dim = jj + 1;
      const double scale = std::max(1.0, std::abs(tri(jj, jj)));
      if (!std::isfinite(beta)) throw NumericalError("apply_semigroup: Krylov breakdown (non-finite)");
      if (beta <= 1e-13 * scale) {
        expv = exp_first_column(dim, tau);
        accepted = true;
        break;
      }
      if (jj >= 1) {
        expv = exp_first_column(dim, tau);
        const double err = nu * beta * std::abs(expv(dim - 1));
        if (err <= step_tol(tau) && resolved(dim, tau)) {
          accepted = true;
          break;
        }
      }
      if (jj + 1 < mmax) {
        kernels::scale(1.0 / beta, av);
        v.push_back(std::move(av));
        tri(jj + 1, jj) = beta;
        tri(jj, jj + 1) = beta;
      }
    }
    if (!accepted) {
      // Largest step the full basis resolves.
      for (int halvings = 0; halvings < 200; ++halvings) {
        tau *= 0.5;
        expv = exp_first_column(dim, tau);
        if (nu * beta * std::abs(expv(dim - 1)) <= step_tol(tau) && resolved(dim, tau)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) throw NumericalError("apply_semigroup: Krylov step could not be resolved");
    }
    std::vector<cplx> c(dim);
    for (int i = 0; i < dim; ++i) c[i] = nu * expv(i);
    Basis view(v.begin(), v.begin() + dim);
    kernels::combine(view, c, u.values);
    if (tau >= remaining * (1.0 - 1e-14))
      remaining = 0.0;
    else
      remaining -= tau;
  }
  if (stats) stats->substeps += substeps;
  if (!u.all_finite()) throw NumericalError("apply_semigroup: non-finite result");
  return u;
}

FieldVector solve_spd(const SparseHermitianOperator& a, const FieldVector& b, double shift,
                      const SolveOptions& opts, SolveStats* stats) {
  const std::size_t n = a.rows();
  const auto w = a.dof_weights();
  if (b.size() != n) throw SpecError("solve_spd: right-hand side has the wrong length");
  const auto diag = a.diagonal();
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = diag[i].real() + shift;
    if (!(d > 0.0)) throw NumericalError("solve_spd: non-positive diagonal, operator is not positive definite");
    inv[i] = 1.0 / d;
  }
  FieldVector x(a.dimension(), a.block_size());
  const double bnorm = a.norm(b.values);
  if (bnorm == 0.0) return x;

  std::vector<cplx> r = b.values, z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv[i] * r[i];
  p = z;
  cplx rz = kernels::wdot(w, r, z);
  double rel = 1.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    a.apply(p, ap);
    if (shift != 0.0) kernels::axpy(shift, p, ap);
    const double curv = kernels::wdot(w, p, ap).real();
    if (!(curv > 0.0))
      throw NumericalError("solve_spd: non-positive curvature direction (operator indefinite)", rel);
    const cplx alpha = rz / curv;
    kernels::axpy(alpha, p, x.values);
    kernels::axpy(-alpha, ap, r);
    rel = std::sqrt(kernels::wnorm2(w, r)) / bnorm;
    if (rel <= opts.tol) {
      ++it;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv[i] * r[i];
    const cplx rz_new = kernels::wdot(w, r, z);
    const cplx beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (stats) *stats = {it, rel};
  if (rel > opts.tol) throw NumericalError("solve_spd: iteration budget exhausted", rel);
  return x;
}

}  // namespace hydrolab
