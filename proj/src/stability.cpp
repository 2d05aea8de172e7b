#include "hydrolab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "hydrolab/error.hpp"

namespace hydrolab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double half_size(const DiscreteManifold& m) { return m.is_box() ? m.spec.box_half_width : m.spec.r_max; }

std::string describe(const DiscreteManifold& m) {
  if (m.is_box())
    return "FlatBox half_width=" + std::to_string(m.spec.box_half_width) +
           " n=" + std::to_string(m.spec.grid_points_per_axis) + (m.spec.periodic ? " periodic" : "");
  return "WarpedRadial " + to_string(m.spec.warp_profile) + " r_max=" + std::to_string(m.spec.r_max) +
         " radial_points=" + std::to_string(m.spec.radial_points) +
         " lmax=" + std::to_string(m.spec.angular_mode_cutoff);
}

void check_green(const SparseHermitianOperator& p, const GreensField& g) {
  if (p.dimension() == 0) throw SpecError("operator has no sites");
  if (g.values.empty() || static_cast<std::size_t>(p.site_nodes().back()) >= g.values.size())
    throw SpecError("Green's field and operator live on different manifolds");
}

// Least-squares slope of log|E0| against log kappa over trusted bound states.
double fit_exponent(const std::vector<EnergyRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int c = 0;
  for (const auto& r : rows) {
    if (!r.trusted || !(r.E0 < 0.0)) continue;
    const double x = std::log(r.kappa), y = std::log(-r.E0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++c;
  }
  if (c < 2) return kNaN;
  const double den = c * sxx - sx * sx;
  return den > 0.0 ? (c * sxy - sx * sy) / den : kNaN;
}

// E0 nonincreasing and concave in kappa on one field's rows (sorted by kappa).
void shape_checks(const std::vector<EnergyRow>& rows, double tol, bool& monotone, bool& concave) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double scale = tol * std::max(1.0, std::abs(rows[i].E0));
    if (rows[i].E0 > rows[i - 1].E0 + scale) monotone = false;
    if (i + 1 < rows.size()) {
      const double s0 = (rows[i].E0 - rows[i - 1].E0) / (rows[i].kappa - rows[i - 1].kappa);
      const double s1 = (rows[i + 1].E0 - rows[i].E0) / (rows[i + 1].kappa - rows[i].kappa);
      const double dk = std::min(rows[i].kappa - rows[i - 1].kappa, rows[i + 1].kappa - rows[i].kappa);
      if (s1 > s0 + 2.0 * scale / dk) concave = false;
    }
  }
}

std::vector<double> sorted_grid(std::vector<double> g, const char* what) {
  if (g.empty()) throw SpecError(std::string(what) + ": empty kappa grid");
  for (double k : g)
    if (!(k >= 0.0)) throw SpecError(std::string(what) + ": kappa >= 0 required");
  std::sort(g.begin(), g.end());
  return g;
}

void finish_shape(StabilityCertificate& c, double tol) {
  c.monotone = true;
  c.concave = true;
  const int fields = std::max<int>(1, static_cast<int>(c.field_labels.size()));
  for (int f = 0; f < fields; ++f) {
    std::vector<EnergyRow> rows;
    for (const auto& r : c.energy_table)
      if (r.field == (c.field_labels.empty() ? -1 : f)) rows.push_back(r);
    shape_checks(rows, tol, c.monotone, c.concave);
  }
}

}  // namespace

void HamiltonianSpec::validate() const {
  if (!(kappa >= 0.0)) throw SpecError("invariant violated: kappa >= 0");
  if (lambda && !(*lambda > 0.0)) throw SpecError("invariant violated: lambda > 0");
}

SparseHermitianOperator assemble_hamiltonian(const SparseHermitianOperator& p, const GreensField& g,
                                             const HamiltonianSpec& spec) {
  spec.validate();
  check_green(p, g);
  if (spec.base_point >= 0 && spec.base_point != g.base_point)
    throw SpecError("assemble_hamiltonian: Green's field has a different base point");
  std::vector<double> d(p.rows());
  const int b = p.block_size();
  for (std::size_t s = 0; s < p.dimension(); ++s)
    for (int c = 0; c < b; ++c) d[s * b + c] = -spec.kappa * g.values[p.site_nodes()[s]];
  return p.plus_diagonal(d);
}

double quadratic_form(const SparseHermitianOperator& bochner, const PotentialField* potential, const GreensField& g,
                      const HamiltonianSpec& spec, const FieldVector& f) {
  spec.validate();
  check_green(bochner, g);
  if (f.size() != bochner.rows()) throw SpecError("quadratic_form: field does not match the operator");
  double q = bochner.quadratic_form(f.values);
  const int b = bochner.block_size();
  for (std::size_t s = 0; s < bochner.dimension(); ++s) {
    const double w = bochner.site_weights()[s];
    const int node = bochner.site_nodes()[s];
    double mod2 = 0.0;
    for (int c = 0; c < b; ++c) mod2 += std::norm(f.values[s * b + c]);
    q -= spec.kappa * w * g.values[node] * mod2;
    if (potential) {
      const Mat2& v = potential->values[node];
      cplx acc = 0.0;
      for (int r = 0; r < b; ++r)
        for (int c = 0; c < b; ++c) acc += std::conj(f.values[s * b + r]) * v(r, c) * f.values[s * b + c];
      q += w * acc.real();
    }
  }
  return q;
}

GroundState ground_state_energy(const SparseHermitianOperator& h, const SpectralOptions& opts) {
  auto p = smallest_eigenpairs(h, 1, opts);
  return {p[0].value, std::move(p[0].vector), p[0].residual};
}

SobolevReport sobolev_constant(const DiscreteManifold& m, const SparseHermitianOperator& l, int center,
                               const SobolevOptions& opts) {
  if (l.block_size() != 1) throw SpecError("sobolev_constant: scalar operator required");
  const std::size_t n = l.dimension();
  std::vector<double> dist(n);
  std::vector<bool> radial(n, true);
  for (std::size_t s = 0; s < n; ++s) {
    const int node = l.site_nodes()[s];
    dist[s] = geodesic_distance(m, center, node);
    if (!m.is_box()) radial[s] = m.mode_l(node) == 0;
  }
  auto ratio = [&](const std::vector<cplx>& h) {
    double s6 = 0.0;
    for (std::size_t s = 0; s < n; ++s) s6 += l.site_weights()[s] * std::pow(std::norm(h[s]), 3);
    return std::cbrt(s6) / l.quadratic_form(h);
  };
  SobolevReport rep;
  auto record = [&](SobolevSample smp) {
    if (!std::isfinite(smp.ratio) || !(smp.ratio > 0.0))
      throw NumericalError("sobolev_constant: non-positive or non-finite Rayleigh ratio");
    rep.samples.push_back(smp);
    if (smp.ratio > rep.family_max) {
      rep.family_max = smp.ratio;
      rep.best = smp;
    }
  };
  for (double frac : opts.scale_fractions) {
    const double sc = frac * half_size(m);
    std::vector<cplx> h(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
      if (radial[s]) h[s] = 1.0 / std::sqrt(sc * sc + dist[s] * dist[s]);
    record({"aubin_talenti", sc, ratio(h)});
  }
  if (opts.eigenfunctions > 0) {
    const auto pairs = smallest_eigenpairs(l, opts.eigenfunctions, opts.spectral);
    for (std::size_t i = 0; i < pairs.size(); ++i) record({"eigenfunction", double(i), ratio(pairs[i].vector.values)});
  }
  rep.C4 = rep.family_max * opts.safety;
  return rep;
}

bool TrustWindow::contains(const DiscreteManifold& m, double kappa) const {
  if (!(kappa > 0.0)) return false;
  const double a = 8.0 * std::numbers::pi / kappa;
  return a >= min_spacings * m.h * (1.0 - 1e-12) && a <= half_size(m) / containment * (1.0 + 1e-12);
}

std::pair<double, double> TrustWindow::kappa_range(const DiscreteManifold& m) const {
  const double k = 8.0 * std::numbers::pi;
  return {k * containment / half_size(m), k / (min_spacings * m.h)};
}

std::string EnergyRow::flag() const {
  std::string f = pass ? "pass" : "fail";
  if (!trusted) f += ";discretization-suspect";
  if (!in_regime) f += ";outside-guaranteed-regime";
  return f;
}

StabilityCertificate certify_scalar(const DiscreteManifold& m, const SparseHermitianOperator& heat_operator,
                                    const SparseHermitianOperator& scalar, const GreensField& g,
                                    const GaussianBoundFit& fit, const std::vector<double>& r_grid,
                                    const std::vector<double>& kappa_grid, const CertifyOptions& opts) {
  const auto kappas = sorted_grid(kappa_grid, "certify_scalar");
  StabilityCertificate c;
  c.kind = "scalar";
  c.base_point = g.base_point;
  c.seed = opts.seed;
  c.window = opts.window;
  c.grid = describe(m);

  double lambda1 = 0.0;
  try {
    lambda1 = opts.lambda1 ? *opts.lambda1 : spectral_gap(heat_operator, opts.spectral);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("certify_scalar [spectral gap]: ") + e.what(), e.best_residual());
  }
  try {
    c.kato_table = kato_class_constant(m, heat_operator, g, r_grid, lambda1, opts.time_grid, opts.semigroup);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("certify_scalar [Kato constant]: ") + e.what(), e.best_residual());
  }
  for (const auto& k : c.kato_table)
    if (k.C_sqrt_r > c.C_kato) {
      c.C_kato = k.C_sqrt_r;
      c.kato_attaining_node = k.attaining_node;
    }
  c.C6 = std::sqrt(2.0) * c.C_kato * c.C_kato;
  c.C_final = 2.0 * c.C6;

  const auto decay = green_decay_constant(m, g, fit);
  c.C1 = fit.C1;
  c.C2 = fit.C2;
  c.C3_measured = decay.C3_measured;
  c.C3_predicted = decay.C3_predicted;
  c.C3_holds = decay.holds;

  for (double k : kappas) {
    GroundState gs;
    try {
      gs = ground_state_energy(assemble_hamiltonian(scalar, g, {k, -1, std::nullopt}), opts.spectral);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("certify_scalar [ground state, kappa=") + std::to_string(k) + "]: " + e.what(),
                           e.best_residual());
    }
    EnergyRow r;
    r.kappa = k;
    r.E0 = gs.E0;
    r.residual = gs.residual;
    r.reference_E0 = kNaN;
    r.self_energy = 0.0;
    r.bound = -c.C6 * k * k;
    r.margin = r.E0 - r.bound;
    r.trusted = opts.window.contains(m, k);
    r.in_regime = true;
    r.pass = r.margin >= 0.0;
    c.energy_table.push_back(r);
  }
  c.fit_exponent = fit_exponent(c.energy_table);
  finish_shape(c, opts.energy_tol);
  c.all_pass = c.C3_holds && c.monotone && c.concave &&
               std::all_of(c.energy_table.begin(), c.energy_table.end(), [](const EnergyRow& r) { return r.pass; });
  return c;
}

StabilityCertificate certify_magnetic(const DiscreteManifold& m, const std::vector<ConnectionData>& connections,
                                      const std::vector<std::string>& labels, const GreensField& g,
                                      const std::vector<double>& kappa_grid, double C6, const CertifyOptions& opts) {
  const auto kappas = sorted_grid(kappa_grid, "certify_magnetic");
  if (!(C6 > 0.0)) throw SpecError("certify_magnetic: C6 > 0 required");
  if (labels.size() != connections.size()) throw SpecError("certify_magnetic: one label per connection");
  StabilityCertificate c;
  c.kind = "magnetic";
  c.base_point = g.base_point;
  c.seed = opts.seed;
  c.window = opts.window;
  c.grid = describe(m);
  c.C6 = C6;
  c.C_final = C6;
  c.field_labels = labels;

  const auto scalar = assemble_laplace_beltrami(m);
  std::vector<double> reference;
  for (double k : kappas) reference.push_back(ground_state_energy(assemble_hamiltonian(scalar, g, {k, -1, std::nullopt}), opts.spectral).E0);

  for (std::size_t f = 0; f < connections.size(); ++f) {
    if (connections[f].rank != 1) throw SpecError("certify_magnetic: rank-1 connections expected");
    const auto bochner = assemble_bochner(m, connections[f]);
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      const double k = kappas[i];
      GroundState gs;
      try {
        gs = ground_state_energy(assemble_hamiltonian(bochner, g, {k, -1, std::nullopt}), opts.spectral);
      } catch (const NumericalError& e) {
        throw NumericalError("certify_magnetic [" + labels[f] + ", kappa=" + std::to_string(k) + "]: " + e.what(),
                             e.best_residual());
      }
      EnergyRow r;
      r.field = static_cast<int>(f);
      r.kappa = k;
      r.E0 = gs.E0;
      r.residual = gs.residual;
      r.reference_E0 = reference[i];
      r.self_energy = 0.0;
      r.bound = -C6 * k * k;
      r.margin = r.E0 - r.bound;
      r.trusted = opts.window.contains(m, k);
      r.in_regime = true;
      const double slack = opts.energy_tol * std::max(1.0, std::abs(reference[i]));
      r.pass = r.margin >= 0.0 && r.E0 >= reference[i] - slack && reference[i] >= r.bound;
      c.energy_table.push_back(r);
    }
  }
  c.fit_exponent = fit_exponent(c.energy_table);
  finish_shape(c, opts.energy_tol);
  c.all_pass = std::all_of(c.energy_table.begin(), c.energy_table.end(), [](const EnergyRow& r) { return r.pass; });
  return c;
}

StabilityCertificate certify_spin(const DiscreteManifold& m, const std::vector<PauliAssembly>& assemblies,
                                  const std::vector<std::string>& labels, const GreensField& g, double lambda,
                                  const std::vector<double>& kappa_grid, double C6, double C4,
                                  const CertifyOptions& opts) {
  const auto kappas = sorted_grid(kappa_grid, "certify_spin");
  if (!(lambda > 0.0)) throw SpecError("certify_spin: Lambda > 0 required");
  if (!(C6 > 0.0) || !(C4 > 0.0)) throw SpecError("certify_spin: C6 > 0 and C4 > 0 required");
  if (labels.size() != assemblies.size()) throw SpecError("certify_spin: one label per assembly");
  StabilityCertificate c;
  c.kind = "spin";
  c.base_point = g.base_point;
  c.seed = opts.seed;
  c.window = opts.window;
  c.grid = describe(m);
  c.C4 = C4;
  c.C6 = C6;
  c.C_final = 2.0 * C6;
  c.lambda = lambda;
  c.kappa0_per_lambda2 = 1.0 / (8.0 * std::sqrt(C6) * C4);
  c.kappa0 = lambda * lambda * c.kappa0_per_lambda2;
  c.field_labels = labels;

  for (std::size_t f = 0; f < assemblies.size(); ++f) {
    const double s = self_energy(m, assemblies[f].potential);
    for (double k : kappas) {
      GroundState gs;
      try {
        gs = ground_state_energy(assemble_hamiltonian(assemblies[f].pauli, g, {k, -1, std::nullopt}), opts.spectral);
      } catch (const NumericalError& e) {
        throw NumericalError("certify_spin [" + labels[f] + ", kappa=" + std::to_string(k) + "]: " + e.what(),
                             e.best_residual());
      }
      EnergyRow r;
      r.field = static_cast<int>(f);
      r.kappa = k;
      r.E0 = gs.E0;
      r.residual = gs.residual;
      r.reference_E0 = kNaN;
      r.self_energy = s;
      r.bound = -c.C_final * k * k;
      r.margin = r.E0 + lambda * s - r.bound;
      r.trusted = opts.window.contains(m, k);
      r.in_regime = k <= c.kappa0;
      r.pass = r.margin >= 0.0;
      c.energy_table.push_back(r);
    }
  }
  c.fit_exponent = kNaN;
  finish_shape(c, opts.energy_tol);
  c.all_pass = std::all_of(c.energy_table.begin(), c.energy_table.end(),
                           [](const EnergyRow& r) { return r.pass || !r.in_regime; });
  return c;
}

SmoothingReport smoothing_check(const SparseHermitianOperator& h, double E0, const std::vector<double>& t_grid,
                                const FieldVector& f, const std::vector<int>& probes, const SemigroupOptions& opts) {
  if (f.size() != h.rows()) throw SpecError("smoothing_check: field does not match the operator");
  auto times = t_grid;
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() < 0.0) throw SpecError("smoothing_check: nonnegative times required");
  const auto a = h.shifted(-E0);
  FieldVector u = f;
  kernels::scale(1.0 / h.norm(u.values), u.values);

  std::vector<FieldVector> probe_vecs;
  const auto map = h.node_to_site(static_cast<std::size_t>(*std::max_element(h.site_nodes().begin(), h.site_nodes().end())) + 1);
  for (int node : probes) {
    if (node < 0 || static_cast<std::size_t>(node) >= map.size() || map[node] < 0)
      throw SpecError("smoothing_check: probe is not an active node");
    FieldVector d(h.dimension(), h.block_size());
    d.values[map[node] * h.block_size()] = 1.0 / h.site_weights()[map[node]];
    probe_vecs.push_back(std::move(d));
  }

  SmoothingReport rep;
  rep.E0 = E0;
  rep.finite = true;
  rep.nonincreasing = true;
  rep.sup_nonincreasing = true;
  double now = 0.0;
  for (double t : times) {
    const double dt = t - now;
    if (dt > 0.0) {
      u = apply_semigroup(a, dt, u, opts);
      for (auto& p : probe_vecs) p = apply_semigroup(a, dt, p, opts);
    }
    now = t;
    SmoothingRow row{t, 0.0, h.norm(u.values), 0.0};
    for (const auto& v : u.values) row.sup_norm = std::max(row.sup_norm, std::abs(v));
    for (const auto& p : probe_vecs) row.norm_2_inf = std::max(row.norm_2_inf, h.norm(p.values));
    if (!std::isfinite(row.sup_norm) || !std::isfinite(row.norm_2_inf)) rep.finite = false;
    if (!rep.rows.empty()) {
      const auto& prev = rep.rows.back();
      if (row.norm_2_inf > prev.norm_2_inf * (1.0 + 10.0 * opts.tol)) rep.nonincreasing = false;
      if (row.sup_norm > prev.sup_norm * (1.0 + 10.0 * opts.tol)) rep.sup_nonincreasing = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json to_json(const StabilityCertificate& c) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["kind"] = c.kind;
  j["grid"] = c.grid;
  j["base_point"] = c.base_point;
  j["seed"] = c.seed;
  j["constants"] = {{"C1", num(c.C1)},
                    {"C2", num(c.C2)},
                    {"C3_measured", num(c.C3_measured)},
                    {"C3_predicted", num(c.C3_predicted)},
                    {"C3_holds", c.C3_holds},
                    {"C4", num(c.C4)},
                    {"C_kato", num(c.C_kato)},
                    {"C_kato_attaining_node", c.kato_attaining_node},
                    {"C6", num(c.C6)},
                    {"C_final", num(c.C_final)},
                    {"lambda", num(c.lambda)},
                    {"kappa0_per_lambda2", num(c.kappa0_per_lambda2)},
                    {"kappa0", num(c.kappa0)}};
  j["trust_window"] = {{"min_bohr_radius_in_spacings", c.window.min_spacings},
                       {"max_bohr_radius_fraction", 1.0 / c.window.containment}};
  json kt = json::array();
  for (const auto& k : c.kato_table)
    kt.push_back({{"r", k.r}, {"C_r", k.C}, {"C_r_times_sqrt_r", k.C_sqrt_r}, {"attaining_node", k.attaining_node}});
  j["kato_table"] = kt;
  j["fields"] = c.field_labels;
  json rows = json::array();
  for (const auto& r : c.energy_table) {
    json row = {{"kappa", r.kappa},  {"E0", r.E0},         {"residual", r.residual}, {"bound", r.bound},
                {"margin", r.margin}, {"trusted", r.trusted}, {"in_regime", r.in_regime}, {"pass", r.pass},
                {"flag", r.flag()}};
    if (r.field >= 0) row["field"] = c.field_labels[r.field];
    if (std::isfinite(r.reference_E0)) row["reference_E0"] = r.reference_E0;
    if (c.kind == "spin") {
      row["self_energy"] = r.self_energy;
      row["lambda_S"] = c.lambda * r.self_energy;
    }
    rows.push_back(row);
  }
  j["energy_table"] = rows;
  j["fit_exponent"] = num(c.fit_exponent);
  j["monotone"] = c.monotone;
  j["concave"] = c.concave;
  j["all_pass"] = c.all_pass;
  return j;
}

nlohmann::json to_json(const SobolevReport& r) {
  nlohmann::json j;
  j["family_max"] = r.family_max;
  j["C4"] = r.C4;
  j["best"] = {{"family", r.best.family}, {"parameter", r.best.parameter}, {"ratio", r.best.ratio}};
  auto arr = nlohmann::json::array();
  for (const auto& s : r.samples) arr.push_back({{"family", s.family}, {"parameter", s.parameter}, {"ratio", s.ratio}});
  j["samples"] = arr;
  return j;
}

nlohmann::json to_json(const SmoothingReport& r) {
  nlohmann::json j;
  j["E0"] = r.E0;
  j["finite"] = r.finite;
  j["nonincreasing"] = r.nonincreasing;
  j["sup_nonincreasing"] = r.sup_nonincreasing;
  auto arr = nlohmann::json::array();
  for (const auto& row : r.rows)
    arr.push_back({{"t", row.t}, {"sup_norm", row.sup_norm}, {"l2_norm", row.l2_norm}, {"norm_2_inf", row.norm_2_inf}});
  j["rows"] = arr;
  return j;
}

void write_energy_csv(const StabilityCertificate& c, int field, std::ostream& out) {
  out.precision(12);
  out << "kappa,E0,bound,margin,flag\n";
  for (const auto& r : c.energy_table)
    if (r.field == field) out << r.kappa << ',' << r.E0 << ',' << r.bound << ',' << r.margin << ',' << r.flag() << '\n';
}

}  // namespace hydrolab
