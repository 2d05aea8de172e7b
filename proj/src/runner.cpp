#include "hydrolab/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hydrolab/random_fields.hpp"

namespace hydrolab {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"heat",           "green",          "kato",
                                          "sobolev",        "sweep",          "certify-scalar",
                                          "certify-magnetic", "certify-spin", "check-invariants"};
  return s;
}

OutputSet::OutputSet(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void OutputSet::add(const std::string& name, const std::string& content) {
  const fs::path target = fs::path(dir_) / name;
  const fs::path tmp = fs::path(dir_) / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
  files_.push_back({name, content.size(), fnv1a(content)});
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

void OutputSet::finish(const std::string& subcommand, std::uint64_t config_hash, std::uint64_t seed, int exit_code) {
  json files = json::array();
  for (const auto& f : files_) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a", hex(f.hash)}});
  json m = {{"subcommand", subcommand}, {"config_hash", hex(config_hash)}, {"seed", seed},
            {"exit_code", exit_code},   {"timestamp", utc_timestamp()},     {"files", files}};
  const std::string text = m.dump(2) + "\n";
  const fs::path tmp = fs::path(dir_) / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
  }
  fs::rename(tmp, fs::path(dir_) / "manifest.json");
}

std::vector<InvariantTally> check_invariants(const DiscreteManifold& m, int trials, std::uint64_t seed,
                                             const SpectralOptions& spectral, const SemigroupOptions& semigroup) {
  InvariantTally herm{"weighted_hermiticity", 0, 0, 0.0, 1e-12};
  InvariantTally kato{"kato_inequality", 0, 0, 0.0, 0.0};
  InvariantTally gauge{"gauge_invariant_spectrum", 0, 0, 0.0, 1e-6};
  InvariantTally ck{"chapman_kolmogorov", 0, 0, 0.0, 2.0 * semigroup.tol};
  InvariantTally psd{"dirac_square_psd", 0, 0, 0.0, -1e-10};
  const bool box = m.is_box();
  if (!box) kato.skipped = gauge.skipped = psd.skipped = true;

  const auto scalar = assemble_laplace_beltrami(m);
  const auto& sites = scalar.site_nodes();
  SpectralOptions eig = spectral;
  eig.tol = std::min(eig.tol, 1e-9);
  psd.worst = std::numeric_limits<double>::infinity();
  kato.worst = -std::numeric_limits<double>::infinity();

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = seed * 1000003ull + static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(s);
    auto note = [](InvariantTally& tally, double value, bool ok) {
      ++tally.trials;
      if (!ok) ++tally.failures;
      tally.worst = value;
    };

    {
      double r = scalar.hermiticity_residual();
      if (box) {
        const auto conn1 = connection_from_potential(m, random_fourier_potential(m, s, 1.0), 1);
        const auto conn2 = connection_from_potential(m, random_fourier_potential(m, s ^ 0x9e37ull, 1.0), 2);
        r = std::max({r, assemble_bochner(m, conn1).hermiticity_residual(),
                      assemble_dirac(m, conn2, CliffordStructure::standard()).hermiticity_residual(),
                      assemble_pauli(m, conn2, CliffordStructure::standard()).pauli.hermiticity_residual()});
      }
      note(herm, std::max(herm.worst, r), r <= herm.threshold);
    }

    const double ts = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double tt = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const int y = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng)];
    {
      const double r = chapman_kolmogorov_residual(scalar, y, ts, tt, semigroup);
      note(ck, std::max(ck.worst, r), r <= ck.threshold);
    }
    if (!box) continue;

    const auto conn = connection_from_potential(m, random_fourier_potential(m, s, 1.0), 1);
    {
      const auto bochner = assemble_bochner(m, conn);
      const auto f = gaussian_random_field(bochner, s);
      const auto kc = kato_inequality_check(m, conn, f);
      const double margin = (kc.q_d_of_abs - kc.q_conn) / std::max(kc.q_conn, 1e-300);
      note(kato, std::max(kato.worst, margin), kc.holds);
    }
    {
      const auto chi = random_gauge_function(m, s + 17, std::numbers::pi, 4);
      const auto a = smallest_eigenpairs(assemble_bochner(m, conn), 3, eig);
      const auto b = smallest_eigenpairs(assemble_bochner(m, gauge_transform(conn, m, chi)), 3, eig);
      double d = 0.0;
      for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i].value - b[i].value));
      note(gauge, std::max(gauge.worst, d), d <= gauge.threshold);
    }
    {
      const auto conn2 = connection_from_potential(m, random_fourier_potential(m, s + 29, 1.0), 2);
      const auto pa = assemble_pauli(m, conn2, CliffordStructure::standard());
      const double e = smallest_eigenpairs(pa.pauli, 1, eig)[0].value;
      note(psd, std::min(psd.worst, e), e >= psd.threshold);
    }
  }
  if (psd.trials == 0) psd.worst = 0.0;
  if (kato.trials == 0) kato.worst = 0.0;
  return {herm, kato, gauge, ck, psd};
}

json to_json(const std::vector<InvariantTally>& tallies) {
  json arr = json::array();
  int failures = 0;
  for (const auto& t : tallies) {
    failures += t.failures;
    arr.push_back({{"name", t.name},
                   {"trials", t.trials},
                   {"failures", t.failures},
                   {"worst", t.worst},
                   {"threshold", t.threshold},
                   {"skipped", t.skipped}});
  }
  return {{"checks", arr}, {"total_failures", failures}};
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct Context {
  ExperimentConfig cfg;
  DiscreteManifold m;
  int y = -1;
  SparseHermitianOperator scalar;
  OutputSet* out = nullptr;
  std::ostream* log = nullptr;

  CertifyOptions certify_options() const {
    CertifyOptions o;
    o.window = cfg.window;
    o.spectral = cfg.spectral;
    o.semigroup = cfg.semigroup;
    o.time_grid = cfg.time_grid;
    o.seed = cfg.seed;
    return o;
  }

  std::vector<double> kappas() const {
    if (!cfg.kappa_grid.empty()) return cfg.kappa_grid;
    const auto [lo, hi] = cfg.window.kappa_range(m);
    if (!(lo < hi)) throw ConfigError("kappa_grid", "trust window is empty on this grid; give kappa_grid explicitly");
    std::vector<double> g;
    const double a = lo * (1 + 1e-9), b = hi * (1 - 1e-9);
    for (int i = 0; i < 6; ++i) g.push_back(a + (b - a) * i / 5.0);
    return g;
  }

  GreensField green() const { return green_via_solve(m, scalar, y, cfg.solve); }

  double lambda1() const { return spectral_gap(scalar, cfg.spectral); }

  GaussianBoundFit gaussian_fit() const {
    std::vector<double> times;
    for (double t = cfg.fit_t_min_h2 * m.h * m.h; t <= cfg.fit_t_max * (1 + 1e-12); t *= cfg.fit_t_ratio)
      times.push_back(t);
    if (times.empty()) throw ConfigError("fit", "empty time window");
    return fit_gaussian_bound(collect_heat_samples(m, scalar, y, times, cfg.fit_max_distance, cfg.semigroup));
  }

  double compute_C6(const GreensField& g) const {
    if (cfg.C6) return *cfg.C6;
    const auto table = kato_class_constant(m, scalar, g, cfg.r_grid, lambda1(), cfg.time_grid, cfg.semigroup);
    double c = 0.0;
    for (const auto& k : table) c = std::max(c, k.C_sqrt_r);
    *log << "C_kato " << c << '\n';
    return std::sqrt(2.0) * c * c;
  }

  std::vector<FieldSpec> fields_or(std::vector<FieldSpec> fallback) const {
    return cfg.fields.empty() ? fallback : cfg.fields;
  }
};

double loglog_slope(const std::vector<KatoSample>& t, double r_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& k : t) {
    if (k.r < r_min || !(k.C > 0.0)) continue;
    const double x = std::log(k.r), y = std::log(k.C);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool run_heat(Context& c) {
  bool ok = true;
  json rows = json::array();
  for (std::size_t i = 0; i < c.cfg.times.size(); ++i) {
    const double t = c.cfg.times[i];
    const auto col = heat_column(c.m, c.scalar, c.y, t, c.cfg.semigroup);
    std::ostringstream csv;
    write_heat_csv(c.m, col, csv);
    c.out->add("heat_t" + number(t) + ".csv", csv.str());
    const double mass = heat_mass(c.m, col);
    const double peak = *std::max_element(col.values.begin(), col.values.end());
    const double low = *std::min_element(col.values.begin(), col.values.end());
    const bool good = mass <= 1.0 + 10 * c.cfg.semigroup.tol && low >= -10 * c.cfg.semigroup.tol * peak;
    ok = ok && good;
    json row = {{"t", t}, {"mass", mass}, {"p_yy", col.values[c.y]}, {"min", low}, {"pass", good}};
    if (c.m.is_box()) row["euclidean_p_yy"] = std::pow(4 * std::numbers::pi * t, -1.5);
    rows.push_back(row);
  }
  c.out->add("heat_summary.json", dump({{"base_point", c.y}, {"rows", rows}, {"all_pass", ok}}));
  return ok;
}

bool run_green(Context& c) {
  const auto solve = c.green();
  const auto heat = green_via_heat(c.m, c.scalar, c.y, c.lambda1(), c.cfg.time_grid, c.cfg.semigroup);
  std::ostringstream csv;
  write_green_csv(c.m, heat, solve, csv);
  c.out->add("green.csv", csv.str());
  double mismatch = 0.0, vs_heat = 0.0, vs_solve = 0.0;
  int count = 0;
  const bool euclid = c.m.is_box() || c.m.spec.warp_profile == WarpProfile::Euclidean;
  for (int node : c.scalar.site_nodes()) {
    const double d = geodesic_distance(c.m, node, c.y);
    if (!(d > 2 * c.m.h * (1 + 1e-12)) || !(d < c.cfg.green_max_distance) || (!c.m.is_box() && c.m.mode_l(node)))
      continue;
    ++count;
    mismatch = std::max(mismatch, std::abs(heat.values[node] / solve.values[node] - 1.0));
    const double exact = 1.0 / (4 * std::numbers::pi * d);
    vs_heat = std::max(vs_heat, std::abs(heat.values[node] / exact - 1.0));
    vs_solve = std::max(vs_solve, std::abs(solve.values[node] / exact - 1.0));
  }
  const bool ok = count > 0 && mismatch <= c.cfg.green_agreement;
  json j = {{"base_point", c.y},
            {"region", {{"d_min_exclusive", 2 * c.m.h}, {"d_max_exclusive", c.cfg.green_max_distance}}},
            {"sites_compared", count},
            {"max_rel_heat_vs_solve", mismatch},
            {"heat_error_estimate", heat.error_estimate},
            {"agreement_tolerance", c.cfg.green_agreement},
            {"pass", ok}};
  if (euclid) {
    j["max_rel_heat_vs_euclidean"] = vs_heat;
    j["max_rel_solve_vs_euclidean"] = vs_solve;
  }
  c.out->add("green_summary.json", dump(j));
  return ok;
}

bool run_kato(Context& c) {
  const auto g = c.green();
  const auto table = kato_class_constant(c.m, c.scalar, g, c.cfg.r_grid, c.lambda1(), c.cfg.time_grid, c.cfg.semigroup);
  std::ostringstream csv;
  write_kato_csv(table, csv);
  c.out->add("kato.csv", csv.str());
  KatoSample best{0, 0, 0, -1};
  for (const auto& k : table)
    if (k.C_sqrt_r > best.C_sqrt_r) best = k;
  json j = {{"base_point", c.y},
            {"slope_r_ge_1", loglog_slope(table, 1.0)},
            {"C_kato", best.C_sqrt_r},
            {"C_kato_r", best.r},
            {"C_kato_attaining_node", best.attaining_node},
            {"C6", std::sqrt(2.0) * best.C_sqrt_r * best.C_sqrt_r}};
  for (const auto& k : table)
    if (k.r == 1.0) j["C_at_r1"] = k.C;
  c.out->add("kato_summary.json", dump(j));
  return true;
}

bool run_sobolev(Context& c) {
  const auto l = assemble_laplace_beltrami(c.m);
  c.out->add("sobolev.json", dump(to_json(sobolev_constant(c.m, l, c.y, c.cfg.sobolev))));
  return true;
}

SparseHermitianOperator sweep_operator(const Context& c) {
  if (c.cfg.op == OperatorChoice::Scalar) return c.scalar;
  const FieldSpec f = c.cfg.fields.empty() ? FieldSpec{} : c.cfg.fields.front();
  if (c.cfg.op == OperatorChoice::Magnetic) return assemble_bochner(c.m, build_connection(c.m, f, 1));
  return assemble_pauli(c.m, build_connection(c.m, f, 2), CliffordStructure::standard()).pauli;
}

bool run_sweep(Context& c) {
  const auto g = c.green();
  const auto p = sweep_operator(c);
  auto kappas = c.kappas();
  std::sort(kappas.begin(), kappas.end());
  std::ostringstream csv;
  csv.precision(12);
  csv << "kappa,E0,residual,trusted\n";
  json rows = json::array();
  std::vector<double> e;
  for (double k : kappas) {
    const auto gs = ground_state_energy(assemble_hamiltonian(p, g, {k, -1, std::nullopt}), c.cfg.spectral);
    const bool trusted = c.cfg.window.contains(c.m, k);
    csv << k << ',' << gs.E0 << ',' << gs.residual << ',' << (trusted ? 1 : 0) << '\n';
    rows.push_back({{"kappa", k}, {"E0", gs.E0}, {"residual", gs.residual}, {"trusted", trusted}});
    e.push_back(gs.E0);
  }
  bool monotone = true, concave = true;
  const double tol = 1e-6;
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i] > e[i - 1] + tol * std::max(1.0, std::abs(e[i]))) monotone = false;
    if (i + 1 < e.size()) {
      const double s0 = (e[i] - e[i - 1]) / (kappas[i] - kappas[i - 1]);
      const double s1 = (e[i + 1] - e[i]) / (kappas[i + 1] - kappas[i]);
      const double dk = std::min(kappas[i] - kappas[i - 1], kappas[i + 1] - kappas[i]);
      if (s1 > s0 + 2 * tol * std::max(1.0, std::abs(e[i])) / dk) concave = false;
    }
  }
  c.out->add("sweep.csv", csv.str());
  c.out->add("sweep.json", dump({{"operator", to_string(c.cfg.op)},
                                 {"base_point", c.y},
                                 {"rows", rows},
                                 {"monotone", monotone},
                                 {"concave", concave}}));
  return monotone && concave;
}

json fit_json(const GaussianBoundFit& f) {
  return {{"C1", f.C1},       {"C2", f.C2},         {"residual", f.residual},
          {"t_min", f.t_min}, {"t_max", f.t_max},   {"max_distance", f.max_distance},
          {"sample_count", f.sample_count}};
}

bool certify_scalar_at(Context& c, int y, const std::string& suffix) {
  c.y = y;
  const auto fit = c.gaussian_fit();
  const auto g = c.green();
  auto cert = certify_scalar(c.m, c.scalar, c.scalar, g, fit, c.cfg.r_grid, c.kappas(), c.certify_options());
  json j = to_json(cert);
  j["gaussian_fit"] = fit_json(fit);
  c.out->add("certificate" + suffix + ".json", dump(j));
  std::ostringstream e, k;
  write_energy_csv(cert, -1, e);
  write_kato_csv(cert.kato_table, k);
  c.out->add("energy" + suffix + ".csv", e.str());
  c.out->add("kato" + suffix + ".csv", k.str());
  *c.log << "certify-scalar y=" << y << " C6=" << cert.C6 << " fit_exponent=" << cert.fit_exponent
         << (cert.all_pass ? " pass" : " FAIL") << '\n';
  return cert.all_pass;
}

bool run_certify_scalar(Context& c) {
  bool ok = certify_scalar_at(c, c.y, "");
  if (!c.cfg.multi_y) return ok;
  // Five random interior base points within the inner half of the domain.
  std::vector<int> pool;
  const double half = c.m.is_box() ? c.m.spec.box_half_width : c.m.spec.r_max;
  for (int node : c.scalar.site_nodes())
    if (c.m.radius(node) <= 0.5 * half && (c.m.is_box() || c.m.mode_l(node) == 0) && node != c.y) pool.push_back(node);
  std::mt19937_64 rng(c.cfg.seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min<std::size_t>(pool.size(), 5));
  std::sort(pool.begin(), pool.end());
  for (int y : pool) ok = certify_scalar_at(c, y, "_y" + std::to_string(y)) && ok;
  return ok;
}

void write_field_tables(Context& c, const StabilityCertificate& cert, const std::string& prefix) {
  for (std::size_t f = 0; f < cert.field_labels.size(); ++f) {
    std::ostringstream e;
    write_energy_csv(cert, static_cast<int>(f), e);
    c.out->add(prefix + "_" + cert.field_labels[f] + ".csv", e.str());
  }
}

bool run_certify_magnetic(Context& c) {
  const auto g = c.green();
  const double C6 = c.compute_C6(g);
  std::vector<FieldSpec> fallback;
  for (int i = 1; i <= 5; ++i) fallback.push_back({"random_fourier", 0.0, c.cfg.seed + i, 1.0, 4, ""});
  std::vector<ConnectionData> conns;
  std::vector<std::string> labels;
  for (const auto& f : c.fields_or(fallback)) {
    conns.push_back(build_connection(c.m, f, 1));
    labels.push_back(field_label(f));
  }
  const auto cert = certify_magnetic(c.m, conns, labels, g, c.kappas(), C6, c.certify_options());
  c.out->add("certificate_magnetic.json", dump(to_json(cert)));
  write_field_tables(c, cert, "energy");
  *c.log << "certify-magnetic C6=" << C6 << (cert.all_pass ? " pass" : " FAIL") << '\n';
  return cert.all_pass;
}

bool run_certify_spin(Context& c) {
  const auto g = c.green();
  const double C6 = c.compute_C6(g);
  const double C4 =
      c.cfg.C4 ? *c.cfg.C4 : sobolev_constant(c.m, assemble_laplace_beltrami(c.m), c.y, c.cfg.sobolev).C4;
  std::vector<FieldSpec> fallback;
  for (double b : {0.5, 1.0, 2.0}) fallback.push_back({"constant_field", b, 0, 0.0, 4, ""});
  std::vector<PauliAssembly> assemblies;
  std::vector<std::string> labels;
  for (const auto& f : c.fields_or(fallback)) {
    assemblies.push_back(assemble_pauli(c.m, build_connection(c.m, f, 2), CliffordStructure::standard()));
    labels.push_back(field_label(f));
  }
  const auto cert = certify_spin(c.m, assemblies, labels, g, c.cfg.lambda, c.kappas(), C6, C4, c.certify_options());
  c.out->add("certificate_spin.json", dump(to_json(cert)));
  write_field_tables(c, cert, "energy");
  *c.log << "certify-spin C6=" << C6 << " C4=" << C4 << " kappa0=" << cert.kappa0
         << (cert.all_pass ? " pass" : " FAIL") << '\n';
  return cert.all_pass;
}

bool run_invariants(Context& c) {
  const auto t = check_invariants(c.m, c.cfg.trials, c.cfg.seed, c.cfg.spectral, c.cfg.semigroup);
  const json j = to_json(t);
  c.out->add("invariants.json", dump(j));
  for (const auto& x : t)
    *c.log << x.name << ": " << (x.skipped ? "skipped" : std::to_string(x.failures) + " failures / " +
                                                             std::to_string(x.trials)) << '\n';
  return j["total_failures"].get<int>() == 0;
}

}  // namespace

int run(const std::string& subcommand, const RunOptions& opts, std::ostream& log) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    log << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfig;
  }
  Context c;
  std::string raw;
  try {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot open " + opts.config_path);
    std::ostringstream s;
    s << in.rdbuf();
    raw = s.str();
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    c.cfg = parse_config(j);
    if (opts.seed) c.cfg.seed = *opts.seed;
    if (opts.threads < 0) throw ConfigError("--threads", "must be nonnegative");
    c.m = build_manifold(c.cfg.manifold);
    c.y = resolve_base_point(c.m, c.cfg);
    if (c.cfg.op != OperatorChoice::Scalar && !c.m.is_box())
      throw UnsupportedError("bundle-valued operators need a FlatBox backend");
  } catch (const ConfigError& e) {
    log << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SpecError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedError& e) {
    log << "unsupported configuration: " << e.what() << '\n';
    return kExitConfig;
  }
  if (opts.threads > 0) omp_set_num_threads(opts.threads);

  std::string dir = opts.out_dir.value_or(c.cfg.output_dir);
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env && *env ? env : "hydrolab_out";
  }
  OutputSet out(dir);
  c.out = &out;
  c.log = &log;
  const std::uint64_t config_hash = fnv1a(raw);
  out.add("config.json", dump(to_json(c.cfg)));

  int code = kExitOk;
  try {
    c.scalar = assemble_laplace_beltrami(c.m, c.cfg.closure);
    bool ok = true;
    if (subcommand == "heat") ok = run_heat(c);
    else if (subcommand == "green") ok = run_green(c);
    else if (subcommand == "kato") ok = run_kato(c);
    else if (subcommand == "sobolev") ok = run_sobolev(c);
    else if (subcommand == "sweep") ok = run_sweep(c);
    else if (subcommand == "certify-scalar") ok = run_certify_scalar(c);
    else if (subcommand == "certify-magnetic") ok = run_certify_magnetic(c);
    else if (subcommand == "certify-spin") ok = run_certify_spin(c);
    else ok = run_invariants(c);
    if (!ok) {
      log << subcommand << ": verdict failed\n";
      code = kExitVerdict;
    }
  } catch (const ConfigError& e) {
    log << "config error [" << e.key() << "]: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const SpecError& e) {
    log << "config error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const UnsupportedError& e) {
    log << "unsupported configuration: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what();
    if (e.best_residual() >= 0) log << " (best residual " << e.best_residual() << ")";
    log << '\n';
    code = kExitNumerical;
  } catch (const InvariantViolation& e) {
    log << "numerical failure: " << e.what() << '\n';
    code = kExitNumerical;
  }
  out.finish(subcommand, config_hash, c.cfg.seed, code);
  return code;
}

}  // namespace hydrolab
