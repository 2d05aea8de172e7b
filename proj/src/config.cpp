#include "hydrolab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hydrolab/random_fields.hpp"

namespace hydrolab {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where, "object expected");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

std::string join(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

template <class T>
void read(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join(where, key), std::string("wrong type (") + e.what() + ")");
  }
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}

std::vector<double> read_grid(const json& j, const std::string& key) {
  std::vector<double> g;
  if (j.is_array()) {
    try {
      g = j.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError(key, "array of numbers expected");
    }
  } else if (j.is_object()) {
    only_keys(j, key, {"from", "to", "count"});
    double a = 0, b = 0;
    int n = 0;
    read(j, key, "from", a);
    read(j, key, "to", b);
    read(j, key, "count", n);
    if (n < 1) throw ConfigError(key + ".count", "must be at least 1");
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    throw ConfigError(key, "array or {from, to, count} expected");
  }
  if (g.empty()) throw ConfigError(key, "grid must be nonempty");
  return g;
}

FieldSpec parse_field(const json& j, const std::string& where) {
  only_keys(j, where, {"type", "b", "seed", "amplitude", "modes", "label"});
  FieldSpec f;
  read(j, where, "type", f.type);
  read(j, where, "b", f.b);
  read(j, where, "seed", f.seed);
  read(j, where, "amplitude", f.amplitude);
  read(j, where, "modes", f.modes);
  read(j, where, "label", f.label);
  if (f.type != "zero" && f.type != "constant_field" && f.type != "random_fourier" && f.type != "pure_gauge")
    throw ConfigError(where + ".type", "expected zero | constant_field | random_fourier | pure_gauge");
  if (f.modes < 1) throw ConfigError(where + ".modes", "must be at least 1");
  if (!(f.amplitude >= 0.0)) throw ConfigError(where + ".amplitude", "must be nonnegative");
  return f;
}

MetricSpec parse_manifold(const json& j) {
  only_keys(j, "manifold",
            {"kind", "half_width", "n", "periodic", "warp_profile", "r_max", "radial_points", "lmax", "tabulated_warp"});
  MetricSpec s;
  std::string kind = to_string(s.kind), warp = to_string(s.warp_profile);
  read(j, "manifold", "kind", kind);
  read(j, "manifold", "half_width", s.box_half_width);
  read(j, "manifold", "n", s.grid_points_per_axis);
  read(j, "manifold", "periodic", s.periodic);
  read(j, "manifold", "warp_profile", warp);
  read(j, "manifold", "r_max", s.r_max);
  read(j, "manifold", "radial_points", s.radial_points);
  read(j, "manifold", "lmax", s.angular_mode_cutoff);
  read(j, "manifold", "tabulated_warp", s.tabulated_warp);
  try {
    s.kind = manifold_kind_from_string(kind);
  } catch (const SpecError& e) {
    throw ConfigError("manifold.kind", e.what());
  }
  try {
    s.warp_profile = warp_profile_from_string(warp);
  } catch (const SpecError& e) {
    throw ConfigError("manifold.warp_profile", e.what());
  }
  try {
    s.validate();
  } catch (const SpecError& e) {
    throw ConfigError("manifold", e.what());
  }
  return s;
}

}  // namespace

std::string to_string(OperatorChoice op) {
  switch (op) {
    case OperatorChoice::Scalar: return "scalar";
    case OperatorChoice::Magnetic: return "magnetic";
    case OperatorChoice::Pauli: return "pauli";
  }
  return "scalar";
}

ExperimentConfig parse_config(const json& j) {
  only_keys(j, "",
            {"manifold", "operator", "closure", "beta", "fields", "y", "multi_y", "kappa_grid", "lambda", "r_grid",
             "times", "tolerances", "fit", "green", "trust_window", "C6", "C4", "sobolev", "trials",
             "smoothing_times", "seed", "output_dir"});
  ExperimentConfig c;
  if (j.contains("manifold")) c.manifold = parse_manifold(j.at("manifold"));

  std::string op = "scalar";
  read(j, "", "operator", op);
  if (op == "scalar") c.op = OperatorChoice::Scalar;
  else if (op == "magnetic") c.op = OperatorChoice::Magnetic;
  else if (op == "pauli") c.op = OperatorChoice::Pauli;
  else throw ConfigError("operator", "expected scalar | magnetic | pauli");

  std::string closure = "exterior";
  read(j, "", "closure", closure);
  if (closure == "exterior") c.closure = BoundaryClosure::Exterior;
  else if (closure == "dirichlet") c.closure = BoundaryClosure::Dirichlet;
  else throw ConfigError("closure", "expected exterior | dirichlet");

  if (j.contains("beta") && j.contains("fields")) throw ConfigError("beta", "give either beta or fields, not both");
  if (j.contains("beta")) c.fields.push_back(parse_field(j.at("beta"), "beta"));
  if (j.contains("fields")) {
    const auto& arr = j.at("fields");
    if (!arr.is_array() || arr.empty()) throw ConfigError("fields", "nonempty array expected");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.fields.push_back(parse_field(arr[i], "fields[" + std::to_string(i) + "]"));
  }

  if (j.contains("y")) {
    const auto& y = j.at("y");
    if (y.is_string()) {
      if (y.get<std::string>() != "center") throw ConfigError("y", "expected \"center\" or a node index");
    } else if (y.is_number_integer()) {
      c.y = y.get<int>();
      if (c.y < 0) throw ConfigError("y", "node index must be nonnegative");
    } else {
      throw ConfigError("y", "expected \"center\" or a node index");
    }
  }
  read(j, "", "multi_y", c.multi_y);
  if (j.contains("kappa_grid")) c.kappa_grid = read_grid(j.at("kappa_grid"), "kappa_grid");
  for (double k : c.kappa_grid)
    if (!(k >= 0.0)) throw ConfigError("kappa_grid", "entries must be nonnegative");
  read(j, "", "lambda", c.lambda);
  positive(c.lambda, "lambda");
  if (j.contains("r_grid")) c.r_grid = read_grid(j.at("r_grid"), "r_grid");
  for (double r : c.r_grid) positive(r, "r_grid");
  if (j.contains("times")) c.times = read_grid(j.at("times"), "times");
  for (double t : c.times) positive(t, "times");

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    only_keys(t, "tolerances",
              {"eigen", "max_iterations", "basis_size", "semigroup", "semigroup_basis", "solve", "solve_iterations",
               "tail", "time_ratio", "t_min"});
    read(t, "tolerances", "eigen", c.spectral.tol);
    read(t, "tolerances", "max_iterations", c.spectral.max_iterations);
    read(t, "tolerances", "basis_size", c.spectral.basis_size);
    read(t, "tolerances", "semigroup", c.semigroup.tol);
    read(t, "tolerances", "semigroup_basis", c.semigroup.max_basis);
    read(t, "tolerances", "solve", c.solve.tol);
    read(t, "tolerances", "solve_iterations", c.solve.max_iterations);
    read(t, "tolerances", "tail", c.time_grid.tail_tolerance);
    read(t, "tolerances", "time_ratio", c.time_grid.ratio);
    read(t, "tolerances", "t_min", c.time_grid.t_min);
    positive(c.spectral.tol, "tolerances.eigen");
    positive(c.semigroup.tol, "tolerances.semigroup");
    positive(c.solve.tol, "tolerances.solve");
    positive(c.time_grid.tail_tolerance, "tolerances.tail");
    if (c.spectral.max_iterations < 1) throw ConfigError("tolerances.max_iterations", "must be positive");
    if (c.solve.max_iterations < 1) throw ConfigError("tolerances.solve_iterations", "must be positive");
    if (c.semigroup.max_basis < 2) throw ConfigError("tolerances.semigroup_basis", "must be at least 2");
    if (!(c.time_grid.ratio > 1.0)) throw ConfigError("tolerances.time_ratio", "must exceed 1");
    if (c.time_grid.t_min < 0.0) throw ConfigError("tolerances.t_min", "must be nonnegative");
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    only_keys(f, "fit", {"t_min_h2", "t_max", "t_ratio", "max_distance"});
    read(f, "fit", "t_min_h2", c.fit_t_min_h2);
    read(f, "fit", "t_max", c.fit_t_max);
    read(f, "fit", "t_ratio", c.fit_t_ratio);
    read(f, "fit", "max_distance", c.fit_max_distance);
    positive(c.fit_t_min_h2, "fit.t_min_h2");
    positive(c.fit_t_max, "fit.t_max");
    positive(c.fit_max_distance, "fit.max_distance");
    if (!(c.fit_t_ratio > 1.0)) throw ConfigError("fit.t_ratio", "must exceed 1");
  }
  if (j.contains("green")) {
    const auto& g = j.at("green");
    only_keys(g, "green", {"max_distance", "agreement"});
    read(g, "green", "max_distance", c.green_max_distance);
    read(g, "green", "agreement", c.green_agreement);
    positive(c.green_max_distance, "green.max_distance");
    positive(c.green_agreement, "green.agreement");
  }
  if (j.contains("trust_window")) {
    const auto& w = j.at("trust_window");
    only_keys(w, "trust_window", {"min_spacings", "containment"});
    read(w, "trust_window", "min_spacings", c.window.min_spacings);
    read(w, "trust_window", "containment", c.window.containment);
    positive(c.window.min_spacings, "trust_window.min_spacings");
    positive(c.window.containment, "trust_window.containment");
  }
  if (j.contains("C6")) {
    c.C6 = 0.0;
    read(j, "", "C6", *c.C6);
    positive(*c.C6, "C6");
  }
  if (j.contains("C4")) {
    c.C4 = 0.0;
    read(j, "", "C4", *c.C4);
    positive(*c.C4, "C4");
  }
  if (j.contains("sobolev")) {
    const auto& s = j.at("sobolev");
    only_keys(s, "sobolev", {"scale_fractions", "eigenfunctions", "safety"});
    if (s.contains("scale_fractions")) c.sobolev.scale_fractions = read_grid(s.at("scale_fractions"), "sobolev.scale_fractions");
    for (double f : c.sobolev.scale_fractions) positive(f, "sobolev.scale_fractions");
    read(s, "sobolev", "eigenfunctions", c.sobolev.eigenfunctions);
    read(s, "sobolev", "safety", c.sobolev.safety);
    if (c.sobolev.eigenfunctions < 0) throw ConfigError("sobolev.eigenfunctions", "must be nonnegative");
    positive(c.sobolev.safety, "sobolev.safety");
  }
  read(j, "", "trials", c.trials);
  if (c.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (j.contains("smoothing_times")) c.smoothing_times = read_grid(j.at("smoothing_times"), "smoothing_times");
  for (double t : c.smoothing_times)
    if (!(t >= 0.0)) throw ConfigError("smoothing_times", "entries must be nonnegative");
  read(j, "", "seed", c.seed);
  read(j, "", "output_dir", c.output_dir);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json m = {{"kind", to_string(c.manifold.kind)},
            {"half_width", c.manifold.box_half_width},
            {"n", c.manifold.grid_points_per_axis},
            {"periodic", c.manifold.periodic},
            {"warp_profile", to_string(c.manifold.warp_profile)},
            {"r_max", c.manifold.r_max},
            {"radial_points", c.manifold.radial_points},
            {"lmax", c.manifold.angular_mode_cutoff}};
  if (!c.manifold.tabulated_warp.empty()) m["tabulated_warp"] = c.manifold.tabulated_warp;
  json fields = json::array();
  for (const auto& f : c.fields)
    fields.push_back({{"type", f.type}, {"b", f.b}, {"seed", f.seed}, {"amplitude", f.amplitude}, {"modes", f.modes},
                      {"label", field_label(f)}});
  json j = {{"manifold", m},
            {"operator", to_string(c.op)},
            {"closure", c.closure == BoundaryClosure::Exterior ? "exterior" : "dirichlet"},
            {"y", c.y < 0 ? json("center") : json(c.y)},
            {"multi_y", c.multi_y},
            {"kappa_grid", c.kappa_grid},
            {"lambda", c.lambda},
            {"r_grid", c.r_grid},
            {"times", c.times},
            {"tolerances",
             {{"eigen", c.spectral.tol},
              {"max_iterations", c.spectral.max_iterations},
              {"basis_size", c.spectral.basis_size},
              {"semigroup", c.semigroup.tol},
              {"semigroup_basis", c.semigroup.max_basis},
              {"solve", c.solve.tol},
              {"solve_iterations", c.solve.max_iterations},
              {"tail", c.time_grid.tail_tolerance},
              {"time_ratio", c.time_grid.ratio},
              {"t_min", c.time_grid.t_min}}},
            {"fit",
             {{"t_min_h2", c.fit_t_min_h2},
              {"t_max", c.fit_t_max},
              {"t_ratio", c.fit_t_ratio},
              {"max_distance", c.fit_max_distance}}},
            {"green", {{"max_distance", c.green_max_distance}, {"agreement", c.green_agreement}}},
            {"trust_window", {{"min_spacings", c.window.min_spacings}, {"containment", c.window.containment}}},
            {"sobolev",
             {{"scale_fractions", c.sobolev.scale_fractions},
              {"eigenfunctions", c.sobolev.eigenfunctions},
              {"safety", c.sobolev.safety}}},
            {"trials", c.trials},
            {"smoothing_times", c.smoothing_times},
            {"seed", c.seed}};
  if (!fields.empty()) j["fields"] = fields;
  if (c.C6) j["C6"] = *c.C6;
  if (c.C4) j["C4"] = *c.C4;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  return j;
}

int resolve_base_point(const DiscreteManifold& m, const ExperimentConfig& c) {
  const int y = c.y < 0 ? m.center_node() : c.y;
  if (static_cast<std::size_t>(y) >= m.node_count()) throw ConfigError("y", "node index out of range");
  if (m.boundary_mask[y]) throw ConfigError("y", "base point lies on the boundary");
  if (!m.is_box() && m.mode_l(y) != 0) throw ConfigError("y", "warped base point must be an l = 0 node");
  return y;
}

ConnectionData build_connection(const DiscreteManifold& m, const FieldSpec& f, int rank) {
  if (f.type == "zero") return connection_from_potential(m, std::vector<OneForm>(m.node_count(), OneForm{}), rank);
  if (f.type == "constant_field") return connection_from_potential(m, constant_field_potential(m, f.b), rank);
  if (f.type == "random_fourier")
    return connection_from_potential(m, random_fourier_potential(m, f.seed, f.amplitude, f.modes), rank);
  auto flat = connection_from_potential(m, std::vector<OneForm>(m.node_count(), OneForm{}), rank);
  return gauge_transform(flat, m, random_gauge_function(m, f.seed, f.amplitude, f.modes));
}

std::string field_label(const FieldSpec& f) {
  if (!f.label.empty()) return f.label;
  std::ostringstream s;
  if (f.type == "zero") s << "zero";
  else if (f.type == "constant_field") s << "b" << f.b;
  else s << f.type << "_seed" << f.seed;
  return s.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace hydrolab
