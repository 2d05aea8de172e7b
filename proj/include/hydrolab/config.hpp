#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrolab/bundles.hpp"
#include "hydrolab/error.hpp"
#include "hydrolab/geometry.hpp"
#include "hydrolab/heat_green.hpp"
#include "hydrolab/spectral.hpp"
#include "hydrolab/stability.hpp"

namespace hydrolab {

// Malformed configuration; key() names the offending entry.
class ConfigError : public SpecError {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : SpecError("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class OperatorChoice { Scalar, Magnetic, Pauli };

// One connection to test. type: zero | constant_field | random_fourier | pure_gauge.
struct FieldSpec {
  std::string type = "zero";
  double b = 0.0;
  std::uint64_t seed = 0;
  double amplitude = 1.0;
  int modes = 4;
  std::string label;
};

struct ExperimentConfig {
  MetricSpec manifold;
  OperatorChoice op = OperatorChoice::Scalar;
  BoundaryClosure closure = BoundaryClosure::Exterior;
  std::vector<FieldSpec> fields;
  int y = -1;  // -1: "center"
  bool multi_y = false;
  std::vector<double> kappa_grid;
  double lambda = 1.0;
  std::vector<double> r_grid{0.5, 1, 2, 4, 8, 16, 32, 64};
  std::vector<double> times{0.1};

  SpectralOptions spectral;
  SemigroupOptions semigroup;
  SolveOptions solve;
  TimeGridSpec time_grid;

  // Heat-kernel samples for the Gaussian fit: t from t_min_h2 * h^2 to t_max
  // (ratio t_ratio), sites with d <= max_distance.
  double fit_t_min_h2 = 4.0;
  double fit_t_max = 2.0;
  double fit_t_ratio = 1.5;
  double fit_max_distance = 1.0;

  // Green comparison region 2h < d < green_max_distance and its tolerance.
  double green_max_distance = 2.0;
  double green_agreement = 0.02;

  TrustWindow window;
  std::optional<double> C6;
  std::optional<double> C4;
  SobolevOptions sobolev;

  int trials = 100;
  std::vector<double> smoothing_times{0.0, 0.25, 0.5, 1.0, 2.0};

  std::uint64_t seed = 0;
  std::string output_dir;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

std::string to_string(OperatorChoice op);

// "center" or an explicit node.
int resolve_base_point(const DiscreteManifold& m, const ExperimentConfig& c);

ConnectionData build_connection(const DiscreteManifold& m, const FieldSpec& f, int rank);
std::string field_label(const FieldSpec& f);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace hydrolab
