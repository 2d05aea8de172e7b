#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrolab/config.hpp"

namespace hydrolab {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitVerdict = 3, kExitNumerical = 4 };

// Environment variable read for the default output directory.
inline constexpr const char* kOutputDirEnv = "HYDROLAB_OUT";

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: OpenMP default
};

const std::vector<std::string>& subcommands();

// Runs one pipeline and writes its artifacts plus manifest.json. Errors are
// reported on `log` and mapped to the exit codes above.
int run(const std::string& subcommand, const RunOptions& opts, std::ostream& log);

// Collects output files and writes each atomically (temp file + rename) in
// the order they are added. finish() appends manifest.json.
class OutputSet {
 public:
  explicit OutputSet(std::string dir);
  void add(const std::string& name, const std::string& content);
  void finish(const std::string& subcommand, std::uint64_t config_hash, std::uint64_t seed, int exit_code);
  const std::string& dir() const { return dir_; }

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::uint64_t hash;
  };
  std::string dir_;
  std::vector<Entry> files_;
};

struct InvariantTally {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;      // largest residual (or smallest margin) seen
  double threshold = 0.0;
  bool skipped = false;    // not applicable on this backend
};

// Seeded trials of the exact discrete invariants: weighted Hermiticity,
// Kato inequality, gauge-invariant spectra, Chapman-Kolmogorov and
// positivity of the Dirac square. Bundle checks are skipped on warped grids.
std::vector<InvariantTally> check_invariants(const DiscreteManifold& m, int trials, std::uint64_t seed,
                                             const SpectralOptions& spectral = {},
                                             const SemigroupOptions& semigroup = {});
nlohmann::json to_json(const std::vector<InvariantTally>& t);

}  // namespace hydrolab
