#include <iostream>

#include <CLI11.hpp>

#include "hydrolab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete heat-kernel, Green's function and stability experiments"};
  app.require_subcommand(1, 1);
  hydrolab::RunOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  for (const auto& name : hydrolab::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out, std::string("output directory (default: config, then $") +
                                      hydrolab::kOutputDirEnv + ")");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", opts.threads, "OpenMP threads");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hydrolab::kExitConfig;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) opts.out_dir = out;
  if (sub->count("--seed")) opts.seed = seed;
  return hydrolab::run(sub->get_name(), opts, std::cerr);
}
