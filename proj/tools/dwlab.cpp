// dwlab: run one scripted experiment and report its pass/fail summary.
//
//   dwlab <kind> [--config <path>] [--out <dir>] [--seed <u64>]
//
// Exit codes: 0 every assertion passed, 2 an assertion failed (artifacts are
// still written), 1 usage or validation error (nothing is written).

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "dwlab/config.hpp"
#include "dwlab/experiments.hpp"

int main(int argc, char** argv) {
  std::string kinds_help;
  for (const auto& k : dwlab::experiment_kinds()) {
    if (!kinds_help.empty()) kinds_help += ", ";
    kinds_help += k;
  }

  CLI::App app{
      "dwlab: reproducible numerical experiments on the damped "
      "energy-critical wave flow"};
  std::string kind, config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("kind", kind, "experiment kind (" + kinds_help + ")")
      ->required();
  app.add_option("--config", config_path,
                 "flat `key = value` configuration file (# comments)");
  app.add_option("--out", out_dir, "output directory [dwlab-out/<kind>]");
  app.add_option("--seed", seed, "RNG seed, overrides the config's `seed`");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0; usage errors exit 1
  }

  if (!dwlab::known_kind(kind)) {
    std::fprintf(stderr, "error: unknown experiment kind `%s`; known kinds: %s\n",
                 kind.c_str(), kinds_help.c_str());
    return 1;
  }

  try {
    dwlab::Config cfg;
    if (!config_path.empty()) {
      cfg = dwlab::Config::load(config_path);
      if (!cfg.has("kind")) {
        std::fprintf(stderr,
                     "config error: %s: missing required field: kind\n",
                     config_path.c_str());
        return 1;
      }
    }
    if (app.count("--seed") > 0) cfg.set("seed", std::to_string(seed));
    if (out_dir.empty()) out_dir = "dwlab-out/" + kind;

    const dwlab::ExperimentResult res =
        dwlab::run_experiment(kind, std::move(cfg), out_dir);
    std::fputs(res.summary.c_str(), stdout);
    std::printf("artifacts: %s\n", out_dir.c_str());
    return res.exit_code;
  } catch (const dwlab::ConfigError& e) {
    if (e.field.empty())
      std::fprintf(stderr, "config error: %s\n", e.what());
    else
      std::fprintf(stderr, "config error (field `%s`): %s\n", e.field.c_str(),
                   e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
