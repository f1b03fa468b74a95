// Scripted numerical experiments with reproducible artifacts.
//
// Each experiment kind reads its parameters from a Config (every key has a
// default, so an empty config runs the reference setup), writes its artifacts
// into an output directory, and self-checks its results:
//
//   manifest.txt   kind, content hash, valid time horizon, then `---` and the
//                  fully resolved configuration (sorted key = value lines,
//                  defaults included). The hash is the git-blob SHA-1 of the
//                  text after the `---` line.
//   summary.txt    one "[PASS] ..." / "[FAIL] ..." line per assertion with the
//                  measured numbers, then "RESULT: PASS" or "RESULT: FAIL".
//   *.csv          the kind's data products, written incrementally so a run
//                  that dies mid-flight still leaves the rows computed so far.
//
// All randomness flows through CounterRng below, so a (kind, config, seed)
// triple reproduces its artifacts byte for byte.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dwlab/config.hpp"

namespace dwlab {

// Deterministic counter-based generator. There is no mutable state: draw i is
// a pure function of (seed, stream, i), so parallel consumers can index draws
// however they like without coordinating.
//
//   base    = mix(seed * 0xBF58476D1CE4E5B9 + 0x94D049BB133111EB)
//           ^ mix(stream * 0x2545F4914F6CDD1D + 0x9E3779B97F4A7C15)
//   word(i) = mix(base + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix is the 64-bit finalizer z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
// z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t word(std::uint64_t i) const;

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t i) const;

  // Standard normal via Box-Muller; draw i consumes counters 2i and 2i+1.
  double gaussian(std::uint64_t i) const;

 private:
  std::uint64_t base_;
};

struct ExperimentResult {
  bool passed = false;
  int exit_code = 0;    // 0 all assertions hold, 2 otherwise
  std::string summary;  // contents of summary.txt
};

// Names of all experiment kinds, sorted.
const std::vector<std::string>& experiment_kinds();
bool known_kind(const std::string& kind);

// Run one experiment into out_dir (created if missing). Configuration
// problems - unknown kind, kind mismatch, malformed or unknown keys, values
// out of range, a requested fit window beyond the valid horizon - throw
// ConfigError before any data product is written. Runtime failures after
// validation never throw: they are reported as failed assertions (exit code 2)
// and the CSV rows produced so far stay on disk.
ExperimentResult run_experiment(const std::string& kind, Config cfg,
                                const std::string& out_dir);

}  // namespace dwlab
