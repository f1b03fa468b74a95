#pragma once

// Uniformly sampled evolution of a StatePair. Samples sit at
// time0 + i*sample_dt exactly; a run that halts early (blow-up detection)
// keeps its last finite sub-sample state in final_state so the uniform
// spacing of `samples` is never broken.

#include <limits>
#include <optional>
#include <vector>

#include "dwlab/field.hpp"

namespace dwlab {

struct Trajectory {
  GridSpec grid;
  double sample_dt = 0.0;
  double lambda = 0.0;  // nonlinearity coupling of the run that produced it
  std::vector<StatePair> samples;
  bool blowup = false;
  double blowup_time_estimate = std::numeric_limits<double>::quiet_NaN();
  std::optional<StatePair> final_state;

  explicit Trajectory(const GridSpec& g) : grid(g) {}
};

}  // namespace dwlab
