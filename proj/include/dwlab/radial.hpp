#pragma once

// Continuum radial evaluator on R^3 for decay-rate experiments. A periodic
// box cannot show algebraic decay (its zero mode tends to a constant), so
// these routines work with the genuine continuous spectrum instead: the 3-D
// radial Fourier transform collapses to a 1-D sine transform,
//   F(k) = sqrt(2/pi) (1/k) int_0^inf r f(r) sin(kr) dr,
// the mode symbol is applied under the k-integral, and the solution is
// rebuilt the same way.

#include <functional>
#include <vector>

#include "dwlab/propagator.hpp"

namespace dwlab {

// Radial function sampled on a log-uniform grid r in (0, r_max]. The tail
// must have dropped below 1e-10 (relative to the peak) at r_max before the
// transform pipeline will accept it.
struct RadialProfile {
  std::vector<double> r;  // ascending, log-uniform
  std::vector<double> f;  // profile values f(r_i)
};

// Samples fn on n log-uniform radii spanning [r_max * span_frac, r_max].
RadialProfile make_radial_profile(const std::function<double(double)>& fn,
                                  double r_max, int n = 4096,
                                  double span_frac = 1e-4);

// Evolves the profile under the given mode symbol (D, dtD or Heat only) and
// returns the L^p(R^3) norm of the solution at time t, p in {1, 2, 4, inf}.
// The k-range adapts to where the transform falls below 1e-13 of its peak,
// and the output radius grows with t so spreading mass is not truncated.
double radial_norm_d3(const RadialProfile& profile, SymbolKind kind, double t,
                      double p);

}  // namespace dwlab
