#pragma once

// Energy-critical damped wave dynamics on the periodic box:
//
//   u_tt - Laplacian u + u_t = lambda |u|^{4/(d-2)} u,   lambda in {+1, -1, 0},
//
// with the functional algebra used to classify data against the ground state
//
//   W(x) = (1 + |x|^2 / (d(d-2)))^{-(d-2)/2},   mu(d) = ||grad W||^2 / d,
//
// a time stepper (exact linear part + trapezoid Duhamel, second order), a
// fixed-point (Picard) small-data solver, and the monitor series extracted
// from a trajectory.
//
// Sign conventions: the classification functionals E, J, K below use the
// focusing form (potential term entering with a minus sign).  The energy that
// the flow actually dissipates carries the coupling,
//   E_lambda = 1/2 ||grad u||^2 + 1/2 ||u_t||^2
//              - lambda (d-2)/(2d) ||u||^{2d/(d-2)}_{L^{2d/(d-2)}},
// and satisfies dE_lambda/dt = -||u_t||^2 along exact solutions; the monitor
// series reports E_lambda in its energy column so the dissipation identity is
// checkable for every coupling.  For lambda = +1 the two coincide.

#include <iosfwd>
#include <string>
#include <vector>

#include "dwlab/field.hpp"
#include "dwlab/radial.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab {

// --- pointwise nonlinearity -------------------------------------------------

// lambda |u|^{4/(d-2)} u, evaluated pointwise. d in {3,4,5}; lambda in
// {+1,-1,0}; anything else throws std::invalid_argument.
Field nonlinearity(const Field& u, int d, double lambda);

// --- functional algebra -----------------------------------------------------

struct FunctionalValues {
  double E = 0.0;       // 1/2 ||grad u||^2 + 1/2 ||v||^2 - (d-2)/(2d) ||u||_p^p
  double J = 0.0;       // 1/2 ||grad u||^2 - (d-2)/(2d) ||u||_p^p
  double K = 0.0;       // ||grad u||^2 - ||u||_p^p
  double H = 0.0;       // (1/d) ||grad u||^2  (== J - (d-2)/(2d) K)
  double I = 0.0;       // 1/2 ||u||_2^2
  double Iprime = 0.0;  // Re <u, v>_{L^2}
};

// All six functionals of a state, p = 2d/(d-2). ||grad u||^2 is the exact
// spectral sum. H is computed independently as (1/d)||grad u||^2 and
// cross-checked against J - (d-2)/(2d) K to 1e-10 (1 + |J|); disagreement on
// finite inputs throws std::logic_error.
FunctionalValues functionals(const StatePair& s, int d);

// --- ground state -----------------------------------------------------------

// W sampled on the grid (d = grid.d must be 3: the box is at most
// 3-dimensional). The profile decays only algebraically, so truncation at the
// box boundary always clips a portion of ||grad W||^2; the clipped fraction is
// written to *tail_fraction when given, and a warning is printed to stderr
// when it exceeds 1e-4 (on any practical box it does).
Field talenti_grid(const GridSpec& g, double* tail_fraction = nullptr);

// W as a radial profile (log-uniform in r), d in {3,4,5}. Note the algebraic
// tail: this profile does not satisfy the decay precondition of
// radial_norm_d3 for any reachable r_max.
RadialProfile talenti_radial(int d, double r_max, int n = 4096);

// mu(d) = (1/d) ||grad W||^2_{L^2(R^d)} by radial quadrature with Richardson
// extrapolation to relative tolerance 1e-8; cached per dimension.
double mu(int d);

// --- variational classification ---------------------------------------------

enum class SetClass { InB, InG, Neither };

struct Classification {
  SetClass cls = SetClass::Neither;
  std::string reason;   // which condition failed, for Neither
  double E = 0.0;       // measured values backing the verdict
  double K = 0.0;
  double mu = 0.0;
};

// B: E < mu and K < 0 (blow-up set). G: E < mu and K >= 0 (global set).
// States with |E - mu| < 1e-6 are never classified (Neither, "within mu
// tolerance"): the verdict would hinge on quadrature error.
Classification classify(const StatePair& s, int d);

// --- time integration -------------------------------------------------------

struct IntegrateOpts {
  double blowup_threshold = 1e6;  // halt when ||u||_inf exceeds this
  double sample_dt = 0.0;         // <= 0: pick ~T/400, snapped to a step multiple
};

// March the state from s0 to time s0.time + T with requested step dt.
// Preconditions: T > 0, dt > 0, and dt resolves the fastest retained mode
// (dt * |xi|_max <= 0.5), else std::invalid_argument.
//
// Steps are exact on the linear flow (cached per-mode matrices) with a
// two-stage trapezoid Duhamel correction for the nonlinearity; the step
// shrinks below dt when the amplitude term sqrt(|xi|_max^2 + ||u||_inf^{4/(d-2)})
// demands it. Halts with the blow-up flag set when ||u||_inf exceeds the
// threshold, when the adjusted substep underflows 1e-12, or when any
// coefficient goes NaN/Inf (keeping the last finite state); the blow-up time
// estimate extrapolates ||u||_inf^{-2/(d-2)} linearly to zero. Data that does
// not vanish at the box boundary earns a wrap-around warning on stderr.
Trajectory integrate_nldw(const StatePair& s0, double T, double dt, double lambda,
                          const IntegrateOpts& opts = {});

// --- small-data fixed point -------------------------------------------------

struct PicardOpts {
  double tol = 1e-8;    // successive-iterate distance declaring convergence
  int max_iter = 25;
  double delta = 0.3;   // admissible free-evolution L^{2(d+1)/(d-2)}_{t,x} size
  double dt = 0.0;      // time grid for the Duhamel quadrature; <= 0: T/64
};

struct PicardResult {
  Trajectory traj;
  std::vector<double> distances;    // successive-iterate gaps, one per sweep
  std::vector<double> contraction;  // gap ratios (empty first sweep)
  int iterations = 0;
  double free_norm = 0.0;           // measured size of the free part
};

// Fixed-point solve of the Duhamel equation on [0, T] by Picard iteration
// from the free evolution, trapezoid quadrature in time with lag-indexed
// propagator tables. The measured free-evolution norm must come in under
// opts.delta (std::domain_error otherwise: shrink T or the data). Iterates
// are compared in the diagonal Strichartz norm plus the half-derivative
// companion; three consecutive non-contracting sweeps abort with
// std::runtime_error advising a smaller T or smaller data.
PicardResult picard_solve(const StatePair& s0, double T, double lambda,
                          const PicardOpts& opts = {});

// --- monitors ----------------------------------------------------------------

struct MonitorSeries {
  std::vector<double> t;
  std::vector<double> E;       // E_lambda (dissipated energy; see header note)
  std::vector<double> J, K, H, I, Iprime;
  std::vector<double> F;       // I' + (1 + d/(d-2)) (E - mu)
  std::vector<double> ratio;   // (E - mu) / I^{(d-1)/(d-2)}  (NaN when I = 0)
  std::vector<double> S1;      // running L^{2(d+1)/(d-2)}_{t,x} of u
  std::vector<double> S2;      // running L^{2(d+1)/(d-1)}_{t,x} of <nabla>^{1/2} u
  bool blowup = false;
  double blowup_time_estimate = std::numeric_limits<double>::quiet_NaN();

  // The exact flow dissipates E, so a sample where E jumps up (beyond the
  // second-order step slack) marks the point where the integrator stopped
  // tracking a solution - this happens in the last moments before a blow-up
  // halt. All recorded checks below are evaluated on samples [0, trusted_until].
  std::size_t trusted_until = 0;

  // recorded checks
  double dissipation_residual = 0.0;  // |E(t_w) - E(0) + int ||u_t||^2 dt|
  double drive_margin_min = 0.0;      // min of I'' + I' - (1 + d/(d-2)) ||u_t||^2
  double F_onset = std::numeric_limits<double>::quiet_NaN();      // F > 0 from here on
  double ratio_onset = std::numeric_limits<double>::quiet_NaN();  // ratio non-increasing from here on
};

// Evaluate the monitor series of a trajectory. I'' is a centered finite
// difference of I'; the running Strichartz accumulators use the same
// trapezoid rule as norm_spacetime, so they are non-decreasing sample by
// sample. Needs at least two samples.
MonitorSeries monitor_series(const Trajectory& traj, int d);

// CSV with fixed column order
//   t,E,J,K,H,I,Iprime,F,ratio,S1,S2,blowup_flag
// one row per sample, %.17g, '\n' line ends, no timestamps.
void write_monitor_csv(std::ostream& out, const MonitorSeries& m);

}  // namespace dwlab
