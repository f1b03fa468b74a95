#pragma once

// Exact per-mode solution operators for the damped wave equation
//   u_tt - Lap u + u_t = 0,
// whose Fourier modes obey v'' + v' + rho^2 v = 0 with rho = |xi|.
//
// With mu = 1/4 - rho^2 the mode kernel is
//   L(t, rho) = sinh(t sqrt(mu))/sqrt(mu)   (mu > 0)
//             = sin(t sqrt(-mu))/sqrt(-mu)  (mu < 0),
// an entire function of mu; near mu = 0 both forms are evaluated by the
// series sum_k mu^k t^{2k+1}/(2k+1)! to dodge the cancellation at rho = 1/2.
// The damped kernel s(t) = e^{-t/2} L(t, rho) solves the mode equation with
// s(0) = 0, s'(0) = 1, and the state matrix is
//   A(t) = [[s + s', s], [-rho^2 s, s']]  (det = e^{-t}).

#include <vector>

#include "dwlab/field.hpp"

namespace dwlab {

enum class SymbolKind { D, dtD, dttD, Heat, HalfWavePlus, HalfWaveMinus };

// Undamped mode kernel: derivative 0 -> L, 1 -> dL/dt, 2 -> d2L/dt2 = mu*L.
double L_symbol(double t, double rho, int derivative);

// Full scalar multiplier of one mode, damping included:
//   D:      e^{-t/2} L
//   dtD:    e^{-t/2} (L' - L/2)
//   dttD:   -dtD - rho^2 D          (mode-equation identity)
//   Heat:   e^{-t rho^2}
//   HalfWave+/-: e^{+-i t sqrt(max(rho^2 - 1/4, 0))}
cplx propagator_symbol(SymbolKind kind, double t, double rho);

// Multiplies every coefficient by the mode symbol. The half-wave kinds act on
// the high-band projection and reject inputs whose energy below the high band
// exceeds 1e-12 of the total.
Spectrum apply_propagator(SymbolKind kind, const Spectrum& x, double t);

// Applies the 2x2 state matrix A(t): new u = (D + dtD)u + D v,
// new v = (dtD + dttD)u + dtD v; the timestamp advances by t.
StatePair evolve_linear(const StatePair& s, double t);

// Precomputed A(dt) tables for tight time-marching loops: one step costs a
// 2x2 multiply per mode instead of four transcendental evaluations.
class LinearStepper {
 public:
  LinearStepper(const GridSpec& g, double dt);

  double dt() const { return dt_; }
  const GridSpec& grid() const { return grid_; }

  // Advances the spectral pair (u, v) by dt in place.
  void step(Spectrum& u, Spectrum& v) const;

  // Adds the inhomogeneous half-step: u += w * D(dt) f, v += w * dtD(dt) f.
  // This is the Duhamel weight a trapezoid rule attaches to the old forcing.
  void add_forced(Spectrum& u, Spectrum& v, const Spectrum& f, double w) const;

 private:
  GridSpec grid_;
  double dt_;
  std::vector<double> m11_, m12_, m21_, m22_;
};

}  // namespace dwlab
