#pragma once

// Spatial norms (Lebesgue, inhomogeneous/homogeneous Sobolev) by tensor
// trapezoid quadrature and exact Fourier sums, and mixed space-time norms by
// composite trapezoid in time. Use std::numeric_limits<double>::infinity()
// for the sup exponents.

#include <vector>

#include "dwlab/field.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab {

// L^p norm, 1 <= p <= inf.
double norm_lp(const Field& f, double p);

// ||<nabla>^s f||_{L^2} via the exact coefficient sum.
double norm_sobolev(const Spectrum& s, double order);
double norm_sobolev(const Field& f, double order);

// ||  |nabla|^s f ||_{L^p}. Negative s requires a mean-free field
// (|c_0| <= 1e-12 of the coefficient l2 mass), otherwise std::domain_error.
double norm_hom_sobolev_lp(const Field& f, double s, double p);

// <nabla>^s f as a field (Bessel multiplier (1+|xi|^2)^{s/2}).
Field bessel_potential(const Field& f, double s);

// sqrt(||u||_{H^1}^2 + ||v||_{L^2}^2), the energy-space size of a state.
double energy_norm(const StatePair& s);

// L^q_t L^r_x over uniformly spaced samples (composite trapezoid in time).
// Finite q needs at least two samples; q = inf takes the max over samples.
double norm_spacetime(const std::vector<Field>& samples, double dt, double q, double r);
double norm_spacetime(const Trajectory& traj, double q, double r);

}  // namespace dwlab
