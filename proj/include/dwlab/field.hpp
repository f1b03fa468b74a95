#pragma once

// Complex scalar fields on the periodic box and their Fourier coefficients,
// with the smooth frequency cutoffs and dyadic band projections built on top.
//
// Transform convention (V = (2 Lambda)^d the box volume):
//   forward:  c_k = (V^{1/2} / n^d) sum_j f_j e^{-2 pi i k.j/n}
//   inverse:  f_j = V^{-1/2}        sum_k c_k e^{+2 pi i k.j/n}
// so that sum_k |c_k|^2 = h^d sum_j |f_j|^2 (the trapezoid L^2 norm squared)
// and a unit-amplitude lattice mode carries |c| = V^{1/2}.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"

namespace dwlab {

using cplx = std::complex<double>;

struct Field {
  GridSpec grid;
  std::vector<cplx> v;       // row-major samples, axis 0 slowest
  bool real_tag = false;     // marks fields meant to be real-valued

  explicit Field(const GridSpec& g, bool real = false)
      : grid(g), v(g.points()), real_tag(real) {}
};

struct Spectrum {
  GridSpec grid;
  std::vector<cplx> v;       // coefficient of lattice mode k, FFT layout
  bool real_tag = false;

  explicit Spectrum(const GridSpec& g, bool real = false)
      : grid(g), v(g.points()), real_tag(real) {}
};

// Two fields sharing one grid plus a timestamp; grids must agree.
struct StatePair {
  Field u;
  Field v;
  double time = 0.0;

  StatePair(Field u_, Field v_, double t = 0.0);
};

Spectrum fft_forward(const Field& f);
Field fft_inverse(const Spectrum& s);

// Samples fn(x) at the grid points; fn receives a pointer to d coordinates.
Field sample_field(const GridSpec& g, const std::function<cplx(const double*)>& fn,
                   bool real_tag = false);

// Applies m(|xi|) as a Fourier multiplier.
Spectrum apply_radial_multiplier(const Spectrum& s, const std::function<double(double)>& m);

// Iterates all lattice modes: fn(flat_index, rho) with rho = |xi|.
void for_each_mode(const GridSpec& g, const std::function<void(std::size_t, double)>& fn);

// --- smooth cutoffs ---------------------------------------------------------

// exp(-1/t) for t > 0, 0 otherwise; the standard smooth step ingredient.
double smooth_psi(double t);

// chi_{<=1}: identically 1 for |s| <= 1, identically 0 for |s| >= 2,
// smooth and monotone in between.
double chi_le1(double s);

// --- band projections -------------------------------------------------------

enum class Band { Low, High };

// Low: multiplier chi_{<=1}(|xi|). High: the exact complement, computed as
// c - c*chi per coefficient so Low + High reproduces the input to <= 1 ulp.
Spectrum project(const Spectrum& s, Band band);
Field project(const Field& f, Band band);

// Dyadic band at scale N (multiplier chi(|xi|/N) - chi(2|xi|/N)). N must be a
// power of two inside [freq_spacing, nyquist]; anything else is rejected.
Spectrum project_dyadic(const Spectrum& s, double N);
Field project_dyadic(const Field& f, double N);

// Largest set of admissible dyadic scales for the grid.
std::vector<double> dyadic_scales(const GridSpec& g);

// --- binary field dump ------------------------------------------------------
// Little-endian layout: magic "DWF1"; u32 d, n, reserved=0, flags (bit 0 =
// real tag); f64 half_length; n^d coefficients as interleaved (re, im) f64,
// row-major.

void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

}  // namespace dwlab
