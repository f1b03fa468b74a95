#pragma once

// Periodic box [-Lambda, Lambda)^d sampled on n points per axis.
// Lattice frequencies are xi_k = pi*k/Lambda for integer k in [-n/2, n/2).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace dwlab {

struct GridSpec {
  int d = 1;
  int n = 8;
  double half_length = 1.0;

  GridSpec(int d_, int n_, double half_length_)
      : d(d_), n(n_), half_length(half_length_) {
    if (d < 1 || d > 3) throw std::invalid_argument("GridSpec: d must be 1, 2 or 3");
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridSpec: n must be a power of two >= 8");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
      throw std::invalid_argument("GridSpec: half_length must be positive");
  }

  std::size_t points() const {
    std::size_t p = 1;
    for (int i = 0; i < d; ++i) p *= static_cast<std::size_t>(n);
    return p;
  }
  double spacing() const { return 2.0 * half_length / n; }
  double freq_spacing() const { return std::numbers::pi / half_length; }
  double nyquist() const { return std::numbers::pi * n / (2.0 * half_length); }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= spacing();
    return v;
  }

  // Signed lattice index of axis position k in [0, n).
  int signed_index(int k) const { return k < n / 2 ? k : k - n; }
  // Frequency of axis position k.
  double axis_freq(int k) const { return freq_spacing() * signed_index(k); }
  // Physical coordinate of axis sample j.
  double axis_coord(int j) const { return -half_length + spacing() * j; }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace dwlab
