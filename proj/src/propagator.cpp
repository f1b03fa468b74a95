#include "dwlab/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace dwlab {

namespace {

// Entries of A(t) for one mode, with damp = e^{-t/2} passed in so the
// exponential is evaluated once per field rather than once per mode.
inline void mode_matrix(double t, double rho, double damp, double m[4]) {
  const double L = L_symbol(t, rho, 0);
  const double Lp = L_symbol(t, rho, 1);
  m[0] = damp * (0.5 * L + Lp);
  m[1] = damp * L;
  m[2] = -rho * rho * damp * L;
  m[3] = damp * (Lp - 0.5 * L);
}

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("propagator: t must be >= 0");
}

}  // namespace

double L_symbol(double t, double rho, int derivative) {
  if (derivative < 0 || derivative > 2)
    throw std::invalid_argument("L_symbol: derivative must be 0, 1 or 2");
  const double mu = 0.25 - rho * rho;
  if (derivative == 2) return mu * L_symbol(t, rho, 0);
  const double z = mu * t * t;
  if (std::abs(z) < 1e-4) {
    // Entire-function series; 8 terms leave a truncation below 1e-32 * t here.
    double term = derivative == 0 ? t : 1.0;
    double sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      sum += term;
      const int m = 2 * k + (derivative == 0 ? 2 : 1);
      term *= z / (double(m) * double(m + 1));
    }
    return sum;
  }
  if (mu > 0.0) {
    const double w = std::sqrt(mu);
    return derivative == 0 ? std::sinh(t * w) / w : std::cosh(t * w);
  }
  const double w = std::sqrt(-mu);
  return derivative == 0 ? std::sin(t * w) / w : std::cos(t * w);
}

cplx propagator_symbol(SymbolKind kind, double t, double rho) {
  require_time(t);
  switch (kind) {
    case SymbolKind::D:
      return std::exp(-0.5 * t) * L_symbol(t, rho, 0);
    case SymbolKind::dtD:
      return std::exp(-0.5 * t) *
             (L_symbol(t, rho, 1) - 0.5 * L_symbol(t, rho, 0));
    case SymbolKind::dttD:
      return -propagator_symbol(SymbolKind::dtD, t, rho) -
             rho * rho * propagator_symbol(SymbolKind::D, t, rho);
    case SymbolKind::Heat:
      return std::exp(-t * rho * rho);
    case SymbolKind::HalfWavePlus:
    case SymbolKind::HalfWaveMinus: {
      const double w = std::sqrt(std::max(rho * rho - 0.25, 0.0));
      const double s = kind == SymbolKind::HalfWavePlus ? 1.0 : -1.0;
      return cplx(std::cos(t * w), s * std::sin(t * w));
    }
  }
  throw std::logic_error("propagator_symbol: unknown kind");
}

Spectrum apply_propagator(SymbolKind kind, const Spectrum& x, double t) {
  require_time(t);
  Spectrum out(x.grid, x.real_tag);

  if (kind == SymbolKind::HalfWavePlus || kind == SymbolKind::HalfWaveMinus) {
    // Gate on mass where the high-band multiplier vanishes identically
    // (|xi| <= 1); the smooth ramp above that is legitimate high-band content.
    double total = 0.0, low = 0.0;
    for_each_mode(x.grid, [&](std::size_t i, double rho) {
      const double m = std::norm(x.v[i]);
      total += m;
      if (rho <= 1.0) low += m;
    });
    if (low > 1e-12 * total)
      throw std::domain_error(
          "apply_propagator: half-wave kinds need high-band data");
    const Spectrum hi = project(x, Band::High);
    const double s = kind == SymbolKind::HalfWavePlus ? 1.0 : -1.0;
    for_each_mode(x.grid, [&](std::size_t i, double rho) {
      const double w = std::sqrt(std::max(rho * rho - 0.25, 0.0));
      out.v[i] = hi.v[i] * cplx(std::cos(t * w), s * std::sin(t * w));
    });
    return out;
  }

  if (kind == SymbolKind::Heat) {
    for_each_mode(x.grid, [&](std::size_t i, double rho) {
      out.v[i] = x.v[i] * std::exp(-t * rho * rho);
    });
    return out;
  }

  const double damp = std::exp(-0.5 * t);
  for_each_mode(x.grid, [&](std::size_t i, double rho) {
    const double L = L_symbol(t, rho, 0);
    double sym = 0.0;
    switch (kind) {
      case SymbolKind::D:
        sym = damp * L;
        break;
      case SymbolKind::dtD:
        sym = damp * (L_symbol(t, rho, 1) - 0.5 * L);
        break;
      case SymbolKind::dttD:
        sym = -damp * (L_symbol(t, rho, 1) - 0.5 * L) - rho * rho * damp * L;
        break;
      default:
        break;
    }
    out.v[i] = x.v[i] * sym;
  });
  return out;
}

StatePair evolve_linear(const StatePair& s, double t) {
  require_time(t);
  Spectrum cu = fft_forward(s.u);
  Spectrum cv = fft_forward(s.v);
  const double damp = std::exp(-0.5 * t);
  for_each_mode(s.u.grid, [&](std::size_t i, double rho) {
    double m[4];
    mode_matrix(t, rho, damp, m);
    const cplx u = cu.v[i], v = cv.v[i];
    cu.v[i] = m[0] * u + m[1] * v;
    cv.v[i] = m[2] * u + m[3] * v;
  });
  Field nu = fft_inverse(cu);
  Field nv = fft_inverse(cv);
  nu.real_tag = s.u.real_tag;
  nv.real_tag = s.v.real_tag;
  return StatePair(std::move(nu), std::move(nv), s.time + t);
}

LinearStepper::LinearStepper(const GridSpec& g, double dt) : grid_(g), dt_(dt) {
  require_time(dt);
  const std::size_t n = g.points();
  m11_.resize(n);
  m12_.resize(n);
  m21_.resize(n);
  m22_.resize(n);
  const double damp = std::exp(-0.5 * dt);
  for_each_mode(g, [&](std::size_t i, double rho) {
    double m[4];
    mode_matrix(dt, rho, damp, m);
    m11_[i] = m[0];
    m12_[i] = m[1];
    m21_[i] = m[2];
    m22_[i] = m[3];
  });
}

void LinearStepper::step(Spectrum& u, Spectrum& v) const {
  if (!(u.grid == grid_) || !(v.grid == grid_))
    throw std::invalid_argument("LinearStepper: grid mismatch");
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const cplx a = u.v[i], b = v.v[i];
    u.v[i] = m11_[i] * a + m12_[i] * b;
    v.v[i] = m21_[i] * a + m22_[i] * b;
  }
}

void LinearStepper::add_forced(Spectrum& u, Spectrum& v, const Spectrum& f,
                               double w) const {
  if (!(u.grid == grid_) || !(f.grid == grid_))
    throw std::invalid_argument("LinearStepper: grid mismatch");
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    u.v[i] += w * m12_[i] * f.v[i];
    v.v[i] += w * m22_[i] * f.v[i];
  }
}

}  // namespace dwlab
