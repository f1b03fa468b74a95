#include "dwlab/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |z|^p with fast paths for the small even integer exponents the estimates
// actually use; they dominate the time-integral inner loops.
inline double abs_pow(const cplx& z, double p) {
  const double m2 = std::norm(z);
  if (p == 2.0) return m2;
  if (p == 4.0) return m2 * m2;
  if (p == 6.0) return m2 * m2 * m2;
  if (p == 8.0) return (m2 * m2) * (m2 * m2);
  if (p == 1.0) return std::sqrt(m2);
  return std::pow(m2, 0.5 * p);
}

void check_lebesgue_exponent(double p, const char* who) {
  if (!(p >= 1.0))
    throw std::invalid_argument(std::string(who) + ": exponent must satisfy p >= 1");
}

}  // namespace

double norm_lp(const Field& f, double p) {
  check_lebesgue_exponent(p, "norm_lp");
  if (p == kInf) {
    double m = 0.0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  for (const cplx& z : f.v) acc += abs_pow(z, p);
  return std::pow(f.grid.cell_volume() * acc, 1.0 / p);
}

double norm_sobolev(const Spectrum& s, double order) {
  double acc = 0.0;
  for_each_mode(s.grid, [&](std::size_t i, double rho) {
    acc += std::pow(1.0 + rho * rho, order) * std::norm(s.v[i]);
  });
  return std::sqrt(acc);
}

double norm_sobolev(const Field& f, double order) {
  return norm_sobolev(fft_forward(f), order);
}

double norm_hom_sobolev_lp(const Field& f, double s, double p) {
  check_lebesgue_exponent(p, "norm_hom_sobolev_lp");
  Spectrum c = fft_forward(f);
  if (s < 0.0) {
    double mass = 0.0;
    for (const cplx& z : c.v) mass += std::norm(z);
    if (std::abs(c.v[0]) > 1e-12 * std::sqrt(mass))
      throw std::domain_error(
          "norm_hom_sobolev_lp: negative order needs a mean-free field");
  }
  for_each_mode(c.grid, [&](std::size_t i, double rho) {
    c.v[i] = rho == 0.0 ? cplx(0.0) : c.v[i] * std::pow(rho, s);
  });
  return norm_lp(fft_inverse(c), p);
}

Field bessel_potential(const Field& f, double s) {
  Spectrum c = fft_forward(f);
  for_each_mode(c.grid, [&](std::size_t i, double rho) {
    c.v[i] *= std::pow(1.0 + rho * rho, 0.5 * s);
  });
  return fft_inverse(c);
}

double energy_norm(const StatePair& s) {
  const double a = norm_sobolev(s.u, 1.0);
  const double b = norm_lp(s.v, 2.0);
  return std::hypot(a, b);
}

double norm_spacetime(const std::vector<Field>& samples, double dt, double q, double r) {
  check_lebesgue_exponent(q, "norm_spacetime (time)");
  check_lebesgue_exponent(r, "norm_spacetime (space)");
  if (samples.empty()) throw std::invalid_argument("norm_spacetime: no samples");
  if (q == kInf) {
    double m = 0.0;
    for (const Field& f : samples) m = std::max(m, norm_lp(f, r));
    return m;
  }
  if (samples.size() < 2)
    throw std::invalid_argument("norm_spacetime: finite q needs >= 2 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("norm_spacetime: dt must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = (i == 0 || i + 1 == samples.size()) ? 0.5 * dt : dt;
    acc += w * std::pow(norm_lp(samples[i], r), q);
  }
  return std::pow(acc, 1.0 / q);
}

double norm_spacetime(const Trajectory& traj, double q, double r) {
  std::vector<Field> fields;
  fields.reserve(traj.samples.size());
  for (const StatePair& s : traj.samples) fields.push_back(s.u);
  return norm_spacetime(fields, traj.sample_dt, q, r);
}

}  // namespace dwlab
