#include "dwlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace dwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

struct Quad {
  std::vector<double> x, w;
};

// Composite 64-point Gauss-Legendre rule on [a, b].
Quad composite_gauss(double a, double b, int panels) {
  using rule = boost::math::quadrature::gauss<double, 64>;
  const auto& xs = rule::abscissa();  // positive half-nodes
  const auto& ws = rule::weights();
  Quad q;
  q.x.reserve(std::size_t(panels) * 64);
  q.w.reserve(std::size_t(panels) * 64);
  const double ph = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * ph, h = 0.5 * ph;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      q.x.push_back(c - h * xs[i]);
      q.w.push_back(h * ws[i]);
      q.x.push_back(c + h * xs[i]);
      q.w.push_back(h * ws[i]);
    }
  }
  return q;
}

void check_profile(const RadialProfile& p) {
  if (p.r.size() < 8 || p.r.size() != p.f.size())
    throw std::invalid_argument("radial: malformed profile");
  double peak = 0.0;
  for (double v : p.f) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw std::invalid_argument("radial: zero profile");
  if (std::abs(p.f.back()) > 1e-10 * peak)
    throw std::domain_error("radial: profile tail has not decayed at r_max");
}

}  // namespace

RadialProfile make_radial_profile(const std::function<double(double)>& fn,
                                  double r_max, int n, double span_frac) {
  if (!(r_max > 0.0) || n < 8 || !(span_frac > 0.0) || !(span_frac < 1.0))
    throw std::invalid_argument("make_radial_profile: bad parameters");
  RadialProfile p;
  p.r.resize(n);
  p.f.resize(n);
  const double s0 = std::log(r_max * span_frac);
  const double ds = std::log(1.0 / span_frac) / (n - 1);
  for (int i = 0; i < n; ++i) {
    p.r[i] = std::exp(s0 + i * ds);
    p.f[i] = fn(p.r[i]);
  }
  p.r[n - 1] = r_max;  // kill the round-off drift of exp(log r_max)
  return p;
}

double radial_norm_d3(const RadialProfile& profile, SymbolKind kind, double t,
                      double p) {
  if (kind != SymbolKind::D && kind != SymbolKind::dtD &&
      kind != SymbolKind::Heat)
    throw std::invalid_argument("radial_norm_d3: kind must be D, dtD or Heat");
  if (p != 1.0 && p != 2.0 && p != 4.0 && p != kInf)
    throw std::invalid_argument("radial_norm_d3: p must be 1, 2, 4 or inf");
  if (!(t >= 0.0)) throw std::invalid_argument("radial_norm_d3: t must be >= 0");
  check_profile(profile);

  // Interpolate the log-uniform samples in s = ln r (a uniform grid there).
  const std::size_t n = profile.r.size();
  const double s0 = std::log(profile.r.front());
  const double ds = (std::log(profile.r.back()) - s0) / double(n - 1);
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(
      profile.f.data(), n, s0, ds);
  const double s_end = s0 + ds * double(n - 1);
  auto eval_f = [&](double r) {
    const double s = std::log(std::max(r, profile.r.front()));
    return spline(std::clamp(s, s0, s_end));
  };

  const double r_in = profile.r.back();
  const Quad qr = composite_gauss(0.0, r_in, 64);
  std::vector<double> g(qr.x.size());  // r f(r) at the input nodes
  for (std::size_t j = 0; j < qr.x.size(); ++j)
    g[j] = qr.x[j] * eval_f(qr.x[j]);

  auto forward = [&](double k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < qr.x.size(); ++j)
      acc += qr.w[j] * g[j] * std::sin(k * qr.x[j]);
    return kSqrt2OverPi * acc / k;
  };

  // Adapt the k-range: march log-spaced probes until the transform has fallen
  // below 1e-13 of its peak (the profile is smooth, so it decays fast).
  const double k_cap = 128.0;
  double k_max = k_cap, peak = 0.0;
  {
    std::vector<double> probes;
    for (double k = 0.01; k <= k_cap; k *= 1.12) probes.push_back(k);
    std::vector<double> vals(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      vals[i] = std::abs(forward(probes[i]));
      peak = std::max(peak, vals[i]);
    }
    for (std::size_t i = probes.size(); i-- > 0;) {
      if (vals[i] > 1e-13 * peak) {
        k_max = std::min(1.5 * probes[i], k_cap);
        break;
      }
    }
  }

  const Quad qk = composite_gauss(0.0, k_max, 64);
  std::vector<double> ghat(qk.x.size());
  for (std::size_t i = 0; i < qk.x.size(); ++i) {
    const double sym =
        propagator_symbol(kind, t, qk.x[i]).real();  // real for these kinds
    ghat[i] = forward(qk.x[i]) * sym;
  }

  // The solution spreads diffusively (scale ~ sqrt(t)); grow the output box
  // so the truncated tail is negligible for every admissible p.
  const double r_out = r_in + 20.0 + 6.0 * std::sqrt(1.0 + 2.0 * t);
  const Quad qo = composite_gauss(0.0, r_out, 64);
  std::vector<double> u(qo.x.size());
  for (std::size_t j = 0; j < qo.x.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < qk.x.size(); ++i)
      acc += qk.w[i] * qk.x[i] * ghat[i] * std::sin(qk.x[i] * qo.x[j]);
    u[j] = kSqrt2OverPi * acc / qo.x[j];
  }
  double u0 = 0.0;  // r -> 0 limit: sin(kr)/r -> k
  for (std::size_t i = 0; i < qk.x.size(); ++i)
    u0 += qk.w[i] * qk.x[i] * qk.x[i] * ghat[i];
  u0 *= kSqrt2OverPi;

  if (p == kInf) {
    double m = std::abs(u0);
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < qo.x.size(); ++j) {
    const double a = std::abs(u[j]);
    const double ap = p == 1.0 ? a : (p == 2.0 ? a * a : (a * a) * (a * a));
    acc += qo.w[j] * ap * qo.x[j] * qo.x[j];
  }
  return std::pow(4.0 * std::numbers::pi * acc, 1.0 / p);
}

}  // namespace dwlab
