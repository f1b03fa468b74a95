#include "dwlab/odi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dwlab {

namespace {

// The superlinear term extended oddly to h < 0 (survived orbits may swing
// through zero; the positive branch, the only one the comparison argument
// uses, is untouched). Integrating the odd force gives an even potential, so
// the conserved quantity keeps its h > 0 form for all h:
// G = h'^2/2 + h^2/2 - C|h|^{gamma+1}/(gamma+1).
struct Rhs {
  double C, gamma;
  std::array<double, 2> operator()(const std::array<double, 2>& y) const {
    double a = std::abs(y[0]);
    double super = C * std::copysign(std::pow(a, gamma), y[0]);
    return {y[1], super - y[0]};
  }
};

double conserved(const Rhs& f, const std::array<double, 2>& y, double* scale) {
  double a = std::abs(y[0]);
  double pot = f.C * std::pow(a, f.gamma + 1.0) / (f.gamma + 1.0);
  double kin = 0.5 * y[1] * y[1];
  double quad = 0.5 * y[0] * y[0];
  if (scale) *scale = kin + quad + pot;
  return kin + quad - pot;
}

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between the 5th-order weights and the embedded 4th-order ones
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
// dense-output weights for the quartic continuous extension
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Y = std::array<double, 2>;

Y axpy(const Y& y, double h, std::initializer_list<std::pair<double, const Y*>> terms) {
  Y out = y;
  for (const auto& [c, k] : terms) {
    out[0] += h * c * (*k)[0];
    out[1] += h * c * (*k)[1];
  }
  return out;
}

constexpr double kStepFloor = 1e-14;

}  // namespace

OdiResult integrate_odi(const OdiProblem& p, double rel_tol) {
  OdiResult res;
  auto reject = [&](const char* why) {
    res.outcome = OdiOutcome::Rejected;
    res.reason = why;
    return res;
  };
  if (!(p.C > 0.0) || !std::isfinite(p.C)) return reject("C must be positive and finite");
  if (!(p.gamma > 1.0) || !std::isfinite(p.gamma)) return reject("gamma must exceed 1");
  if (!(p.h0 > 0.0) || !std::isfinite(p.h0)) return reject("h0 must be positive and finite");
  if (!(p.h1 > 0.0) || !std::isfinite(p.h1)) return reject("h1 must be positive and finite");
  if (!(p.t_max > 0.0) || !std::isfinite(p.t_max)) return reject("t_max must be positive and finite");
  if (!(p.threshold > 0.0) || !std::isfinite(p.threshold))
    return reject("threshold must be positive and finite");
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) throw std::invalid_argument("rel_tol out of range");

  Rhs f{p.C, p.gamma};
  Y y{p.h0, p.h1};
  double t = 0.0;

  auto finish = [&](OdiOutcome o, double t_esc) {
    res.outcome = o;
    res.t_escape = o == OdiOutcome::BlowUp ? t_esc
                                           : std::numeric_limits<double>::quiet_NaN();
    res.t_final = t;
    res.h_final = y[0];
    res.hp_final = y[1];
    return res;
  };

  if (p.h0 >= p.threshold) return finish(OdiOutcome::BlowUp, 0.0);

  const double atol = 1e-12;
  const double g0 = conserved(f, y, nullptr);
  double dt = std::min(1e-3, p.t_max);
  double facold = 1e-4;
  Y k1 = f(y);

  for (std::size_t attempts = 0; attempts < 100'000'000; ++attempts) {
    if (t >= p.t_max * (1.0 - 1e-15)) return finish(OdiOutcome::Survived, 0.0);
    if (dt < kStepFloor) return finish(OdiOutcome::BlowUp, t);  // asymptote at working precision
    dt = std::min(dt, p.t_max - t);

    Y k2 = f(axpy(y, dt, {{a21, &k1}}));
    Y k3 = f(axpy(y, dt, {{a31, &k1}, {a32, &k2}}));
    Y k4 = f(axpy(y, dt, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    Y k5 = f(axpy(y, dt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    Y k6 = f(axpy(y, dt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    Y ynew = axpy(y, dt, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    Y k7 = f(ynew);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      double ei = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                        e6 * k6[i] + e7 * k7[i]);
      double sc = atol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(0.5 * err);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {  // accept
      ++res.steps;
      if (ynew[0] >= p.threshold) {
        // quartic dense output of the crossing step, then bisection on it
        double r1 = y[0];
        double r2 = ynew[0] - y[0];
        double r3 = dt * k1[0] - r2;
        double r4 = r2 - dt * k7[0] - r3;
        double r5 = dt * (d1 * k1[0] + d3 * k3[0] + d4 * k4[0] + d5 * k5[0] +
                          d6 * k6[0] + d7 * k7[0]);
        auto dense_h = [&](double th) {
          return r1 + th * (r2 + (1.0 - th) * (r3 + th * (r4 + (1.0 - th) * r5)));
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
          double mid = 0.5 * (lo + hi);
          (dense_h(mid) >= p.threshold ? hi : lo) = mid;
        }
        double t_esc = t + dt * 0.5 * (lo + hi);
        t += dt;
        y = ynew;
        return finish(OdiOutcome::BlowUp, t_esc);
      }
      t += dt;
      y = ynew;
      k1 = k7;  // first-same-as-last

      double scale = 1.0;
      double g = conserved(f, y, &scale);
      res.g_drift = std::max(res.g_drift, std::abs(g - g0) / std::max(1.0, scale));

      double fac11 = std::pow(err, 0.2 - 0.04 * 0.75);
      double fac = fac11 / std::pow(facold, 0.04);
      dt *= std::min(5.0, std::max(0.2, 0.9 / fac));
      facold = std::max(err, 1e-4);
    } else {
      dt *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
  }
  throw std::runtime_error("integrate_odi: step budget exhausted");
}

void write_odi_csv(std::ostream& out,
                   const std::vector<std::pair<OdiProblem, OdiResult>>& rows) {
  out << "C,gamma,h0,h1,outcome,t_escape\n";
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (const auto& [prob, r] : rows) {
    put(prob.C);
    out << ',';
    put(prob.gamma);
    out << ',';
    put(prob.h0);
    out << ',';
    put(prob.h1);
    out << ',';
    switch (r.outcome) {
      case OdiOutcome::BlowUp: out << "BlowUp"; break;
      case OdiOutcome::Survived: out << "Survived"; break;
      case OdiOutcome::Rejected: out << "Rejected"; break;
    }
    out << ',';
    put(r.t_escape);
    out << '\n';
  }
}

}  // namespace dwlab
