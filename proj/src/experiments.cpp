#include "dwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwlab/exponents.hpp"
#include "dwlab/field.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/nldw.hpp"
#include "dwlab/norms.hpp"
#include "dwlab/odi.hpp"
#include "dwlab/propagator.hpp"
#include "dwlab/radial.hpp"
#include "dwlab/sha1.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

// Collects the per-assertion verdict lines for summary.txt.
struct Summary {
  std::string text;
  bool ok = true;

  void check(bool pass, const std::string& label, const std::string& detail) {
    text += pass ? "[PASS] " : "[FAIL] ";
    text += label;
    if (!detail.empty()) {
      text += ": ";
      text += detail;
    }
    text += '\n';
    ok = ok && pass;
  }
};

// Called once per kind after every parameter has been read: rejects leftover
// (unknown) keys, creates the output directory, and writes manifest.txt with
// the resolved configuration and its git-blob hash.
void finish_validation(Config& cfg, const std::string& kind,
                       const std::string& out, double horizon) {
  const auto leftovers = cfg.unconsumed();
  if (!leftovers.empty())
    throw ConfigError(leftovers.front(),
                      "unknown key `" + leftovers.front() + "` for kind `" +
                          kind + "`");
  std::filesystem::create_directories(out);
  const std::string body = cfg.canonical();
  std::string m;
  m += "kind = " + kind + "\n";
  m += "hash = " + git_blob_sha1(body) + "\n";
  m += "time_horizon = " + fmt(horizon) + "\n";
  m += "---\n";
  m += body;
  write_file(out + "/manifest.txt", m);
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

Field white_noise(const GridSpec& g, const CounterRng& rng) {
  Field f(g, /*real=*/true);
  for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = rng.gaussian(i);
  return f;
}

// Real random field with coefficients restricted to lo <= |xi| <= hi.
Field band_noise(const GridSpec& g, const CounterRng& rng, double lo,
                 double hi) {
  Spectrum s = fft_forward(white_noise(g, rng));
  for_each_mode(g, [&](std::size_t i, double rho) {
    if (rho < lo || rho > hi) s.v[i] = 0.0;
  });
  return fft_inverse(s);
}

void scale_field(Field& f, double a) {
  for (auto& c : f.v) c *= a;
}

// Ground-state profile under the smooth radial cutoff at scale R (d = 3).
Field boxed_profile(const GridSpec& g, double amp, double R) {
  return sample_field(
      g,
      [amp, R](const double* x) -> cplx {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return amp * chi_le1(std::sqrt(r2) / R) / std::sqrt(1.0 + r2 / 3.0);
      },
      /*real_tag=*/true);
}

int require_grid_n(Config& cfg, const std::string& key, int def) {
  const int n = cfg.get_int(key, def);
  if (n < 8 || n > 512 || (n & (n - 1)) != 0)
    throw ConfigError(key,
                      "key `" + key + "`: grid size must be a power of two in [8, 512]");
  return n;
}

double require_positive(Config& cfg, const std::string& key, double def) {
  const double v = cfg.get_double(key, def);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(key, "key `" + key + "`: must be positive and finite");
  return v;
}

// ---------------------------------------------------------------------------
// exponents-table: render the curated derivative-loss catalog.
// ---------------------------------------------------------------------------

void run_exponents_table(Config& cfg, const std::string& out, Summary& s) {
  (void)cfg.get_u64("seed", 1);
  finish_validation(cfg, "exponents-table", out, kInf);

  const auto rows = exponents::curated_pairs();
  const std::string csv = exponents::render_table_csv(rows);
  write_file(out + "/exponents.csv", csv);

  s.check(rows.size() == 10, "curated catalog has ten rows",
          "rows = " + std::to_string(rows.size()));
  s.check(exponents::render_table_csv(exponents::curated_pairs()) == csv,
          "table rendering is deterministic", "");
}

// ---------------------------------------------------------------------------
// decay-fit: dispersive decay exponents on the continuum radial path.
// ---------------------------------------------------------------------------

void run_decay_fit(Config& cfg, const std::string& out, Summary& s) {
  (void)cfg.get_u64("seed", 1);
  const double t_lo = require_positive(cfg, "t_lo", 10.0);
  const double t_hi = require_positive(cfg, "t_hi", 100.0);
  const int points = cfg.get_int("points", 25);
  const double width = require_positive(cfg, "width", 1.0);
  const double amplitude = require_positive(cfg, "amplitude", 1.0);
  const double r_max = require_positive(cfg, "r_max", 40.0);
  const int profile_n = cfg.get_int("profile_n", 4096);
  if (!(t_hi > t_lo)) throw ConfigError("t_hi", "key `t_hi`: need t_hi > t_lo");
  if (points < 3) throw ConfigError("points", "key `points`: need at least 3");
  if (profile_n < 64)
    throw ConfigError("profile_n", "key `profile_n`: need at least 64");
  if (r_max < 7.0 * width)
    throw ConfigError("r_max",
                      "key `r_max`: need r_max >= 7*width so the profile tail "
                      "is negligible");
  // The radial path has no periodic wrap, so there is no finite horizon.
  finish_validation(cfg, "decay-fit", out, kInf);

  const RadialProfile prof = make_radial_profile(
      [amplitude, width](double r) {
        return amplitude * std::exp(-0.5 * (r / width) * (r / width));
      },
      r_max, profile_n);

  std::ofstream csv(out + "/decay.csv", std::ios::binary);
  csv << "t,l2,linf\n";
  std::vector<double> lt, l2, linf;
  bool finite = true;
  for (int i = 0; i < points; ++i) {
    const double t =
        t_lo * std::pow(t_hi / t_lo,
                        static_cast<double>(i) / static_cast<double>(points - 1));
    const double n2 = radial_norm_d3(prof, SymbolKind::D, t, 2.0);
    const double ni = radial_norm_d3(prof, SymbolKind::D, t, kInf);
    csv << fmt(t) << ',' << fmt(n2) << ',' << fmt(ni) << '\n' << std::flush;
    finite = finite && std::isfinite(n2) && n2 > 0 && std::isfinite(ni) && ni > 0;
    lt.push_back(std::log(t));
    l2.push_back(std::log(n2));
    linf.push_back(std::log(ni));
  }
  s.check(finite, "evolved norms are finite and positive", "");

  const double slope2 = fit_slope(lt, l2);
  const double slopeInf = fit_slope(lt, linf);
  s.check(std::abs(slope2 + 0.75) <= 0.08,
          "integrable-data L2 decay exponent is -3/4 within 0.08",
          "slope = " + fmt(slope2));
  s.check(std::abs(slopeInf + 1.5) <= 0.10,
          "integrable-data Linf decay exponent is -3/2 within 0.10",
          "slope = " + fmt(slopeInf));
}

// ---------------------------------------------------------------------------
// linear-highfreq: exponential decay of the high band under the linear flow.
// ---------------------------------------------------------------------------

void run_linear_highfreq(Config& cfg, const std::string& out, Summary& s) {
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const int n = require_grid_n(cfg, "n", 64);
  const double half = require_positive(cfg, "half_length", 10.5);
  const double t_hi = require_positive(cfg, "t_hi", 20.0);
  const int samples = cfg.get_int("samples", 81);
  const double amplitude = require_positive(cfg, "amplitude", 1.0);
  if (samples < 3) throw ConfigError("samples", "key `samples`: need at least 3");
  const double horizon = 2.0 * half;
  if (t_hi > horizon)
    throw ConfigError("t_hi", "key `t_hi`: fit window " + fmt(t_hi) +
                                  " exceeds the wrap-around horizon " +
                                  fmt(horizon));
  finish_validation(cfg, "linear-highfreq", out, horizon);

  const GridSpec g(3, n, half);
  Field u0 = project(white_noise(g, CounterRng(seed, 11)), Band::High);
  Field v0 = project(white_noise(g, CounterRng(seed, 12)), Band::High);
  StatePair s0(std::move(u0), std::move(v0), 0.0);
  const double norm0 = energy_norm(s0);
  if (!(norm0 > 0)) throw std::runtime_error("degenerate random data");
  scale_field(s0.u, amplitude / norm0);
  scale_field(s0.v, amplitude / norm0);

  std::ofstream csv(out + "/highfreq.csv", std::ios::binary);
  csv << "t,norm\n";
  std::vector<double> ts, ln;
  bool finite = true;
  for (int k = 0; k < samples; ++k) {
    const double t = t_hi * static_cast<double>(k) / (samples - 1);
    const double nk = energy_norm(evolve_linear(s0, t));
    csv << fmt(t) << ',' << fmt(nk) << '\n' << std::flush;
    finite = finite && std::isfinite(nk) && nk > 0;
    ts.push_back(t);
    ln.push_back(std::log(nk));
  }
  s.check(finite, "evolved norms are finite and positive", "");

  const double slope = fit_slope(ts, ln);
  s.check(slope <= -0.25 + 0.01,
          "high-band semilog decay slope is at most -1/4 + 0.01",
          "slope = " + fmt(slope));
}

// ---------------------------------------------------------------------------
// strichartz-ratio: scale robustness of the space-time/Sobolev quotient.
// ---------------------------------------------------------------------------

struct RatioPair {
  double q, r, gamma;
};

void run_strichartz_ratio(Config& cfg, const std::string& out, Summary& s) {
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const int n = require_grid_n(cfg, "n", 64);
  const int scales = cfg.get_int("scales", 7);
  const int seeds = cfg.get_int("seeds", 20);
  const double t_hi = require_positive(cfg, "t_hi", 24.0);
  const double dt = require_positive(cfg, "dt", 0.4);
  const double base_half = require_positive(cfg, "base_half_length", 8.0 * kPi);
  if (scales < 1 || scales > 12)
    throw ConfigError("scales", "key `scales`: need 1..12");
  if (seeds < 1) throw ConfigError("seeds", "key `seeds`: need at least 1");
  if (dt >= t_hi) throw ConfigError("dt", "key `dt`: need dt < t_hi");
  // Quotients are quantities of the periodic box itself, so the run may pass
  // the wrap bound; it is recorded for the smallest box.
  finish_validation(cfg, "strichartz-ratio", out, 2.0 * base_half /
                                                     std::pow(2.0, scales - 1));

  using exponents::PairQR;
  const RatioPair pairs[3] = {
      {4.0, 4.0, exponents::gamma_loss(PairQR(4, 4, 3)).to_double()},
      {8.0, 8.0, exponents::gamma_loss(PairQR(8, 8, 3)).to_double()},
      {2.0, 6.0, exponents::gamma_loss(PairQR(2, 6, 3)).to_double()}};

  std::ofstream csv(out + "/strichartz.csv", std::ios::binary);
  csv << "q,r,scale,seed,quotient\n";

  const int K = static_cast<int>(std::lround(t_hi / dt));
  double qmin[3] = {kInf, kInf, kInf};
  double qmax[3] = {0, 0, 0};
  bool finite = true;

  for (int j = 0; j < scales; ++j) {
    const double N = std::pow(2.0, j);
    const GridSpec g(3, n, base_half / N);
    const double lo = N / std::sqrt(2.0), hi = N * std::sqrt(2.0);
    for (int sd = 1; sd <= seeds; ++sd) {
      const CounterRng rng(seed, (static_cast<std::uint64_t>(j) << 32) |
                                     static_cast<std::uint64_t>(sd));
      const Spectrum fh = fft_forward(band_noise(g, rng, lo, hi));
      double den[3], acc[3] = {0, 0, 0};
      for (int p = 0; p < 3; ++p)
        den[p] = norm_sobolev(fh, pairs[p].gamma - 1.0);
      for (int k = 0; k <= K; ++k) {
        const double t = dt * k;
        const Field u =
            fft_inverse(apply_propagator(SymbolKind::D, fh, t));
        const double w = (k == 0 || k == K) ? 0.5 * dt : dt;
        for (int p = 0; p < 3; ++p)
          acc[p] += w * std::pow(norm_lp(u, pairs[p].r), pairs[p].q);
      }
      for (int p = 0; p < 3; ++p) {
        const double quot = std::pow(acc[p], 1.0 / pairs[p].q) / den[p];
        finite = finite && std::isfinite(quot) && quot > 0;
        qmin[p] = std::min(qmin[p], quot);
        qmax[p] = std::max(qmax[p], quot);
        csv << fmt(pairs[p].q) << ',' << fmt(pairs[p].r) << ','
            << static_cast<long>(N) << ',' << sd << ',' << fmt(quot) << '\n'
            << std::flush;
      }
    }
  }
  s.check(finite, "all quotients are finite and positive", "");
  for (int p = 0; p < 3; ++p) {
    const double ratio = qmax[p] / qmin[p];
    char label[96];
    std::snprintf(label, sizeof label,
                  "quotient max/min across scales <= 8 for (q,r)=(%g,%g)",
                  pairs[p].q, pairs[p].r);
    s.check(ratio <= 8.0, label,
            "ratio = " + fmt(ratio) + " (min " + fmt(qmin[p]) + ", max " +
                fmt(qmax[p]) + ")");
  }
}

// ---------------------------------------------------------------------------
// lwp-contraction: Picard fixed point vs the time stepper on small data.
// ---------------------------------------------------------------------------

void run_lwp_contraction(Config& cfg, const std::string& out, Summary& s) {
  (void)cfg.get_u64("seed", 1);
  const int n = require_grid_n(cfg, "n", 32);
  const double half = require_positive(cfg, "half_length", 6.0);
  const double amplitude = require_positive(cfg, "amplitude", 0.05);
  const double T = require_positive(cfg, "T", 1.0);
  const double tol = require_positive(cfg, "tol", 1e-8);
  const double lambda = cfg.get_double("lambda", 1.0);
  const int max_iter = cfg.get_int("max_iter", 25);
  if (max_iter < 2) throw ConfigError("max_iter", "key `max_iter`: need >= 2");
  finish_validation(cfg, "lwp-contraction", out, 2.0 * half);

  const GridSpec g(3, n, half);
  Field u0 = sample_field(
      g,
      [amplitude](const double* x) -> cplx {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return amplitude * std::exp(-0.5 * r2);
      },
      /*real_tag=*/true);
  StatePair s0(std::move(u0), Field(g, /*real=*/true), 0.0);

  PicardOpts popts;
  popts.tol = tol;
  popts.max_iter = max_iter;
  const double h = T / 64.0;
  popts.dt = h;
  const PicardResult pr = picard_solve(s0, T, lambda, popts);

  std::ofstream csv(out + "/contraction.csv", std::ios::binary);
  csv << "iter,distance,factor\n";
  for (std::size_t i = 0; i < pr.distances.size(); ++i) {
    csv << (i + 1) << ',' << fmt(pr.distances[i]) << ',';
    csv << (i == 0 ? std::string("nan") : fmt(pr.contraction[i - 1])) << '\n';
  }

  s.check(pr.iterations >= 1 && pr.distances.back() <= tol,
          "fixed-point iteration converged",
          "iterations = " + std::to_string(pr.iterations) + ", final gap = " +
              fmt(pr.distances.back()));
  const double worst =
      pr.contraction.empty()
          ? 0.0
          : *std::max_element(pr.contraction.begin(), pr.contraction.end());
  s.check(worst <= 0.5, "every contraction factor is at most 1/2",
          "max factor = " + fmt(worst));

  IntegrateOpts iopts;
  iopts.sample_dt = h;
  const Trajectory march = integrate_nldw(s0, T, h, lambda, iopts);
  const std::size_t m = std::min(march.samples.size(), pr.traj.samples.size());
  double gap = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    Field diff = pr.traj.samples[k].u;
    for (std::size_t i = 0; i < diff.v.size(); ++i)
      diff.v[i] -= march.samples[k].u.v[i];
    gap = std::max(gap, norm_lp(diff, 2.0));
  }
  const double gate = 10.0 * std::max(tol, h * h);
  s.check(m >= 2 && gap <= gate,
          "fixed point and time stepper agree in sup-in-time L2",
          "gap = " + fmt(gap) + ", allowed " + fmt(gate));
}

// ---------------------------------------------------------------------------
// global-decay: small-data run decays to zero with plateauing space-time norms.
// ---------------------------------------------------------------------------

void run_global_decay(Config& cfg, const std::string& out, Summary& s) {
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const int n = require_grid_n(cfg, "n", 64);
  const double half = require_positive(cfg, "half_length", 2.0 * kPi);
  const double dt = require_positive(cfg, "dt", 1.0 / 64.0);
  const double T = require_positive(cfg, "T", 50.0);
  const double sample_dt = require_positive(cfg, "sample_dt", 1.0);
  const double data_norm = require_positive(cfg, "data_norm", 1e-2);
  const double band_lo = require_positive(cfg, "band_lo", 1.0);
  const double band_hi = require_positive(cfg, "band_hi", 4.0);
  const double lambda = cfg.get_double("lambda", 1.0);
  if (!(band_hi > band_lo))
    throw ConfigError("band_hi", "key `band_hi`: need band_hi > band_lo");
  if (T <= 20.0 * sample_dt)
    throw ConfigError("sample_dt", "key `sample_dt`: need T > 20*sample_dt");
  finish_validation(cfg, "global-decay", out, 2.0 * half);

  const GridSpec g(3, n, half);
  Field u0 = band_noise(g, CounterRng(seed, 1), band_lo, band_hi);
  Field v0 = band_noise(g, CounterRng(seed, 2), band_lo, band_hi);
  StatePair s0(std::move(u0), std::move(v0), 0.0);
  const double norm0 = energy_norm(s0);
  if (!(norm0 > 0)) throw std::runtime_error("degenerate random data");
  scale_field(s0.u, data_norm / norm0);
  scale_field(s0.v, data_norm / norm0);

  IntegrateOpts iopts;
  iopts.sample_dt = sample_dt;
  const Trajectory traj = integrate_nldw(s0, T, dt, lambda, iopts);
  const MonitorSeries ms = monitor_series(traj, 3);
  {
    std::ofstream csv(out + "/monitor.csv", std::ios::binary);
    write_monitor_csv(csv, ms);
  }

  s.check(!traj.blowup, "no blow-up flag on the small-data run", "");
  const double terminal = energy_norm(traj.final_state ? *traj.final_state
                                                       : traj.samples.back());
  s.check(terminal < 1e-3 * data_norm,
          "terminal energy-space norm below 1e-3 of the initial",
          "terminal = " + fmt(terminal) + ", initial = " + fmt(data_norm));

  const std::size_t last = ms.t.size() - 1;
  s.check(ms.trusted_until == last,
          "energy dissipates monotonically across all samples",
          "trusted through sample " + std::to_string(ms.trusted_until) +
              " of " + std::to_string(last));

  // Plateau of the running space-time norms over the last ten time units.
  std::size_t i0 = 0;
  while (i0 < last && ms.t[i0] < T - 10.0 - 1e-9) ++i0;
  const bool s1_flat =
      ms.S1[i0] > 0 && (ms.S1[last] - ms.S1[i0]) < 0.01 * ms.S1[i0];
  const bool s2_flat =
      ms.S2[i0] > 0 && (ms.S2[last] - ms.S2[i0]) < 0.01 * ms.S2[i0];
  s.check(s1_flat, "running Strichartz norm S1 plateaus (last-decade rise < 1%)",
          "S1(" + fmt(ms.t[i0]) + ") = " + fmt(ms.S1[i0]) + ", S1(" +
              fmt(ms.t[last]) + ") = " + fmt(ms.S1[last]));
  s.check(s2_flat, "running Strichartz norm S2 plateaus (last-decade rise < 1%)",
          "S2(" + fmt(ms.t[i0]) + ") = " + fmt(ms.S2[i0]) + ", S2(" +
              fmt(ms.t[last]) + ") = " + fmt(ms.S2[last]));

  const double gate = std::max(1e-6 * std::abs(ms.E[0]), 5.0 * dt * dt * T);
  s.check(ms.dissipation_residual <= gate,
          "integrated dissipation identity holds",
          "residual = " + fmt(ms.dissipation_residual) + ", allowed " +
              fmt(gate));
}

// ---------------------------------------------------------------------------
// blowup: amplified boxed ground state crosses into the blow-up set.
// ---------------------------------------------------------------------------

void run_blowup(Config& cfg, const std::string& out, Summary& s) {
  (void)cfg.get_u64("seed", 1);
  const int n = require_grid_n(cfg, "n", 64);
  const double half = require_positive(cfg, "half_length", 80.0);
  const double R = require_positive(cfg, "cutoff_radius", half / 4.0);
  const double amplitude = require_positive(cfg, "amplitude", 1.2);
  const double dt = require_positive(cfg, "dt", 0.1);
  const double T = require_positive(cfg, "T", 20.0);
  const double sample_dt = require_positive(cfg, "sample_dt", 0.1);
  const double lambda = cfg.get_double("lambda", 1.0);
  const double threshold = require_positive(cfg, "threshold", 1e6);
  if (2.0 * R > half)
    throw ConfigError("cutoff_radius",
                      "key `cutoff_radius`: cutoff support 2R must fit in the "
                      "box half-length");
  finish_validation(cfg, "blowup", out, 2.0 * half);

  const GridSpec g(3, n, half);
  StatePair s0(boxed_profile(g, amplitude, R), Field(g, /*real=*/true), 0.0);

  const Classification cls = classify(s0, 3);
  s.check(cls.cls == SetClass::InB,
          "seed is classified inside the blow-up set",
          "E = " + fmt(cls.E) + ", K = " + fmt(cls.K) + ", mu = " +
              fmt(cls.mu));

  IntegrateOpts iopts;
  iopts.sample_dt = sample_dt;
  iopts.blowup_threshold = threshold;
  const Trajectory traj = integrate_nldw(s0, T, dt, lambda, iopts);
  const MonitorSeries ms = monitor_series(traj, 3);
  {
    std::ofstream csv(out + "/monitor.csv", std::ios::binary);
    write_monitor_csv(csv, ms);
  }

  const double t_last = ms.t.back();
  s.check(traj.blowup && t_last < T, "run halts with the blow-up flag",
          "halted at t = " + fmt(t_last) + ", estimate " +
              fmt(traj.blowup_time_estimate));
  s.check(std::isfinite(traj.blowup_time_estimate) &&
              traj.blowup_time_estimate >= t_last - 1e-9 &&
              traj.blowup_time_estimate < T,
          "blow-up time estimate is finite and at/after the halt",
          "estimate = " + fmt(traj.blowup_time_estimate));

  bool k_neg = true;
  for (double k : ms.K) k_neg = k_neg && (k < 0.0);
  s.check(k_neg, "Nehari functional stays negative at every sample",
          "max K = " + fmt(*std::max_element(ms.K.begin(), ms.K.end())));

  s.check(ms.trusted_until >= 1, "at least two samples are trusted",
          "trusted through sample " + std::to_string(ms.trusted_until));

  bool f_ok = std::isfinite(ms.F_onset);
  if (f_ok) {
    for (std::size_t k = 0; k <= ms.trusted_until; ++k)
      if (ms.t[k] >= ms.F_onset - 1e-12) f_ok = f_ok && (ms.F[k] > 0.0);
  }
  s.check(f_ok, "concavity drive F is positive from its onset on",
          "onset t = " + fmt(ms.F_onset));

  bool r_ok = std::isfinite(ms.ratio_onset);
  if (r_ok) {
    double prev = kInf;
    for (std::size_t k = 0; k <= ms.trusted_until; ++k) {
      if (ms.t[k] < ms.ratio_onset - 1e-12) continue;
      r_ok = r_ok && (ms.ratio[k] <= prev);
      prev = ms.ratio[k];
    }
  }
  s.check(r_ok, "depth-to-size ratio is non-increasing from its onset on",
          "onset t = " + fmt(ms.ratio_onset));
}

// ---------------------------------------------------------------------------
// odi-demo: the escape differential inequality, standalone or seeded from a run
// from a blow-up trajectory's monitor values.
// ---------------------------------------------------------------------------

void run_odi_demo(Config& cfg, const std::string& out, Summary& s) {
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const std::string source = cfg.get_string("source", "manual");
  const double rel_tol = require_positive(cfg, "rel_tol", 1e-10);
  if (source != "manual" && source != "nldw-run")
    throw ConfigError("source",
                      "key `source`: must be `manual` or `nldw-run`");
  (void)seed;

  OdiProblem p;
  MonitorSeries ms;
  bool have_run = false;

  if (source == "manual") {
    p.C = require_positive(cfg, "C", 1.0);
    p.gamma = cfg.get_double("gamma", 2.0);
    p.h0 = require_positive(cfg, "h0", 2.0);
    p.h1 = require_positive(cfg, "h1", 1.0);
    p.threshold = require_positive(cfg, "threshold", 1e6);
    p.t_max = require_positive(cfg, "t_max", 100.0);
    if (!(p.gamma > 1.0))
      throw ConfigError("gamma", "key `gamma`: must exceed 1");
    finish_validation(cfg, "odi-demo", out, kInf);
  } else {
    const int n = require_grid_n(cfg, "n", 32);
    const double half = require_positive(cfg, "half_length", 50.0);
    const double R = require_positive(cfg, "cutoff_radius", half / 4.0);
    const double amplitude = require_positive(cfg, "amplitude", 1.2);
    const double dt = require_positive(cfg, "dt", 0.05);
    const double T = require_positive(cfg, "T", 20.0);
    const double sample_dt = require_positive(cfg, "sample_dt", 0.1);
    p.threshold = require_positive(cfg, "threshold", 1e6);
    p.t_max = require_positive(cfg, "t_max", 100.0);
    finish_validation(cfg, "odi-demo", out, kInf);

    const GridSpec g(3, n, half);
    StatePair s0(boxed_profile(g, amplitude, R), Field(g, /*real=*/true), 0.0);
    IntegrateOpts iopts;
    iopts.sample_dt = sample_dt;
    const Trajectory traj = integrate_nldw(s0, T, dt, 1.0, iopts);
    ms = monitor_series(traj, 3);
    have_run = true;
    {
      std::ofstream csv(out + "/monitor.csv", std::ios::binary);
      write_monitor_csv(csv, ms);
    }
    s.check(traj.blowup, "seeding trajectory halts with the blow-up flag", "");
    s.check(std::isfinite(ms.F_onset), "concavity onset found",
            "onset t = " + fmt(ms.F_onset));
    if (!traj.blowup || !std::isfinite(ms.F_onset)) return;

    // Export at the deepest trusted sample: the hypotheses hold from the
    // onsets on, and the drive (depth over size^2) only strengthens with
    // time, so the last trusted row gives the representative instance. The
    // coefficient carries the full 2d/(d-2) = 6 factor of the d = 3
    // functional identity; gamma = (d-1)/(d-2) = 2 is the size power.
    const std::size_t k1 = ms.trusted_until;
    s.check(ms.t[k1] >= ms.F_onset && std::isfinite(ms.ratio_onset) &&
                ms.t[k1] >= ms.ratio_onset,
            "export sample lies past both monitor onsets",
            "t1 = " + fmt(ms.t[k1]));
    p.C = 6.0 * std::abs(ms.ratio[k1]);
    p.gamma = 2.0;
    p.h0 = ms.I[k1];
    p.h1 = ms.Iprime[k1];
    s.check(p.C > 0 && p.h0 > 0 && p.h1 > 0,
            "extracted coefficients satisfy the escape-inequality hypotheses",
            "C = " + fmt(p.C) + ", h0 = " + fmt(p.h0) + ", h1 = " +
                fmt(p.h1));
  }

  const OdiResult r1 = integrate_odi(p, rel_tol);
  const OdiResult r2 = integrate_odi(p, rel_tol / 2.0);
  {
    std::ofstream csv(out + "/odi.csv", std::ios::binary);
    std::vector<std::pair<OdiProblem, OdiResult>> rows{{p, r1}, {p, r2}};
    write_odi_csv(csv, rows);
  }

  s.check(r1.outcome == OdiOutcome::BlowUp,
          "trajectory escapes to the threshold",
          "t_escape = " + fmt(r1.t_escape) +
              (r1.reason.empty() ? "" : " (" + r1.reason + ")"));
  s.check(r1.g_drift <= 1e-8, "relative energy drift at most 1e-8",
          "drift = " + fmt(r1.g_drift));
  s.check(r2.outcome == OdiOutcome::BlowUp &&
              std::abs(r1.t_escape - r2.t_escape) <= 1e-6,
          "escape time stable to 1e-6 under tolerance halving",
          "delta = " + fmt(std::abs(r1.t_escape - r2.t_escape)));
  if (source == "manual" && p.C == 1.0 && p.gamma == 2.0 && p.h0 == 2.0 &&
      p.h1 == 1.0 && p.threshold == 1e6) {
    // Reference escape time for (C, gamma, h0, h1) = (1, 2, 2, 1): the
    // conserved-quantity quadrature evaluated to 30 digits, cross-checked by
    // Richardson-extrapolated fixed-step integration.
    const double t_ref = 2.129689121557039;
    s.check(std::abs(r1.t_escape - t_ref) <= 1e-6,
            "escape time matches the time-stepping-free reference",
            "measured " + fmt(r1.t_escape) + ", reference " + fmt(t_ref));
  }
  if (have_run) {
    s.check(r1.outcome == OdiOutcome::BlowUp && r1.t_escape < p.t_max,
            "seeded comparison trajectory escapes before the horizon",
            "t_escape = " + fmt(r1.t_escape));
  }
}

using KindFn = void (*)(Config&, const std::string&, Summary&);

const std::map<std::string, KindFn>& kind_table() {
  static const std::map<std::string, KindFn> table = {
      {"exponents-table", run_exponents_table},
      {"decay-fit", run_decay_fit},
      {"strichartz-ratio", run_strichartz_ratio},
      {"linear-highfreq", run_linear_highfreq},
      {"lwp-contraction", run_lwp_contraction},
      {"global-decay", run_global_decay},
      {"blowup", run_blowup},
      {"odi-demo", run_odi_demo},
  };
  return table;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : base_(mix64(seed * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull) ^
            mix64(stream * 0x2545F4914F6CDD1Dull + 0x9E3779B97F4A7C15ull)) {}

std::uint64_t CounterRng::word(std::uint64_t i) const {
  return mix64(base_ + (i + 1) * 0x9E3779B97F4A7C15ull);
}

double CounterRng::uniform(std::uint64_t i) const {
  return static_cast<double>(word(i) >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t i) const {
  const double a = uniform(2 * i);
  const double b = uniform(2 * i + 1);
  return std::sqrt(-2.0 * std::log1p(-a)) * std::cos(2.0 * kPi * b);
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> v;
    for (const auto& [k, fn] : kind_table()) v.push_back(k);
    return v;
  }();
  return kinds;
}

bool known_kind(const std::string& kind) {
  return kind_table().count(kind) != 0;
}

ExperimentResult run_experiment(const std::string& kind, Config cfg,
                                const std::string& out_dir) {
  const auto& table = kind_table();
  const auto it = table.find(kind);
  if (it == table.end()) {
    std::string msg = "unknown experiment kind `" + kind + "`; known kinds:";
    for (const auto& k : experiment_kinds()) msg += " " + k;
    throw ConfigError("kind", msg);
  }
  const std::string ckind = cfg.get_string("kind", kind);
  if (ckind != kind)
    throw ConfigError("kind", "config kind `" + ckind +
                                  "` does not match requested kind `" + kind +
                                  "`");

  Summary s;
  try {
    it->second(cfg, out_dir, s);
  } catch (const ConfigError&) {
    throw;  // validation problem: nothing has been written yet
  } catch (const std::exception& e) {
    s.check(false, "run completed without runtime errors",
            std::string("exception: ") + e.what());
  }

  ExperimentResult res;
  res.passed = s.ok;
  res.exit_code = s.ok ? 0 : 2;
  res.summary = s.text + (s.ok ? "RESULT: PASS\n" : "RESULT: FAIL\n");
  write_file(out_dir + "/summary.txt", res.summary);
  return res;
}

}  // namespace dwlab
