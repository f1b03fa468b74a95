#include "dwlab/field.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "field dump assumes a little-endian host");

namespace dwlab {

StatePair::StatePair(Field u_, Field v_, double t)
    : u(std::move(u_)), v(std::move(v_)), time(t) {
  if (!(u.grid == v.grid))
    throw std::invalid_argument("StatePair: components live on different grids");
}

// --- FFT backend -------------------------------------------------------------
// One in-place plan per (d, n, sign), cached per thread; FFTW plan creation is
// not thread-safe and is serialized by a global mutex. Data is staged through
// the plan's own fftw_malloc'd buffer so alignment always matches the plan.

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanSlot {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
  std::size_t count = 0;

  PlanSlot() = default;
  PlanSlot(const PlanSlot&) = delete;
  PlanSlot& operator=(const PlanSlot&) = delete;
  PlanSlot(PlanSlot&& o) noexcept : plan(o.plan), buf(o.buf), count(o.count) {
    o.plan = nullptr;
    o.buf = nullptr;
  }
  ~PlanSlot() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

PlanSlot& get_plan(const GridSpec& g, int sign) {
  thread_local std::map<std::tuple<int, int, int>, PlanSlot> cache;
  const auto key = std::make_tuple(g.d, g.n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanSlot slot;
  slot.count = g.points();
  slot.buf = fftw_alloc_complex(slot.count);
  if (!slot.buf) throw std::bad_alloc();
  int dims[3] = {g.n, g.n, g.n};
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    slot.plan = fftw_plan_dft(g.d, dims, slot.buf, slot.buf, sign, FFTW_ESTIMATE);
  }
  if (!slot.plan) throw std::runtime_error("fft: plan creation failed");
  return cache.emplace(key, std::move(slot)).first->second;
}

void run_plan(const GridSpec& g, int sign, const std::vector<cplx>& in,
              std::vector<cplx>& out, double scale) {
  PlanSlot& slot = get_plan(g, sign);
  std::memcpy(slot.buf, in.data(), slot.count * sizeof(cplx));
  fftw_execute(slot.plan);
  const cplx* res = reinterpret_cast<const cplx*>(slot.buf);
  for (std::size_t i = 0; i < slot.count; ++i) out[i] = res[i] * scale;
}

}  // namespace

Spectrum fft_forward(const Field& f) {
  Spectrum s(f.grid, f.real_tag);
  const double volume = std::pow(2.0 * f.grid.half_length, f.grid.d);
  const double scale = std::sqrt(volume) / static_cast<double>(f.grid.points());
  run_plan(f.grid, FFTW_FORWARD, f.v, s.v, scale);
  return s;
}

Field fft_inverse(const Spectrum& s) {
  Field f(s.grid, s.real_tag);
  const double volume = std::pow(2.0 * s.grid.half_length, s.grid.d);
  const double scale = 1.0 / std::sqrt(volume);
  run_plan(s.grid, FFTW_BACKWARD, s.v, f.v, scale);
  return f;
}

Field sample_field(const GridSpec& g, const std::function<cplx(const double*)>& fn,
                   bool real_tag) {
  Field f(g, real_tag);
  double x[3] = {0, 0, 0};
  std::size_t idx = 0;
  const int n = g.n;
  const int n1 = g.d >= 2 ? n : 1;
  const int n2 = g.d >= 3 ? n : 1;
  for (int j0 = 0; j0 < n; ++j0) {
    x[0] = g.axis_coord(j0);
    for (int j1 = 0; j1 < n1; ++j1) {
      if (g.d >= 2) x[1] = g.axis_coord(j1);
      for (int j2 = 0; j2 < n2; ++j2) {
        if (g.d >= 3) x[2] = g.axis_coord(j2);
        f.v[idx++] = fn(x);
      }
    }
  }
  return f;
}

void for_each_mode(const GridSpec& g, const std::function<void(std::size_t, double)>& fn) {
  const int n = g.n;
  const int n1 = g.d >= 2 ? n : 1;
  const int n2 = g.d >= 3 ? n : 1;
  std::vector<double> xi2(n);
  for (int k = 0; k < n; ++k) {
    const double xi = g.axis_freq(k);
    xi2[k] = xi * xi;
  }
  std::size_t idx = 0;
  for (int k0 = 0; k0 < n; ++k0)
    for (int k1 = 0; k1 < n1; ++k1) {
      const double base = xi2[k0] + (g.d >= 2 ? xi2[k1] : 0.0);
      for (int k2 = 0; k2 < n2; ++k2)
        fn(idx++, std::sqrt(base + (g.d >= 3 ? xi2[k2] : 0.0)));
    }
}

Spectrum apply_radial_multiplier(const Spectrum& s,
                                 const std::function<double(double)>& m) {
  Spectrum out(s.grid, s.real_tag);
  for_each_mode(s.grid, [&](std::size_t i, double rho) { out.v[i] = s.v[i] * m(rho); });
  return out;
}

// --- cutoffs -----------------------------------------------------------------

double smooth_psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double chi_le1(double s) {
  const double a = std::fabs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = smooth_psi(2.0 - a);
  return up / (up + smooth_psi(a - 1.0));
}

// --- projections -------------------------------------------------------------

Spectrum project(const Spectrum& s, Band band) {
  Spectrum out(s.grid, s.real_tag);
  if (band == Band::Low) {
    for_each_mode(s.grid,
                  [&](std::size_t i, double rho) { out.v[i] = s.v[i] * chi_le1(rho); });
  } else {
    // Difference form keeps Low + High an exact partition of the input.
    for_each_mode(s.grid, [&](std::size_t i, double rho) {
      out.v[i] = s.v[i] - s.v[i] * chi_le1(rho);
    });
  }
  return out;
}

Field project(const Field& f, Band band) { return fft_inverse(project(fft_forward(f), band)); }

namespace {

void check_dyadic_scale(const GridSpec& g, double N) {
  int exp = 0;
  const double mant = std::frexp(N, &exp);
  if (!(N > 0.0) || mant != 0.5)
    throw std::invalid_argument("project_dyadic: scale must be a power of two");
  if (N > g.nyquist() || N < g.freq_spacing())
    throw std::invalid_argument(
        "project_dyadic: scale outside [freq_spacing, nyquist] for this grid");
}

}  // namespace

Spectrum project_dyadic(const Spectrum& s, double N) {
  check_dyadic_scale(s.grid, N);
  Spectrum out(s.grid, s.real_tag);
  for_each_mode(s.grid, [&](std::size_t i, double rho) {
    out.v[i] = s.v[i] * (chi_le1(rho / N) - chi_le1(2.0 * rho / N));
  });
  return out;
}

Field project_dyadic(const Field& f, double N) {
  return fft_inverse(project_dyadic(fft_forward(f), N));
}

std::vector<double> dyadic_scales(const GridSpec& g) {
  std::vector<double> scales;
  for (double N = std::exp2(std::ceil(std::log2(g.freq_spacing()))); N <= g.nyquist();
       N *= 2.0)
    scales.push_back(N);
  return scales;
}

// --- binary dump -------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'D', 'W', 'F', '1'};
}

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os.write(kMagic, 4);
  const std::uint32_t head[4] = {static_cast<std::uint32_t>(f.grid.d),
                                 static_cast<std::uint32_t>(f.grid.n), 0u,
                                 f.real_tag ? 1u : 0u};
  os.write(reinterpret_cast<const char*>(head), sizeof(head));
  os.write(reinterpret_cast<const char*>(&f.grid.half_length), sizeof(double));
  os.write(reinterpret_cast<const char*>(f.v.data()),
           static_cast<std::streamsize>(f.v.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write_field: short write to " + path);
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_field: bad magic in " + path);
  std::uint32_t head[4];
  is.read(reinterpret_cast<char*>(head), sizeof(head));
  double half_length = 0.0;
  is.read(reinterpret_cast<char*>(&half_length), sizeof(double));
  if (!is) throw std::runtime_error("read_field: truncated header in " + path);
  GridSpec g(static_cast<int>(head[0]), static_cast<int>(head[1]), half_length);
  Field f(g, (head[3] & 1u) != 0);
  is.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_field: truncated payload in " + path);
  return f;
}

}  // namespace dwlab
