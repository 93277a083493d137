// All-pairs Gaussian sums through the Fourier domain.
//
// For points X_p and variance v >= 2 b^2,
//   sum_{p,q} G_v(X_p - X_q) = || sum_p K_g(. - X_p) ||^2,  g^2 = v / 2,
// and the Fourier transform of sum_p K_g(. - X_p) is the transform of the
// base smoother sum_p K_b(. - X_p) times exp(-(g^2 - b^2) w^2 / 2). The base
// smoother is sampled once on a periodic mesh of width b / 1.5, one FFT gives
// its spectrum, and every requested variance costs a weighted sum over the
// power spectrum. The period exceeds the data range plus 9 standard
// deviations of G_v, so the autocorrelation does not wrap; the sampled
// spectrum aliases at relative level exp(-pi^2 * 1.5^2) ~ 2e-10.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nwtd/compute/parallel.hpp"
#include "nwtd/kernels.hpp"

namespace nwtd::parallel {

namespace {

constexpr double kMeshPerBandwidth = 1.5;
constexpr double kSpreadRadius = 9.0;
constexpr double kTailRadius = 9.0;
constexpr std::size_t kDirectBelow = 4096;
constexpr std::size_t kMaxCells = std::size_t{1} << 27;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_malloc(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

std::size_t good_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 8);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

/// One periodic axis of the spreading mesh.
struct Axis {
  double b = 0.0;       // base bandwidth
  double mesh = 0.0;    // grid spacing
  double origin = 0.0;  // coordinate of cell 0
  std::size_t cells = 0;
  int radius = 0;       // spreading half width, in cells

  Axis(std::span<const double> values, double v_min, double v_max) {
    b = std::sqrt(0.5 * v_min);
    mesh = b / kMeshPerBandwidth;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double spread = kSpreadRadius * b;
    const double period =
        (*hi - *lo) + std::max(kTailRadius * std::sqrt(v_max), 2.0 * spread) + 4.0 * mesh;
    cells = good_fft_size(static_cast<std::size_t>(std::ceil(period / mesh)));
    origin = *lo - spread - mesh;
    radius = static_cast<int>(std::ceil(spread / mesh));
  }

  /// Frequency of DFT index k.
  double omega(std::size_t k) const {
    const double signed_k = k <= cells / 2 ? static_cast<double>(k)
                                           : static_cast<double>(k) - static_cast<double>(cells);
    return 2.0 * M_PI * signed_k / (static_cast<double>(cells) * mesh);
  }

  /// Multipliers exp(-(v/2 - b^2) w_k^2) for k in [0, count).
  std::vector<double> multipliers(double v, std::size_t count) const {
    const double c = 0.5 * v - b * b;
    std::vector<double> m(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double w = omega(k);
      m[k] = std::exp(-std::max(c, 0.0) * w * w);
    }
    return m;
  }

  /// First cell and kernel weights of the base kernel around x.
  int weights(double x, double* w) const {
    const double u = (x - origin) / mesh;
    const int first = static_cast<int>(std::ceil(u)) - radius;
    for (int k = 0; k < 2 * radius + 1; ++k) {
      w[k] = gauss_scaled(b, x - (origin + (first + k) * mesh));
    }
    return first;
  }
};

std::vector<double> spectral_1d(std::span<const double> xs, std::span<const Variances> variances) {
  double v_min = variances.front().vx, v_max = v_min;
  for (const auto& v : variances) {
    v_min = std::min(v_min, v.vx);
    v_max = std::max(v_max, v.vx);
  }
  const Axis ax(xs, v_min, v_max);
  const std::size_t m = ax.cells;
  FftwBuffer in_buf(sizeof(double) * m);
  FftwBuffer out_buf(sizeof(fftw_complex) * (m / 2 + 1));
  auto* in = static_cast<double*>(in_buf.ptr);
  auto* out = static_cast<fftw_complex*>(out_buf.ptr);
  std::fill(in, in + m, 0.0);

  std::vector<double> w(2 * ax.radius + 1);
  for (double x : xs) {
    const int first = ax.weights(x, w.data());
    for (int k = 0; k < 2 * ax.radius + 1; ++k) in[first + k] += w[k];
  }

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const std::size_t half = m / 2 + 1;
  std::vector<double> power(half);
  for (std::size_t k = 0; k < half; ++k) {
    const double fold = (k == 0 || (m % 2 == 0 && k == m / 2)) ? 1.0 : 2.0;
    power[k] = fold * (out[k][0] * out[k][0] + out[k][1] * out[k][1]);
  }
  const double scale = ax.mesh / static_cast<double>(m);
  std::vector<double> result(variances.size());
  for (std::size_t v = 0; v < variances.size(); ++v) {
    const auto mult = ax.multipliers(variances[v].vx, half);
    std::vector<double> terms(half);
    for (std::size_t k = 0; k < half; ++k) terms[k] = power[k] * mult[k];
    result[v] = scale * compute::pairwise_sum(terms);
  }
  return result;
}

std::vector<double> spectral_2d(std::span<const double> xs, std::span<const double> ys,
                                std::span<const Variances> variances) {
  double vx_min = variances.front().vx, vx_max = vx_min;
  double vy_min = variances.front().vy, vy_max = vy_min;
  for (const auto& v : variances) {
    vx_min = std::min(vx_min, v.vx);
    vx_max = std::max(vx_max, v.vx);
    vy_min = std::min(vy_min, v.vy);
    vy_max = std::max(vy_max, v.vy);
  }
  const Axis ax(xs, vx_min, vx_max);
  const Axis ay(ys, vy_min, vy_max);
  const std::size_t mx = ax.cells;
  const std::size_t my = ay.cells;
  const std::size_t hy = my / 2 + 1;
  FftwBuffer in_buf(sizeof(double) * mx * my);
  FftwBuffer out_buf(sizeof(fftw_complex) * mx * hy);
  auto* in = static_cast<double*>(in_buf.ptr);
  auto* out = static_cast<fftw_complex*>(out_buf.ptr);
  const int wx_len = 2 * ax.radius + 1;
  const int wy_len = 2 * ay.radius + 1;

  std::fill(in, in + mx * my, 0.0);

  // Each thread owns a band of rows and visits points in index order, so
  // every cell accumulates in the same order for any thread count.
#pragma omp parallel
  {
    int n_threads = 1, thread = 0;
#ifdef _OPENMP
    n_threads = omp_get_num_threads();
    thread = omp_get_thread_num();
#endif
    const auto row_lo = static_cast<int>(mx * static_cast<std::size_t>(thread) / n_threads);
    const auto row_hi = static_cast<int>(mx * static_cast<std::size_t>(thread + 1) / n_threads);
    std::vector<double> wx(wx_len), wy(wy_len);
    for (std::size_t p = 0; p < xs.size(); ++p) {
      const double u = (xs[p] - ax.origin) / ax.mesh;
      const int first_row = static_cast<int>(std::ceil(u)) - ax.radius;
      if (first_row + wx_len <= row_lo || first_row >= row_hi) continue;
      ax.weights(xs[p], wx.data());
      const int first_col = ay.weights(ys[p], wy.data());
      const int r_begin = std::max(first_row, row_lo);
      const int r_end = std::min(first_row + wx_len, row_hi);
      for (int r = r_begin; r < r_end; ++r) {
        const double a = wx[r - first_row];
        double* row = in + static_cast<std::size_t>(r) * my + first_col;
        for (int c = 0; c < wy_len; ++c) row[c] += a * wy[c];
      }
    }
  }

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(static_cast<int>(mx), static_cast<int>(my), in, out,
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  // Reuse the input buffer for the folded power spectrum.
  double* power = in;
  for (std::size_t kx = 0; kx < mx; ++kx) {
    for (std::size_t ky = 0; ky < hy; ++ky) {
      const auto& z = out[kx * hy + ky];
      const double fold = (ky == 0 || (my % 2 == 0 && ky == my / 2)) ? 1.0 : 2.0;
      power[kx * hy + ky] = fold * (z[0] * z[0] + z[1] * z[1]);
    }
  }

  const double scale = ax.mesh * ay.mesh / (static_cast<double>(mx) * static_cast<double>(my));
  std::vector<double> result(variances.size());
  std::vector<double> rows(mx);
  for (std::size_t v = 0; v < variances.size(); ++v) {
    const auto mult_x = ax.multipliers(variances[v].vx, mx);
    const auto mult_y = ay.multipliers(variances[v].vy, hy);
    for (std::size_t kx = 0; kx < mx; ++kx) {
      const double* pw = power + kx * hy;
      double acc = 0.0;
      for (std::size_t ky = 0; ky < hy; ++ky) acc += pw[ky] * mult_y[ky];
      rows[kx] = acc * mult_x[kx];
    }
    result[v] = scale * compute::pairwise_sum(rows);
  }
  return result;
}

}  // namespace

std::vector<double> cross_sums(const PairSample& sample, Axes axes,
                               std::span<const Variances> variances) {
  if (sample.empty()) throw std::invalid_argument("pair sums need a nonempty sample");
  if (variances.empty()) return {};
  for (const auto& v : variances) {
    if (!(v.vx > 0.0) || (axes == Axes::xy && !(v.vy > 0.0))) {
      throw std::domain_error("pair sum variances must be positive");
    }
  }
  if (sample.size() < kDirectBelow) return cross_sums_direct(sample, axes, variances);
  if (axes == Axes::x) return spectral_1d(sample.from, variances);
  double vx_min = variances.front().vx, vy_min = variances.front().vy;
  double vx_max = vx_min, vy_max = vy_min;
  for (const auto& v : variances) {
    vx_min = std::min(vx_min, v.vx);
    vy_min = std::min(vy_min, v.vy);
    vx_max = std::max(vx_max, v.vx);
    vy_max = std::max(vy_max, v.vy);
  }
  const Axis ax(sample.from, vx_min, vx_max);
  const Axis ay(sample.to, vy_min, vy_max);
  if (ax.cells * ay.cells > kMaxCells) return cross_sums_direct(sample, axes, variances);
  return spectral_2d(sample.from, sample.to, variances);
}

std::vector<double> cross_sums_spectral(const PairSample& sample, Axes axes,
                                        std::span<const Variances> variances) {
  if (axes == Axes::x) return spectral_1d(sample.from, variances);
  return spectral_2d(sample.from, sample.to, variances);
}

}  // namespace nwtd::parallel
