#include "nwtd/compute/serial.hpp"

#include <cmath>

#include "nwtd/kernels.hpp"

namespace nwtd::serial {

namespace {

double gauss_var(double d, double v) { return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * M_PI * v); }

}  // namespace

std::vector<double> smooth_1d(std::span<const double> points, double h,
                              std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (double p : points) out[j] += gauss_scaled(h, p - grid[j]);
    out[j] /= static_cast<double>(points.size());
  }
  return out;
}

std::vector<double> smooth_2d(std::span<const double> from, std::span<const double> to, double h1,
                              double h2, std::span<const double> gx, std::span<const double> gy) {
  std::vector<double> out(gx.size() * gy.size(), 0.0);
  for (std::size_t j = 0; j < gx.size(); ++j) {
    for (std::size_t k = 0; k < gy.size(); ++k) {
      double acc = 0.0;
      for (std::size_t p = 0; p < from.size(); ++p) {
        acc += gauss_scaled(h1, from[p] - gx[j]) * gauss_scaled(h2, to[p] - gy[k]);
      }
      out[j * gy.size() + k] = acc / static_cast<double>(from.size());
    }
  }
  return out;
}

std::vector<double> same_copy_sums(const PairSample& sample, Axes axes, std::size_t stride,
                                   std::span<const Variances> variances) {
  std::vector<double> out(variances.size(), 0.0);
  for (std::size_t v = 0; v < variances.size(); ++v) {
    for (std::size_t i = 0; i < sample.n_copies; ++i) {
      const auto xs = sample.from_copy(i);
      const auto ys = sample.to_copy(i);
      for (std::size_t s = 0; s < sample.n_time; s += stride) {
        for (std::size_t u = 0; u < sample.n_time; u += stride) {
          double term = gauss_var(xs[s] - xs[u], variances[v].vx);
          if (axes == Axes::xy) term *= gauss_var(ys[s] - ys[u], variances[v].vy);
          out[v] += term;
        }
      }
    }
  }
  return out;
}

std::vector<double> cross_sums(const PairSample& sample, Axes axes,
                               std::span<const Variances> variances) {
  std::vector<double> out(variances.size(), 0.0);
  const std::size_t n = sample.size();
  for (std::size_t v = 0; v < variances.size(); ++v) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        double term = gauss_var(sample.from[p] - sample.from[q], variances[v].vx);
        if (axes == Axes::xy) term *= gauss_var(sample.to[p] - sample.to[q], variances[v].vy);
        out[v] += term;
      }
    }
  }
  return out;
}

}  // namespace nwtd::serial
