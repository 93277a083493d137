#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "nwtd/compute/parallel.hpp"

namespace nwtd::parallel {

namespace {

constexpr std::size_t kCopiesPerChunk = 64;
constexpr std::size_t kRowsPerChunk = 256;

/// Bins of squared distance with power sums of (rho - centre) up to kOrder.
/// Bin 0 holds rho < rho_lo and is expanded around zero; the remaining bins
/// are cut on the top mantissa bits of rho, 2^kMantissaBits per octave.
class MomentHistogram {
 public:
  static constexpr int kOrder = 5;
  static constexpr int kMantissaBits = 8;
  static constexpr int kShift = 52 - kMantissaBits;
  static constexpr std::size_t kStride = kOrder + 1;

  MomentHistogram(double rho_lo, double rho_max) : rho_lo_(rho_lo) {
    base_ = std::bit_cast<std::uint64_t>(rho_lo) >> kShift;
    const std::uint64_t top = std::bit_cast<std::uint64_t>(std::max(rho_max, rho_lo)) >> kShift;
    n_bins_ = static_cast<std::size_t>(top - base_) + 3;
    centres_.resize(n_bins_);
    centres_[0] = 0.0;
    for (std::size_t b = 1; b < n_bins_; ++b) {
      const std::uint64_t key = base_ + (b - 1);
      const double lo = std::bit_cast<double>(key << kShift);
      const double hi = std::bit_cast<double>((key + 1) << kShift);
      centres_[b] = 0.5 * (lo + hi);
    }
    moments_.assign(n_bins_ * kStride, 0.0);
  }

  void clear() {
    std::fill(moments_.begin(), moments_.end(), 0.0);
    used_lo_ = n_bins_;
    used_hi_ = 0;
  }

  void add(double rho) {
    std::size_t b = 0;
    if (rho >= rho_lo_) {
      b = static_cast<std::size_t>((std::bit_cast<std::uint64_t>(rho) >> kShift) - base_) + 1;
      b = std::min(b, n_bins_ - 1);
    }
    used_lo_ = std::min(used_lo_, b);
    used_hi_ = std::max(used_hi_, b);
    const double d = rho - centres_[b];
    double* m = moments_.data() + b * kStride;
    double pw = 1.0;
    for (std::size_t k = 0; k < kStride; ++k) {
      m[k] += pw;
      pw *= d;
    }
  }

  /// acc[v] += sum over pairs of exp(-rho * a[v]).
  void accumulate(std::span<const double> a, std::span<double> acc) const {
    for (std::size_t v = 0; v < a.size(); ++v) {
      const double neg = -a[v];
      double total = 0.0;
      for (std::size_t b = used_lo_; b <= used_hi_ && b < n_bins_; ++b) {
        const double* m = moments_.data() + b * kStride;
        if (m[0] == 0.0) continue;
        double poly = m[kOrder];
        for (int k = kOrder; k >= 1; --k) poly = m[k - 1] + neg / k * poly;
        total += std::exp(neg * centres_[b]) * poly;
      }
      acc[v] += total;
    }
  }

 private:
  double rho_lo_;
  std::uint64_t base_ = 0;
  std::size_t n_bins_ = 0;
  std::size_t used_lo_ = 0;
  std::size_t used_hi_ = 0;
  std::vector<double> centres_;
  std::vector<double> moments_;
};

double squared_range(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double r = *hi - *lo;
  return r * r;
}

double normaliser(double v, Axes axes) {
  return axes == Axes::x ? 1.0 / std::sqrt(2.0 * M_PI * v) : 1.0 / (2.0 * M_PI * v);
}

void check_sample(const PairSample& sample, std::size_t stride) {
  if (sample.empty()) throw std::invalid_argument("pair sums need a nonempty sample");
  if (stride < 1) throw std::invalid_argument("time subsample stride must be at least 1");
}

std::vector<std::size_t> subsampled_times(std::size_t n_time, std::size_t stride) {
  std::vector<std::size_t> idx;
  for (std::size_t s = 0; s < n_time; s += stride) idx.push_back(s);
  return idx;
}

}  // namespace

std::vector<double> same_copy_sums(const PairSample& sample, Axes axes, std::size_t stride,
                                   std::span<const Variances> variances) {
  check_sample(sample, stride);
  if (variances.empty()) return {};
  const bool isotropic = axes == Axes::x || std::all_of(variances.begin(), variances.end(),
                                                         [](const Variances& v) { return v.vx == v.vy; });
  if (!isotropic) return same_copy_sums_direct(sample, axes, stride, variances);

  double v_min = variances.front().vx;
  std::vector<double> a(variances.size());
  for (std::size_t v = 0; v < variances.size(); ++v) {
    if (!(variances[v].vx > 0.0)) throw std::domain_error("pair sum variances must be positive");
    v_min = std::min(v_min, variances[v].vx);
    a[v] = 1.0 / (2.0 * variances[v].vx);
  }
  double rho_max = squared_range(sample.from);
  if (axes == Axes::xy) rho_max += squared_range(sample.to);
  const double rho_lo = std::ldexp(v_min, -30);
  rho_max = rho_max * 1.01 + rho_lo;

  const auto times = subsampled_times(sample.n_time, stride);
  const std::size_t n_sub = times.size();
  const std::size_t n_chunks = (sample.n_copies + kCopiesPerChunk - 1) / kCopiesPerChunk;
  std::vector<std::vector<double>> partials(n_chunks);

#pragma omp parallel
  {
    MomentHistogram hist(rho_lo, rho_max);
    std::vector<double> xs(n_sub), ys(n_sub);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      hist.clear();
      const std::size_t first = static_cast<std::size_t>(c) * kCopiesPerChunk;
      const std::size_t last = std::min(sample.n_copies, first + kCopiesPerChunk);
      for (std::size_t i = first; i < last; ++i) {
        const auto fx = sample.from_copy(i);
        const auto fy = sample.to_copy(i);
        for (std::size_t s = 0; s < n_sub; ++s) {
          xs[s] = fx[times[s]];
          ys[s] = fy[times[s]];
        }
        for (std::size_t s = 0; s < n_sub; ++s) {
          for (std::size_t u = s + 1; u < n_sub; ++u) {
            const double dx = xs[s] - xs[u];
            double rho = dx * dx;
            if (axes == Axes::xy) {
              const double dy = ys[s] - ys[u];
              rho += dy * dy;
            }
            hist.add(rho);
          }
        }
      }
      std::vector<double> off(variances.size(), 0.0);
      hist.accumulate(a, off);
      const double diag = static_cast<double>((last - first) * n_sub);
      auto& dst = partials[static_cast<std::size_t>(c)];
      dst.resize(variances.size());
      for (std::size_t v = 0; v < variances.size(); ++v) {
        dst[v] = (diag + 2.0 * off[v]) * normaliser(variances[v].vx, axes);
      }
    }
  }
  return compute::pairwise_sum_blocks(partials);
}

std::vector<double> same_copy_sums_direct(const PairSample& sample, Axes axes,
                                          std::size_t stride,
                                          std::span<const Variances> variances) {
  check_sample(sample, stride);
  if (variances.empty()) return {};
  const auto times = subsampled_times(sample.n_time, stride);
  const std::size_t n_sub = times.size();
  const std::size_t n_chunks = (sample.n_copies + kCopiesPerChunk - 1) / kCopiesPerChunk;
  const std::size_t nv = variances.size();
  std::vector<std::vector<double>> partials(n_chunks);

#pragma omp parallel
  {
    std::vector<double> xs(n_sub), ys(n_sub);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      const std::size_t first = static_cast<std::size_t>(c) * kCopiesPerChunk;
      const std::size_t last = std::min(sample.n_copies, first + kCopiesPerChunk);
      std::vector<double> off(nv, 0.0);
      for (std::size_t i = first; i < last; ++i) {
        const auto fx = sample.from_copy(i);
        const auto fy = sample.to_copy(i);
        for (std::size_t s = 0; s < n_sub; ++s) {
          xs[s] = fx[times[s]];
          ys[s] = fy[times[s]];
        }
        for (std::size_t s = 0; s < n_sub; ++s) {
          for (std::size_t u = s + 1; u < n_sub; ++u) {
            const double dx = xs[s] - xs[u];
            const double dy = ys[s] - ys[u];
            for (std::size_t v = 0; v < nv; ++v) {
              double e = -dx * dx / (2.0 * variances[v].vx);
              if (axes == Axes::xy) e -= dy * dy / (2.0 * variances[v].vy);
              off[v] += std::exp(e);
            }
          }
        }
      }
      const double diag = static_cast<double>((last - first) * n_sub);
      auto& dst = partials[static_cast<std::size_t>(c)];
      dst.resize(nv);
      for (std::size_t v = 0; v < nv; ++v) {
        double norm = 1.0 / std::sqrt(2.0 * M_PI * variances[v].vx);
        if (axes == Axes::xy) norm /= std::sqrt(2.0 * M_PI * variances[v].vy);
        dst[v] = (diag + 2.0 * off[v]) * norm;
      }
    }
  }
  return compute::pairwise_sum_blocks(partials);
}

std::vector<double> cross_sums_direct(const PairSample& sample, Axes axes,
                                      std::span<const Variances> variances) {
  check_sample(sample, 1);
  if (variances.empty()) return {};
  const std::size_t n = sample.size();
  const std::size_t nv = variances.size();
  const std::size_t n_chunks = (n + kRowsPerChunk - 1) / kRowsPerChunk;
  std::vector<std::vector<double>> partials(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t first = static_cast<std::size_t>(c) * kRowsPerChunk;
    const std::size_t last = std::min(n, first + kRowsPerChunk);
    std::vector<double> acc(nv, 0.0);
    for (std::size_t p = first; p < last; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        const double dx = sample.from[p] - sample.from[q];
        const double dy = sample.to[p] - sample.to[q];
        for (std::size_t v = 0; v < nv; ++v) {
          double e = -dx * dx / (2.0 * variances[v].vx);
          if (axes == Axes::xy) e -= dy * dy / (2.0 * variances[v].vy);
          acc[v] += std::exp(e);
        }
      }
    }
    auto& dst = partials[static_cast<std::size_t>(c)];
    dst.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      double norm = 1.0 / std::sqrt(2.0 * M_PI * variances[v].vx);
      if (axes == Axes::xy) norm /= std::sqrt(2.0 * M_PI * variances[v].vy);
      dst[v] = acc[v] * norm;
    }
  }
  return compute::pairwise_sum_blocks(partials);
}

}  // namespace nwtd::parallel
