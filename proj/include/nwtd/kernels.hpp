#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace nwtd {

enum class KernelFamily { gaussian };

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
};

/// Kernel scale h in (0, 1].
class Bandwidth {
 public:
  explicit Bandwidth(double value);
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
};

/// Strictly increasing, nonempty set of candidate bandwidths.
class BandwidthGrid {
 public:
  explicit BandwidthGrid(std::vector<double> values);

  /// {step * k ; k = 1..count}
  static BandwidthGrid arithmetic(double step, int count);

  const std::vector<double>& values() const noexcept { return values_; }
  double h0() const noexcept { return values_.front(); }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const BandwidthGrid&, const BandwidthGrid&) = default;

 private:
  std::vector<double> values_;
};

using BandwidthPair = std::pair<double, double>;

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double kernel_eval(const KernelSpec& spec, double u);
double kernel_scaled(const KernelSpec& spec, Bandwidth h, double u);

// Gaussian-only helpers on raw doubles; callers are responsible for h > 0.
inline double gauss_kernel(double u) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

inline double gauss_scaled(double h, double u) noexcept {
  const double z = u / h;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z) / h;
}

/// (K_{h1} * K_{h2})(x) for the Gaussian kernel: the N(0, h1^2 + h2^2) density.
double kernel_conv(Bandwidth h1, Bandwidth h2, double x);

/// Q_h(dx, dy) = K_{h1}(dx) K_{h2}(dy).
double product_kernel(Bandwidth h1, Bandwidth h2, double dx, double dy);

}  // namespace nwtd
