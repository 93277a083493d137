#include "nwtd/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nwtd/error.hpp"

namespace nwtd {

Bandwidth::Bandwidth(double value) : value_(value) {
  if (!(value > 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << "bandwidth must lie in (0, 1], got " << value;
    throw std::domain_error(msg.str());
  }
}

BandwidthGrid::BandwidthGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ConfigError("bandwidth grid is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    Bandwidth check(values_[k]);
    (void)check;
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw ConfigError("bandwidth grid must be strictly increasing");
    }
  }
}

BandwidthGrid BandwidthGrid::arithmetic(double step, int count) {
  if (count < 1) throw ConfigError("bandwidth grid needs at least one value");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) v.push_back(step * k);
  return BandwidthGrid(std::move(v));
}

double kernel_eval(const KernelSpec& spec, double u) {
  if (!std::isfinite(u)) throw std::domain_error("kernel argument must be finite");
  switch (spec.family) {
    case KernelFamily::gaussian:
      return gauss_kernel(u);
  }
  throw std::logic_error("unknown kernel family");
}

double kernel_scaled(const KernelSpec& spec, Bandwidth h, double u) {
  return kernel_eval(spec, u / h.value()) / h.value();
}

double kernel_conv(Bandwidth h1, Bandwidth h2, double x) {
  const double var = h1.value() * h1.value() + h2.value() * h2.value();
  return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double product_kernel(Bandwidth h1, Bandwidth h2, double dx, double dy) {
  const KernelSpec spec;
  return kernel_scaled(spec, h1, dx) * kernel_scaled(spec, h2, dy);
}

}  // namespace nwtd
