#include "nwtd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nwtd/compute/common.hpp"

namespace nwtd {

double quantile(std::span<const double> sample, double level) {
  if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  std::vector<double> v(sample.begin(), sample.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

double mean(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("mean of an empty sample");
  return compute::pairwise_sum(sample) / static_cast<double>(sample.size());
}

double sample_sd(std::span<const double> sample) {
  if (sample.size() < 2) return 0.0;
  const double mu = mean(sample);
  std::vector<double> sq(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) sq[k] = (sample[k] - mu) * (sample[k] - mu);
  return std::sqrt(compute::pairwise_sum(sq) / static_cast<double>(sample.size() - 1));
}

double median(std::span<const double> sample) { return quantile(sample, 0.5); }

}  // namespace nwtd
