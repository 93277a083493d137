#pragma once

#include <span>

namespace nwtd {

/// Empirical quantile, linear interpolation between order statistics at
/// zero-based position (n - 1) * level.
double quantile(std::span<const double> sample, double level);

double mean(std::span<const double> sample);

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_sd(std::span<const double> sample);

double median(std::span<const double> sample);

}  // namespace nwtd
