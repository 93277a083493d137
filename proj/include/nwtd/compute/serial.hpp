#pragma once

#include <span>
#include <vector>

#include "nwtd/compute/common.hpp"
#include "nwtd/diffusion.hpp"

/// Straight-loop reference kernels. Slow; they exist so the parallel
/// kernels can be checked against something with no clever structure.
namespace nwtd::serial {

using compute::Axes;
using compute::Variances;

/// out[j] = (1/P) sum_p K_h(points[p] - grid[j])
std::vector<double> smooth_1d(std::span<const double> points, double h,
                              std::span<const double> grid);

/// out[j * My + k] = (1/P) sum_p K_h1(from[p] - gx[j]) K_h2(to[p] - gy[k])
std::vector<double> smooth_2d(std::span<const double> from, std::span<const double> to, double h1,
                              double h2, std::span<const double> gx, std::span<const double> gy);

/// For each variance pair: sum over copies i and subsampled time pairs (s, u)
/// of G_vx(X_s - X_u) [* G_vy(Y_s - Y_u)] (ordered pairs, diagonal included).
std::vector<double> same_copy_sums(const PairSample& sample, Axes axes, std::size_t stride,
                                   std::span<const Variances> variances);

/// Same, but over all ordered pairs of sample points regardless of copy.
std::vector<double> cross_sums(const PairSample& sample, Axes axes,
                               std::span<const Variances> variances);

}  // namespace nwtd::serial
