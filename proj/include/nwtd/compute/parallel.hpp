#pragma once

#include <span>
#include <vector>

#include "nwtd/compute/common.hpp"
#include "nwtd/diffusion.hpp"

/// OpenMP kernels with the same contracts as nwtd::serial. Work is split into
/// chunks whose boundaries depend only on problem size, and partial results
/// are combined in chunk order, so results are identical for any thread count.
namespace nwtd::parallel {

using compute::Axes;
using compute::Variances;

std::vector<double> smooth_1d(std::span<const double> points, double h,
                              std::span<const double> grid);

/// Chunked A^T B products with A[p, j] = K_h1(from[p] - gx[j]) and
/// B[p, k] = K_h2(to[p] - gy[k]).
std::vector<double> smooth_2d(std::span<const double> from, std::span<const double> to, double h1,
                              double h2, std::span<const double> gx, std::span<const double> gy);

/// Isotropic variances (vx == vy, or Axes::x) go through a moment histogram
/// of squared pair distances: every term depends on rho = dx^2 [+ dy^2] only,
/// so one pass over the pairs serves every variance. Log-spaced bins with a
/// fifth-order Taylor expansion of exp(-rho / 2v) around each bin centre keep
/// the relative error below 1e-13. Anisotropic requests use direct sums.
std::vector<double> same_copy_sums(const PairSample& sample, Axes axes, std::size_t stride,
                                   std::span<const Variances> variances);

/// Direct evaluation of same_copy_sums for arbitrary variances.
std::vector<double> same_copy_sums_direct(const PairSample& sample, Axes axes,
                                          std::size_t stride,
                                          std::span<const Variances> variances);

/// All-pairs sums. Small samples are summed directly; larger ones go
/// through Gaussian gridding and an FFT (see spectral.cpp), relative error
/// around 1e-10.
std::vector<double> cross_sums(const PairSample& sample, Axes axes,
                               std::span<const Variances> variances);

/// The FFT route unconditionally (exposed for tests and benchmarks).
std::vector<double> cross_sums_spectral(const PairSample& sample, Axes axes,
                                        std::span<const Variances> variances);

/// Direct O(P^2) all-pairs sums, parallel over rows.
std::vector<double> cross_sums_direct(const PairSample& sample, Axes axes,
                                      std::span<const Variances> variances);

}  // namespace nwtd::parallel
