#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nwtd::compute {

/// Which coordinates of a PairSample enter a pair sum: the `from` values only,
/// or the (from, to) pairs with a product kernel.
enum class Axes { x, xy };

/// Gaussian variances for the x (from) and y (to) axes of a pair sum term
/// G_{vx}(dx) G_{vy}(dy). For Axes::x only `vx` is read.
struct Variances {
  double vx;
  double vy;
};

/// Tree summation with a fixed shape that depends only on the input length.
double pairwise_sum(std::span<const double> values) noexcept;

/// Element-wise pairwise reduction of equally sized blocks, in block order.
std::vector<double> pairwise_sum_blocks(const std::vector<std::vector<double>>& blocks);

/// Normalized Gaussian product evaluated from a squared distance: 1D or 2D.
double gauss_from_sq(double rho, double v, Axes axes) noexcept;

int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace nwtd::compute
