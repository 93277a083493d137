#include "nwtd/compute/common.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nwtd::compute {

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

void reduce_range(const std::vector<std::vector<double>>& blocks, std::size_t lo, std::size_t hi,
                  std::vector<double>& out) {
  if (hi - lo == 1) {
    out = blocks[lo];
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right;
  reduce_range(blocks, lo, mid, out);
  reduce_range(blocks, mid, hi, right);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += right[k];
}

}  // namespace

std::vector<double> pairwise_sum_blocks(const std::vector<std::vector<double>>& blocks) {
  if (blocks.empty()) return {};
  for (const auto& b : blocks) {
    if (b.size() != blocks.front().size()) throw std::invalid_argument("block sizes differ");
  }
  std::vector<double> out;
  reduce_range(blocks, 0, blocks.size(), out);
  return out;
}

double gauss_from_sq(double rho, double v, Axes axes) noexcept {
  const double e = std::exp(-rho / (2.0 * v));
  return axes == Axes::x ? e / std::sqrt(2.0 * M_PI * v) : e / (2.0 * M_PI * v);
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace nwtd::compute
