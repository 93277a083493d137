#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "nwtd/compute/parallel.hpp"
#include "nwtd/kernels.hpp"

namespace nwtd::parallel {

namespace {

constexpr std::size_t kBlock = 256;
constexpr std::size_t kMinChunk = 2048;
constexpr std::size_t kMaxChunks = 64;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t chunk_size(std::size_t n) {
  return std::max(kMinChunk, (n + kMaxChunks - 1) / kMaxChunks);
}

}  // namespace

std::vector<double> smooth_1d(std::span<const double> points, double h,
                              std::span<const double> grid) {
  const std::size_t n = points.size();
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> out(grid.size());
  const auto m = static_cast<std::ptrdiff_t>(grid.size());

#pragma omp parallel
  {
    std::vector<double> block_sums(n_blocks);
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < m; ++j) {
      const double x = grid[static_cast<std::size_t>(j)];
      for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        double s = 0.0;
        for (std::size_t p = b * kBlock; p < end; ++p) s += gauss_scaled(h, points[p] - x);
        block_sums[b] = s;
      }
      out[static_cast<std::size_t>(j)] = compute::pairwise_sum(block_sums) / static_cast<double>(n);
    }
  }
  return out;
}

std::vector<double> smooth_2d(std::span<const double> from, std::span<const double> to, double h1,
                              double h2, std::span<const double> gx, std::span<const double> gy) {
  const std::size_t n = from.size();
  const std::size_t mx = gx.size();
  const std::size_t my = gy.size();
  const std::size_t chunk = chunk_size(n);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<std::vector<double>> partials(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t rows = std::min(n, begin + chunk) - begin;
    RowMatrix a(rows, mx);
    RowMatrix b(rows, my);
    for (std::size_t p = 0; p < rows; ++p) {
      for (std::size_t j = 0; j < mx; ++j) a(p, j) = gauss_scaled(h1, from[begin + p] - gx[j]);
      for (std::size_t k = 0; k < my; ++k) b(p, k) = gauss_scaled(h2, to[begin + p] - gy[k]);
    }
    RowMatrix prod = a.transpose() * b;
    auto& dst = partials[static_cast<std::size_t>(c)];
    dst.assign(prod.data(), prod.data() + prod.size());
  }

  auto out = compute::pairwise_sum_blocks(partials);
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace nwtd::parallel
