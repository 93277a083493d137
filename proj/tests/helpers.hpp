#pragma once

#include <random>
#include <vector>

#include "nwtd/diffusion.hpp"
#include "oracles.hpp"

namespace testing_util {

/// Copy-major pairs built by hand; time metadata set to a unit mesh.
inline nwtd::PairSample make_pairs(std::size_t n_copies, std::size_t n_time, std::vector<double> from,
                                   std::vector<double> to) {
  nwtd::PairSample p;
  p.n_copies = n_copies;
  p.n_time = n_time;
  p.lag_steps = 1;
  p.delta = 1.0;
  p.T = static_cast<double>(n_time - 1);
  p.t = 1.0;
  p.from = std::move(from);
  p.to = std::move(to);
  return p;
}

inline nwtd::PairSample random_pairs(std::size_t n_copies, std::size_t n_time, unsigned seed,
                                     double spread = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, spread);
  std::vector<double> a(n_copies * n_time), b(n_copies * n_time);
  for (auto& v : a) v = g(gen);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = 0.6 * a[k] + 0.8 * g(gen);
  return make_pairs(n_copies, n_time, a, b);
}

inline oracle::TinySample tiny(const nwtd::PairSample& p) {
  return {p.n_copies, p.n_time, p.from, p.to};
}

}  // namespace testing_util
