#pragma once

#include <array>
#include <cstdint>

namespace nwtd {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A (key, counter) pair maps to four independent 32-bit words, so any
/// substream can be reached without generating its predecessors.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// splitmix64 finalizer; used to derive keys from (seed, index) tuples.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Standard normal draws for one substream, keyed on (seed, stream).
///
/// Each Philox block yields two 53-bit uniforms which Box-Muller turns into
/// two normals. The sequence is a pure function of (seed, stream).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  double next() noexcept;

 private:
  double refill() noexcept;

  Philox4x32::Key key_{};
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace nwtd
