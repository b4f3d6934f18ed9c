#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace netcage {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent child seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

// std::uniform_real_distribution and std::normal_distribution are not
// specified bit-for-bit across standard libraries; these are.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  // Box-Muller, discarding the second variate so the stream stays stateless.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Uniformly random permutation of 0..n-1 (Fisher-Yates on uniform01).
template <typename Int>
std::vector<Int> random_permutation(Int n, Rng& rng) {
  std::vector<Int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Int{0});
  for (Int i = n - 1; i > 0; --i) {
    const auto j = std::min(static_cast<Int>(uniform01(rng) * static_cast<double>(i + 1)), i);
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace netcage
