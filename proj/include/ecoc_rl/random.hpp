#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace ecoc_rl {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Every random stream in the library is a SplitMix64 seeded through
/// derive_seed(), so a stream is fully identified by a tuple of integers and
/// results do not depend on which thread happens to run which piece of work.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

  friend constexpr bool operator==(const SplitMix64&, const SplitMix64&) = default;

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

/// Stafford variant-13 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hashes a base seed and a sequence of integer coordinates into a new seed.
/// Order matters: derive_seed(s, 1, 2) != derive_seed(s, 2, 1).
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Parts... parts) noexcept {
  std::uint64_t h = mix64(base + 0x632be59bd9b4e019ULL);
  ((h = mix64(h ^ (mix64(static_cast<std::uint64_t>(parts) + 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2)))),
   ...);
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Lemire's multiply-shift with rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) noexcept {
  __uint128_t m = static_cast<__uint128_t>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<__uint128_t>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline bool bernoulli(Rng& rng, double p) noexcept { return uniform01(rng) < p; }

/// Fisher-Yates. Spelled out because std::shuffle's output is library-specific.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) noexcept {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace ecoc_rl
