#pragma once

// Portable pseudo-random streams. Everything here is specified down to the bit
// so that generated datasets and shuffles are identical on every platform;
// the <random> distributions are implementation-defined and are not used.

#include <array>
#include <cstdint>
#include <span>

namespace probebench::rng {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Combines a seed with a stream tag into an independent-looking 64-bit key.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) noexcept {
  std::uint64_t s = seed ^ (tag * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  std::uint64_t a = splitmix64(s);
  return splitmix64(s) ^ (a << 1);
}

// Stream purposes. Mixing (seed, purpose) keeps e.g. the shuffle stream of a
// seed disjoint from its subsampling stream.
enum class Purpose : std::uint64_t {
  kSynthDirections = 0x44495245ULL,
  kSynthExample = 0x45584d50ULL,
  kShuffle = 0x53485546ULL,
  kSubsample = 0x53554247ULL,
};

// xoshiro256** 1.0 (Blackman & Vigna), state seeded through splitmix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  // Substream keyed by (seed, purpose, index), e.g. one per example.
  static Xoshiro256 substream(std::uint64_t seed, Purpose purpose, std::uint64_t index = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  // Uniform integer in [0, bound) by rejection sampling. bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Standard normal via the Box-Muller transform (one value per call; the
  // paired value is cached).
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// In-place Fisher-Yates shuffle driven by `gen.below`.
template <typename T>
void shuffle(std::span<T> items, Xoshiro256& gen) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace probebench::rng
