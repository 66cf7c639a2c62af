#pragma once

#include <cstdint>

namespace sbm {

// SplitMix64 finalizer (Steele, Lea & Flood 2014; constants from Vigna's
// reference implementation). A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Counter-based generator: word(c) = mix(key + (c + 1) * gamma) with
// key = mix(seed). Every draw is addressable by its counter, so results do
// not depend on evaluation order or platform.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(splitmix64_mix(seed)) {}

  constexpr std::uint64_t word(std::uint64_t counter) const {
    return splitmix64_mix(key_ + (counter + 1) * kGoldenGamma);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Sequential view over a CounterRng.
class StreamRng {
 public:
  explicit constexpr StreamRng(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next_word() { return rng_.word(counter_++); }
  double next_uniform() { return rng_.uniform(counter_++); }

  // Uniform integer in [0, bound) by 128-bit multiply-shift.
  std::uint64_t next_index(std::uint64_t bound) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(next_word()) * bound;
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace sbm
